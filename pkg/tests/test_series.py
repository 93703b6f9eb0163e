import random
from fractions import Fraction

import pytest

from rigidity_lab.errors import NonUnitError
from rigidity_lab.laurent import LaurentZ, RationalZ
from rigidity_lab.series import QSeries, geometric, shift_z


def geom_q(T):
    """sum_{n>=0} q^n with cutoff T."""
    return QSeries(1, T, {Fraction(n): Fraction(1) for n in range(int(T) + 1)})


def test_telescoping_product():
    one_minus_q = QSeries(1, None, {0: 1, 1: -1})
    s = one_minus_q * geom_q(10)
    assert s == QSeries.one()
    assert s.cutoff == 10


def test_fractional_exponent_product():
    a = QSeries.monomial(Fraction(1, 2))
    b = QSeries.monomial(Fraction(1, 3))
    p = a * b
    assert p.terms == {Fraction(5, 6): Fraction(1)}
    assert p.denom == 6


def test_mul_window_bookkeeping():
    # a known to q^5 with min exp 2, b known to q^7 with min exp 0:
    # product window = min(5 + 0, 7 + 2) = 5
    a = QSeries(1, 5, {2: 1, 3: 1})
    b = QSeries(1, 7, {0: 1, 1: 1})
    assert (a * b).cutoff == 5


def test_invert_geometric():
    one_minus_q = QSeries(1, 12, {0: 1, 1: -1})
    inv = one_minus_q.invert()
    assert inv.agrees_with(geom_q(12))
    assert (one_minus_q * inv).agrees_with(QSeries.one())


def test_invert_window_shrinks_for_shifted_series():
    # q^2 (1 - q) known to T=10: inverse reliable to 10 - 2*2 = 6
    a = QSeries(1, 10, {2: 1, 3: -1})
    inv = a.invert()
    assert inv.cutoff == 6
    assert (a * inv).agrees_with(QSeries.one())


def test_invert_errors():
    with pytest.raises(NonUnitError):
        QSeries.zero(1, 5).invert()


def test_invert_laurent_lowest_becomes_rational():
    d = LaurentZ.monomial(Fraction(1, 2)) - LaurentZ.monomial(Fraction(-1, 2))
    a = QSeries(1, 4, {0: d})
    inv = a.invert()
    c0 = inv.coeff(0)
    assert isinstance(c0, RationalZ)
    assert c0 == RationalZ(LaurentZ.one(), d)
    assert (a * inv).agrees_with(QSeries.one())


def test_ring_laws_on_random_sparse_series():
    rng = random.Random(42)

    def rand_series():
        T = Fraction(rng.randrange(6, 12))
        terms = {}
        for _ in range(rng.randrange(1, 6)):
            e = Fraction(rng.randrange(0, 2 * int(T)), 2)
            terms[e] = Fraction(rng.randrange(-5, 6))
        return QSeries(2, T, terms)

    for _ in range(30):
        a, b, c = rand_series(), rand_series(), rand_series()
        w = min(x.cutoff for x in (a, b, c))
        assert ((a * b) * c).agrees_with(a * (b * c), upto=w - 22)
        assert (a * (b + c)).agrees_with(a * b + a * c)
        assert (a + b).agrees_with(b + a)


def test_double_invert_is_identity():
    a = QSeries(1, 10, {0: Fraction(2), 1: Fraction(3), 4: Fraction(-1)})
    assert a.invert().invert().agrees_with(a)


def test_shift_z_basic():
    zc = LaurentZ.monomial(1) + LaurentZ.monomial(-1)
    s = QSeries(1, 10, {0: zc})
    shifted = shift_z(s, 2, max_abs_zexp=1)
    assert shifted.cutoff == 8
    assert shifted.terms == {
        Fraction(2): LaurentZ.monomial(1),
        Fraction(-2): LaurentZ.monomial(-1),
    }


def test_shift_z_constant_series_unchanged():
    s = QSeries(1, 10, {0: LaurentZ.one(), 3: LaurentZ.one() * 5})
    assert shift_z(s, 2).terms == s.terms


def test_shift_z_window_rule():
    zc = LaurentZ.monomial(3) + LaurentZ.monomial(-3)
    s = QSeries(1, 10, {0: zc})
    assert shift_z(s, 2, max_abs_zexp=3).cutoff == 4


def test_shift_z_round_trip():
    rng = random.Random(9)
    terms = {}
    for e in range(5):
        terms[Fraction(e)] = LaurentZ(
            {Fraction(k): Fraction(rng.randrange(-3, 4)) for k in range(-2, 3)}
        )
    s = QSeries(1, 10, terms)
    back = shift_z(shift_z(s, 2, 2), -2, 2)
    assert s.agrees_with(back)


def test_geometric_expansion():
    g = geometric(1, 2, 5)
    assert g.coeff(3) == LaurentZ.monomial(6)
    assert g.coeff(0) == LaurentZ.one()


def test_truncate_and_shift():
    s = QSeries(1, 10, {0: 1, 5: 2, 9: 3})
    t = s.truncate(5)
    assert t.cutoff == 5 and 9 not in t.terms
    sh = s.shift(Fraction(1, 3))
    assert sh.denom == 3
    assert sh.coeff(Fraction(16, 3)) == 2
