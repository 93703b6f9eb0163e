import random
from fractions import Fraction

import pytest

from rigidity_lab.cyclotomic import CycRat, root_of_unity
from rigidity_lab.errors import NonUnitError
from rigidity_lab.laurent import LaurentZ, RationalZ
from rigidity_lab.nilpotent import NilModel
from rigidity_lab.series import QSeries, shift_z
from rigidity_lab.theta import (
    dedekind_eta,
    euler_product,
    jacobi_theta,
    normalized_reciprocal,
    normalized_reciprocal_parts,
    tangent_reciprocal,
    theta_denominator,
    theta_prime_by_differentiation,
    theta_prime_zero_over_2pi,
    theta_shift_checks,
    theta_sum_oracle,
)

EIGHTH = Fraction(1, 8)


def test_eta_first_terms():
    eta = dedekind_eta(Fraction(24 * 12 + 1, 24))
    off = Fraction(1, 24)
    # pentagonal-number pattern 1 - q - q^2 + q^5 + q^7 - q^12 ...
    assert eta.coeff(off) == 1
    assert eta.coeff(off + 1) == -1
    assert eta.coeff(off + 2) == -1
    assert eta.coeff(off + 3) == 0
    assert eta.coeff(off + 5) == 1
    assert eta.coeff(off + 7) == 1
    assert eta.coeff(off + 12) == -1


def test_eta_24_is_integral_with_constant_one():
    eta = dedekind_eta(21)
    f = (eta**24).shift(-1)
    assert f.coeff(0) == 1
    for e, c in f.terms.items():
        if e <= 20:
            assert Fraction(c).denominator == 1


def test_theta_lowest_coefficient():
    th = jacobi_theta(Fraction(9, 8))
    minus_i = root_of_unity(Fraction(-1, 4))
    i = root_of_unity(Fraction(1, 4))
    w = Fraction(1, 2)
    assert th.min_exp() == EIGHTH
    assert th.coeff(EIGHTH) == LaurentZ.monomial(w, minus_i) + LaurentZ.monomial(-w, i)
    # q^{9/8}: +i (zeta^{3/2} - zeta^{-3/2})
    assert th.coeff(EIGHTH + 1) == LaurentZ.monomial(3 * w, i) + LaurentZ.monomial(
        -3 * w, minus_i
    )


def test_theta_vanishes_at_zeta_one():
    th = jacobi_theta(Fraction(6 * 8 + 1, 8))
    for e, c in th.terms.items():
        total = sum(c.terms.values(), CycRat.from_rational(0))
        assert not total, f"theta coefficient at q^{e} does not vanish at zeta = 1"


def test_theta_matches_sum_oracle():
    T = Fraction(12 * 8 + 1, 8)
    assert jacobi_theta(T) == theta_sum_oracle(T)


def test_theta_is_odd_in_z():
    th = jacobi_theta(Fraction(49, 8))
    for c in th.terms.values():
        assert c.invert_z() == -c


def test_theta_odd_under_specialisation_at_roots_of_unity():
    th = jacobi_theta(Fraction(33, 8))
    rng = random.Random(2024)
    for _ in range(5):
        r = Fraction(rng.randrange(1, 12), 12)

        def specialise(c, r=r):
            return sum(
                (coeff * root_of_unity(k * r) for k, coeff in c.terms.items()),
                CycRat.from_rational(0),
            )

        for e, c in th.terms.items():
            assert specialise(c, r) == -specialise(c, -r)


def test_theta_prime_is_eta_cubed():
    T = Fraction(20 * 8 + 1, 8)
    tp = theta_prime_zero_over_2pi(T)
    eta3 = dedekind_eta(T) ** 3
    assert tp.agrees_with(eta3, upto=T)


def test_theta_prime_by_differentiation_path():
    T = Fraction(20 * 8 + 1, 8)
    th = jacobi_theta(T)
    assert theta_prime_by_differentiation(th).agrees_with(
        theta_prime_zero_over_2pi(T), upto=T
    )


def test_theta_prime_first_terms():
    tp = theta_prime_zero_over_2pi(Fraction(57, 8))
    assert tp.coeff(EIGHTH) == 1
    assert tp.coeff(EIGHTH + 1) == -3
    assert tp.coeff(EIGHTH + 2) == 0
    assert tp.coeff(EIGHTH + 3) == 5
    assert tp.coeff(EIGHTH + 6) == -7


def test_normalized_reciprocal_q0():
    r = normalized_reciprocal(LaurentZ.monomial(1), None, 4)
    w = Fraction(1, 2)
    pole = LaurentZ.monomial(w) - LaurentZ.monomial(-w)
    assert r.coeff(0) == RationalZ(LaurentZ.one(), pole)


def test_normalized_reciprocal_rejects_degenerate():
    with pytest.raises(NonUnitError):
        normalized_reciprocal(LaurentZ.one(), None, 4)


def test_normalized_reciprocal_times_theta_factor():
    # R(v) * [ (w - w^{-1}) prod (1-q^n zeta)(1-q^n zeta^{-1}) / c(q)^2 ] == 1
    T = 6
    parts = normalized_reciprocal_parts(1, None, T)
    prod = QSeries.one(1, Fraction(T))
    for n in range(1, T + 2):
        prod = prod * QSeries(
            1,
            None,
            {
                0: LaurentZ.one(),
                n: -(LaurentZ.monomial(1) + LaurentZ.monomial(-1)),
                2 * n: LaurentZ.one(),
            },
        )
    c2 = euler_product(Fraction(T)) ** 2
    lhs = parts.series * prod
    assert lhs.agrees_with(c2, upto=Fraction(T))


def test_theta_denominator_shift_twist_identity():
    # theta(x + m(t + a tau)) = e^{-pi i (2max + 2m^2 a t + m^2 a^2 tau)} theta(x + mt)
    # in pi-free series form:
    #   Denom(j = ma) == exp(-ma c) z^{-m^2 a} q^{-m^2 a^2 / 2} Denom(j = 0)
    T = 8
    for m, a in ((1, 2), (1, -2), (2, 2)):
        lhs = theta_denominator(m, None, T, q_offset=m * a)
        rhs = (
            theta_denominator(m, None, T) * LaurentZ.monomial(-m * m * a)
        ).shift(Fraction(-m * m * a * a, 2))
        assert lhs.agrees_with(rhs), f"shift twist failed for m={m}, a={a}"


def test_theta_denominator_shift_twist_with_nilpotents():
    model = NilModel((2,), {(2,): 1})
    c = model.gen(0)
    m, a = 1, 2
    T = 6
    lhs = theta_denominator(m, c, T, q_offset=m * a)
    twist = (c * Fraction(-m * a)).exp()
    rhs = (
        (theta_denominator(m, c, T) * twist) * LaurentZ.monomial(-m * m * a)
    ).shift(Fraction(-m * m * a * a, 2))
    assert lhs.agrees_with(rhs)


def test_tangent_reciprocal_bernoulli_tail():
    m = NilModel((4,), {(4,): 1})
    c = m.gen(0)
    r = tangent_reciprocal(c, 3)
    q0 = r.coeff(0)
    assert q0.terms[(0,)] == 1
    assert q0.terms[(2,)] == Fraction(-1, 24)
    assert q0.terms[(4,)] == Fraction(7, 5760)
    assert (1,) not in q0.terms and (3,) not in q0.terms


def test_theta_shift_checks_pass():
    rep = theta_shift_checks(Fraction(97, 8))  # 12 + 1/8
    assert rep.passed, rep.summary()


def test_theta_shift_checks_fault_injection():
    rep = theta_shift_checks(Fraction(49, 8), corrupt_at=Fraction(9, 8))
    assert not rep.passed
    assert any("(ii)" in p and "mismatch" in p for p in rep.details)
