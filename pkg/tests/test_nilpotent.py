from fractions import Fraction

import pytest

from rigidity_lab.laurent import LaurentZ, RationalZ
from rigidity_lab.nilpotent import NilElement, NilModel, integrate, nilpotent_exp


def cp1():
    # one generator c with c^2 = 0 and integral(c) = 2 (degree of TS^2)
    return NilModel((1,), {(1,): 2})


def test_exp_square_zero():
    m = NilModel((1,), {(1,): 1})
    x = m.gen(0)
    assert nilpotent_exp(x) == m.one() + x


def test_exp_zero():
    m = NilModel((1,), {(1,): 1})
    assert nilpotent_exp(m.zero()) == m.one()


def test_exp_two_generators_brute_force():
    m = NilModel((1, 1), {(1, 1): 1})
    x, y = m.gen(0), m.gen(1)
    # brute force: (x+y)^0/0! + (x+y)^1/1! + (x+y)^2/2! with x^2 = y^2 = 0
    expected = m.one() + x + y + x * y
    assert nilpotent_exp(x + y) == expected


def test_exp_requires_zero_constant():
    m = cp1()
    with pytest.raises(ValueError):
        nilpotent_exp(m.one())


def test_integrate_linear():
    m = NilModel((1,), {(1,): 1})
    g = m.gen(0)
    elem = m.scalar(Fraction(5)) + g * Fraction(7)
    assert integrate(elem) == 7


def test_integrate_point_model_passthrough():
    assert integrate(Fraction(3, 2)) == Fraction(3, 2)
    p = NilModel.point()
    assert integrate(p.scalar(Fraction(3, 2))) == Fraction(3, 2)


def test_integrate_exp_two_gens():
    m = NilModel((1, 1), {(1, 1): 1})
    g, h = m.gen(0), m.gen(1)
    assert integrate(nilpotent_exp(g + h)) == 1  # coefficient of gh in 1+g+h+gh


def test_chern_weil_degree():
    # integral over CP^1 of e^c with integral(c) = 2 gives 2
    m = cp1()
    c = m.gen(0)
    assert integrate(nilpotent_exp(c)) == 2


def test_truncation_by_top_powers():
    m = NilModel((2,), {(2,): 1})
    g = m.gen(0)
    assert g * g * g == m.zero()
    assert integrate(nilpotent_exp(g)) == Fraction(1, 2)  # c^2/2! survives


def test_inverse_unit():
    m = NilModel((1, 1), {(1, 1): 1})
    x, y = m.gen(0), m.gen(1)
    u = m.one() + x + y * Fraction(3)
    v = u.inverse()
    assert u * v == m.one()


def test_inverse_with_laurent_constant():
    m = NilModel((1,), {(1,): 1})
    d = LaurentZ.monomial(Fraction(1, 2)) - LaurentZ.monomial(Fraction(-1, 2))
    elem = m.scalar(d) + m.gen(0)
    inv = elem.inverse()
    prod = elem * inv
    one = prod.constant_term()
    assert isinstance(one, RationalZ) and one == 1
    assert prod.positive_part().is_zero()


def test_nonunit_inverse_raises():
    m = cp1()
    from rigidity_lab.errors import NonUnitError

    with pytest.raises(NonUnitError):
        m.gen(0).inverse()
