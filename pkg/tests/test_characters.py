import random
from fractions import Fraction

import pytest

from lattice_data import A1, A2, e8_gram
from rigidity_lab.characters import (
    character,
    elliptic_invariance_check,
    graded_trace_oracle,
    quasi_periodicity_check,
    t_transformation_check,
    two_variable_trace,
    zhu_coefficients,
)
from rigidity_lab.errors import InputError
from rigidity_lab.lattice import discriminant_group, enumerate_coset, validate

HALF = Fraction(1, 2)


def test_character_a1_vacuum():
    chi = character(validate(A1), 0, None, None, 6)
    off = Fraction(-1, 24)
    # theta = 1 + 2q + 2q^4 + ..., eta^{-1} = q^{-1/24} sum p(n) q^n:
    # 1 + 3q + 4q^2 + 7q^3 + ...
    assert chi.lam == 0
    assert chi.series.coeff(off) == 1
    assert chi.series.coeff(off + 1) == 3
    assert chi.series.coeff(off + 2) == 4


def test_character_rank0_is_one():
    from rigidity_lab.lattice import EvenLattice

    chi = character(EvenLattice(()), 0, None, None, 5)
    assert chi.series == 1
    assert chi.lam == 0 and chi.central_charge == 0


def test_character_half_coset_lowest_exponent():
    chi = character(validate(A1), 1, None, None, 6)
    assert chi.lam == Fraction(1, 4)
    assert chi.lowest_exponent == Fraction(5, 24)
    assert chi.series.min_exp() == Fraction(5, 24)


def test_character_coefficients_are_graded_dimensions():
    for gram, g in [(A1, 0), (A1, 1), (A2, 0), (A2, 1)]:
        chi = character(validate(gram), g, None, None, 6)
        for e, c in chi.series.terms.items():
            assert Fraction(c).denominator == 1 and c > 0


def test_minimal_vector_count_across_cosets():
    # sum over cosets of the lowest coefficient = number of minimal-norm
    # vectors of the dual in each coset, counted by independent enumeration
    for gram in (A1, A2):
        lat = validate(gram)
        dual = discriminant_group(lat)
        total = 0
        expected = 0
        for g, beta in enumerate(dual.coset_reps):
            chi = character(lat, g, None, None, 4)
            total += abs(chi.series.terms[chi.series.min_exp()])
            vecs = enumerate_coset(lat, beta, chi.lam)
            expected += sum(1 for v in vecs if lat.norm(v) / 2 == chi.lam)
        assert total == expected


def test_two_variable_trace_u_zero_is_character():
    lat = validate(A1)
    v = (Fraction(1, 4),)
    z = two_variable_trace(lat, 0, v, (0,), 5)
    from rigidity_lab.lattice import VectorCharacter
    from rigidity_lab.characters import eta_inverse_power
    from rigidity_lab.lattice import theta_series

    chi = theta_series(lat, (0,), VectorCharacter(v), None, Fraction(5)) * eta_inverse_power(1, Fraction(5))
    assert z.agrees_with(chi)


def test_two_variable_trace_u_in_lattice_completes_square():
    # v = 0, u = alpha in K: equals the plain character of the same coset
    lat = validate(A1)
    z = two_variable_trace(lat, 0, (0,), (1,), 5)
    chi = character(lat, 0, None, None, 5)
    assert z.agrees_with(chi.series, upto=Fraction(4))


def test_two_variable_trace_against_graded_oracle():
    lat = validate(A1)
    cases = [
        (0, (Fraction(1, 4),), (0,)),
        (1, (Fraction(1, 2),), (0,)),
        (0, (Fraction(1, 4),), (1,)),
        (1, (Fraction(-1, 4),), (-1,)),
    ]
    for g, v, u in cases:
        z = two_variable_trace(lat, g, v, u, 3)
        oracle = graded_trace_oracle(lat, g, v, u, 3)
        assert z.agrees_with(oracle, upto=Fraction(3) - Fraction(1, 24)), (g, v, u)


def test_two_variable_trace_symmetry_under_negation_and_conjugation():
    # negating (u, v) swaps the coset for its negative: Z_{-g}(-v,-u) = Z_g(v,u),
    # and coefficient conjugation gives conj Z_g(v,u) = Z_{-g}(v,-u)
    lat = validate(A2)
    dual = discriminant_group(lat)
    v = (Fraction(1, 3), Fraction(1, 4))
    u = (1, 0)
    g, gneg = 1, dual.coset_index(lat, tuple(-x for x in dual.coset_reps[1]))
    plus = two_variable_trace(lat, g, v, u, 3)
    swapped = two_variable_trace(
        lat, gneg, tuple(-x for x in v), tuple(-x for x in u), 3
    )
    assert plus.agrees_with(swapped)
    conj_side = two_variable_trace(lat, gneg, v, tuple(-x for x in u), 3)
    for e, c in plus.terms.items():
        cc = c.conj() if hasattr(c, "conj") else c
        assert conj_side.terms.get(e, 0) == cc


def test_quasi_periodicity_a1():
    rep = quasi_periodicity_check(validate(A1), 0, (Fraction(1, 4),), (1,), 8)
    assert rep.passed, rep.summary()


def test_quasi_periodicity_zero_alpha():
    rep = quasi_periodicity_check(validate(A1), 1, (Fraction(1, 4),), (0,), 6)
    assert rep.passed


def test_quasi_periodicity_e8_root():
    lat = validate(e8_gram())
    alpha = (1,) + (0,) * 7
    rep = quasi_periodicity_check(lat, 0, (0,) * 8, alpha, 6)
    assert rep.passed, rep.summary()


def test_quasi_periodicity_rejects_dual_vector():
    with pytest.raises(InputError):
        quasi_periodicity_check(validate(A1), 0, (0,), (HALF,), 4)


def test_elliptic_invariance_a1():
    rep = elliptic_invariance_check(validate(A1), 0, (Fraction(1, 4),), (HALF,), 8)
    assert rep.passed, rep.summary()


def test_elliptic_invariance_guard_fires():
    # coset alpha/2, shift alpha/2: pairing (alpha/2, (n+1/2) alpha) is n + 1/2
    with pytest.raises(InputError):
        elliptic_invariance_check(validate(A1), 1, (Fraction(1, 4),), (HALF,), 6)


def test_t_transformation_a1_and_e8():
    rep = t_transformation_check(validate(A1), 6)
    assert rep.passed, rep.summary()
    rep8 = t_transformation_check(validate(e8_gram()), 4)
    assert rep8.passed
    # c = 8, lambda = 0: phase e^{2 pi i (-1/3)}
    assert any("e(2/3)" in d for d in rep8.details)


def test_zhu_table_identities():
    table = zhu_coefficients(12, 12)
    import math

    for k in range(13):
        for m in range(13):
            assert table[(k, m, m)] == 1
        for i in range(13):
            assert table[(k, i, 0)] == math.comb(k - 1, i) if k >= 1 else True
    for i in range(13):
        assert table[(0, i, 0)] == (-1) ** i  # (1+z)^{-1}
    assert table[(1, 2, 1)] == Fraction(-1, 2)


def test_zhu_recursion_against_independent_expansion():
    # d/dz[(ln(1+z))^m (1+z)^{k-1}] gives
    # i c(k,i,m) = m c(k-1,i-1,m-1) + (k-1) c(k-1,i-1,m); check against an
    # independently coded polynomial expansion for k,i,m <= 8
    import itertools

    def indep(k, i, m):
        # dense polynomial arithmetic, written separately from the library
        N = i + 1
        log = [Fraction(0)] * N
        for j in range(1, N):
            log[j] = Fraction((-1) ** (j + 1), j)
        poly = [Fraction(1)] + [Fraction(0)] * (N - 1)
        for _ in range(m):
            nxt = [Fraction(0)] * N
            for a in range(N):
                for b in range(N - a):
                    nxt[a + b] += poly[a] * log[b]
            poly = nxt
        binom = [Fraction(1)] + [Fraction(0)] * (N - 1)
        for j in range(1, N):
            binom[j] = binom[j - 1] * Fraction(k - 1 - j + 1, j)
        out = Fraction(0)
        for a in range(i + 1):
            out += poly[a] * binom[i - a]
        return out

    table = zhu_coefficients(8, 8)
    for k, i, m in itertools.product(range(9), range(9), range(9)):
        if m <= i:
            assert table[(k, i, m)] == indep(k, i, m)
    for k in range(1, 9):
        for i in range(1, 9):
            for m in range(1, i + 1):
                lhs = i * table[(k, i, m)]
                rhs = m * table.get((k - 1, i - 1, m - 1), indep(k - 1, i - 1, m - 1))
                rhs += (k - 1) * table.get((k - 1, i - 1, m), indep(k - 1, i - 1, m))
                assert lhs == rhs, (k, i, m)
