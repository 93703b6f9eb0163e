"""Lattice vertex-algebra characters and their transformation checks.

For an even lattice K with dual cosets K + beta_g, the irreducible-module
characters are

    chi_g(h, tau) = theta_{K + beta_g}(h, tau) / eta(q)^c,   c = rank K,

with q-grading shifted by -c/24 and lowest exponent lambda_g - c/24 where
lambda_g is half the minimal norm in the coset.  The elliptic and T
transformation laws are verified exactly at series level; the square-bracket
coefficient table c(k, i, m) is the coefficient of z^i in (ln(1+z))^m (1+z)^{k-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import CycRat, root_of_unity
from .errors import InputError
from .lattice import (
    EvenLattice,
    ExpCharacter,
    TrivialCharacter,
    VectorCharacter,
    discriminant_group,
    enumerate_coset,
    theta_series,
)
from .report import CheckReport
from .series import QSeries
from .theta import euler_product


def eta_inverse_power(c: int, T) -> QSeries:
    """eta(q)^{-c} = q^{-c/24} prod (1-q^n)^{-c}, complete to T - c/24."""
    T = Fraction(T)
    if c == 0:
        return QSeries(1, T, {Fraction(0): Fraction(1)})
    body = (euler_product(T) ** c).invert_unital()
    return body.shift(Fraction(-c, 24))


def coset_offset(lattice: EvenLattice, coset) -> tuple:
    """Resolve a coset index (into the Smith-box representatives) or a vector."""
    if isinstance(coset, int):
        dual = discriminant_group(lattice)
        if not 0 <= coset < dual.group_order:
            raise InputError(
                f"coset index {coset} out of range 0..{dual.group_order - 1}"
            )
        return dual.coset_reps[coset]
    return tuple(Fraction(x) for x in coset)


@dataclass
class CharacterSeries:
    """chi as a QSeries plus the weight data the transformation laws need."""

    series: QSeries
    lam: Fraction  # lambda_g = (minimal norm in the coset)/2
    central_charge: int
    coset: tuple

    @property
    def lowest_exponent(self) -> Fraction:
        return self.lam - Fraction(self.central_charge, 24)


def character(
    lattice: EvenLattice,
    coset,
    phase: ExpCharacter | None = None,
    tau_shift=None,
    T=Fraction(8),
) -> CharacterSeries:
    """chi_g = theta_{K+beta_g} / eta^c, exact to T (minus c/24)."""
    T = Fraction(T)
    beta = coset_offset(lattice, coset)
    c = lattice.rank
    theta = theta_series(lattice, beta, phase, tau_shift, T)
    series = theta * eta_inverse_power(c, T)
    lam = _minimal_norm_half(lattice, beta)
    return CharacterSeries(series=series, lam=lam, central_charge=c, coset=beta)


def _minimal_norm_half(lattice: EvenLattice, beta) -> Fraction:
    """lambda_g from actual enumeration (the representative need not be minimal)."""
    if lattice.rank == 0:
        return Fraction(0)
    bound = max(lattice.norm(beta) / 2, Fraction(1))
    while True:
        vecs = enumerate_coset(lattice, beta, bound)
        if vecs:
            return min(lattice.norm(v) for v in vecs) / 2
        bound *= 2


def two_variable_trace(lattice: EvenLattice, coset, v, u, T) -> QSeries:
    """The two-variable trace with both group insertions, in its lattice form:

        Z(v, u, q) = e^{pi i (u,v)} eta^{-c} sum_gamma e^{2 pi i (v,gamma)}
                     q^{(gamma+u, gamma+u)/2}.

    u and v are rational vectors in the dual span.
    """
    T = Fraction(T)
    beta = coset_offset(lattice, coset)
    v = tuple(Fraction(x) for x in v)
    u = tuple(Fraction(x) for x in u)
    phase = VectorCharacter(v) if any(v) else TrivialCharacter()
    theta = theta_series(lattice, beta, phase, u, T)
    # theta comes out as sum phase q^{(g+u,g+u)/2 - (u,u)/2}; restore the shift
    theta = theta.shift(lattice.norm(u) / 2)
    prefactor = root_of_unity(lattice.pairing(u, v) / 2)
    return theta * eta_inverse_power(lattice.rank, T) * prefactor


def graded_trace_oracle(lattice: EvenLattice, coset, v, u, T) -> QSeries:
    """Direct basis-counting oracle for two_variable_trace, up to small T.

    Enumerates module weight spaces as (c-coloured partition) x (lattice point)
    and sums e^{2 pi i ((v,gamma) + (u,v)/2)} q^{n + (gamma+u,gamma+u)/2 - c/24}
    term by term.  Partition counts come from an independent binomial recursion.
    """
    T = Fraction(T)
    beta = coset_offset(lattice, coset)
    v = tuple(Fraction(x) for x in v)
    u = tuple(Fraction(x) for x in u)
    c = lattice.rank
    off = Fraction(c, 24)
    pref = lattice.pairing(u, v) / 2
    terms: dict[Fraction, CycRat] = {}
    max_heis = int(T + off) + 1
    pc = _colored_partition_counts(c, max_heis)
    for gamma in enumerate_coset(lattice, tuple(b + x for b, x in zip(beta, u)), T + off):
        gam = tuple(g - x for g, x in zip(gamma, u))
        base = lattice.norm(gamma) / 2 - off
        phase = root_of_unity(lattice.pairing(v, gam) + pref)
        n = 0
        while base + n <= T:
            e = base + n
            coeff = phase * pc[n]
            acc = terms.get(e)
            s = acc + coeff if acc is not None else coeff
            if s:
                terms[e] = s
            elif e in terms:
                del terms[e]
            n += 1
    denom = 1
    for e in terms:
        denom = denom * e.denominator // math.gcd(denom, e.denominator)
    return QSeries(denom, T, terms)


def _colored_partition_counts(colors: int, n_max: int) -> list[int]:
    """Number of partitions of n with parts in `colors` colours, n <= n_max.

    Counted directly: choose the multiset of colour-multiplicities per part
    size (binomial(m + colors - 1, colors - 1) ways for m parts of one size).
    """
    counts = [0] * (n_max + 1)
    counts[0] = 1
    for part in range(1, n_max + 1):
        new = [0] * (n_max + 1)
        for rem in range(n_max + 1):
            m = 0
            while m * part <= rem:
                ways = math.comb(m + colors - 1, colors - 1) if colors else (1 if m == 0 else 0)
                new[rem] += ways * counts[rem - m * part]
                m += 1
        counts = new
    return counts


def quasi_periodicity_check(lattice, coset, h, alpha, T) -> CheckReport:
    """chi(h + alpha tau) == e^{-2 pi i (h,alpha)} q^{-(alpha,alpha)/2} chi(h), exactly.

    alpha must lie in the lattice; both sides are computed by independent
    enumerations (shifted ball vs plain ball) and compared on the common
    reliable window.
    """
    T = Fraction(T)
    beta = coset_offset(lattice, coset)
    h = tuple(Fraction(x) for x in h)
    alpha = tuple(Fraction(x) for x in alpha)
    if any(Fraction(x).denominator != 1 for x in alpha):
        raise InputError("alpha must be a lattice vector")
    phase = VectorCharacter(h) if any(h) else TrivialCharacter()
    a_norm = lattice.norm(alpha)
    lhs = theta_series(lattice, beta, phase, alpha, T)
    rhs_theta = theta_series(lattice, beta, phase, None, T + a_norm / 2)
    scalar = root_of_unity(-lattice.pairing(h, alpha))
    rhs = (rhs_theta * scalar).shift(-a_norm / 2)
    window = min(lhs.cutoff, rhs.cutoff)
    bad = lhs.first_disagreement(rhs, upto=window)
    name = f"quasi-periodicity alpha={alpha} h={h} to q^{window}"
    if bad is None:
        return CheckReport(name, True, [f"window q^{window}"])
    return CheckReport(
        name,
        False,
        [
            f"mismatch at exponent {bad}: "
            f"{lhs.terms.get(bad, 0)!r} vs {rhs.terms.get(bad, 0)!r}"
        ],
    )


def elliptic_invariance_check(lattice, coset, h, alpha, T) -> CheckReport:
    """chi(h + alpha) == chi(h) for alpha pairing integrally with the coset.

    The precondition (alpha, K + beta) in Z is checked honestly; the two
    characters are then compared exactly.
    """
    T = Fraction(T)
    beta = coset_offset(lattice, coset)
    h = tuple(Fraction(x) for x in h)
    alpha = tuple(Fraction(x) for x in alpha)
    for i in range(lattice.rank):
        basis = tuple(Fraction(1 if j == i else 0) for j in range(lattice.rank))
        if lattice.pairing(alpha, basis).denominator != 1:
            raise InputError(f"(alpha, basis_{i}) is not integral")
    if lattice.pairing(alpha, beta).denominator != 1:
        raise InputError("(alpha, coset representative) is not integral")
    shifted = tuple(a + b for a, b in zip(h, alpha))
    lhs = theta_series(lattice, beta, VectorCharacter(shifted), None, T)
    rhs = theta_series(
        lattice, beta, VectorCharacter(h) if any(h) else TrivialCharacter(), None, T
    )
    bad = lhs.first_disagreement(rhs, upto=T)
    name = f"elliptic invariance alpha={alpha} h={h} to q^{T}"
    if bad is None:
        return CheckReport(name, True)
    return CheckReport(name, False, [f"mismatch at exponent {bad}"])


def t_transformation_check(lattice, T) -> CheckReport:
    """chi_s(v, tau+1) = e^{2 pi i (lambda_s - c/24)} chi_s(v, tau) for every coset.

    Exact: multiply the coefficient at q^e by e^{2 pi i e} and compare with the
    constant phase; passes iff all exponents are congruent to lambda_s - c/24
    mod 1.
    """
    T = Fraction(T)
    dual = discriminant_group(lattice)
    rows = []
    for g in range(dual.group_order):
        chi = character(lattice, g, None, None, T)
        twisted = QSeries(
            chi.series.denom,
            chi.series.cutoff,
            {e: c * root_of_unity(e % 1) for e, c in chi.series.terms.items()},
        )
        rhs = chi.series * root_of_unity(chi.lowest_exponent % 1)
        bad = twisted.first_disagreement(rhs)
        rows.append((g, bad, chi.lowest_exponent % 1))
    failed = [(g, bad) for g, bad, _ in rows if bad is not None]
    name = f"T-transformation, {dual.group_order} cosets, to q^{T}"
    if not failed:
        details = [f"coset {g}: phase e({r})" for g, _, r in rows]
        return CheckReport(name, True, details)
    return CheckReport(name, False, [f"coset {g} mismatch at {bad}" for g, bad in failed])


def zhu_coefficients(k_max: int, i_max: int) -> dict:
    """Square-bracket change-of-basis table:

        c(k, i, m) = [z^i] (ln(1+z))^m (1+z)^{k-1},   m <= i <= i_max, 0 <= k <= k_max.

    Exact rationals; c(k, m, m) = 1 and c(k, i, 0) = binomial(k-1, i).
    """
    if k_max < 0 or i_max < 0:
        raise InputError("k_max and i_max must be nonnegative")
    # ln(1+z) truncated to z^{i_max}
    log_series = [Fraction(0)] + [
        Fraction((-1) ** (j + 1), j) for j in range(1, i_max + 1)
    ]

    def poly_mul(a, b):
        out = [Fraction(0)] * (i_max + 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if i + j > i_max:
                    break
                out[i + j] += x * y
        return out

    table: dict[tuple[int, int, int], Fraction] = {}
    for k in range(k_max + 1):
        # (1+z)^{k-1} as a series: generalised binomial for k = 0
        w = k - 1
        pw = [Fraction(1)]
        for i in range(1, i_max + 1):
            pw.append(pw[-1] * Fraction(w - i + 1, i))
        log_pow = [Fraction(1)] + [Fraction(0)] * i_max
        for m in range(0, i_max + 1):
            if m:
                log_pow = poly_mul(log_pow, log_series)
            prod = poly_mul(log_pow, pw)
            for i in range(m, i_max + 1):
                table[(k, i, m)] = prod[i]
    return table
