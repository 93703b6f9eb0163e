"""Floating-point evaluation and the modular checks beyond exact series reach.

Everything here is machine double precision with explicit geometric tail
bounds (desk-scale orders and |q| well inside the unit disc keep residuals
far below the acceptance tolerances; the bounds make that auditable).

The S-matrix of a lattice vertex algebra is recovered numerically from the
transformation

    chi_g(v/tau, -1/tau) = e^{pi i (v,v)/tau} sum_h S_{g,h} chi_h(v, tau)

by solving a linear system over sample vectors v, and compared against the
Poisson-summation prediction.  Derivation of the prediction: applying Poisson
summation over K + beta_g to the Gaussian e^{2 pi i (h,x)} e^{-pi i (x,x)/tau}
(Fourier transform of e^{pi i tau' (x,x) + 2 pi i (b,x)} being
(i/tau')^{c/2} e^{-pi i (b,b)/tau'}) gives

    theta_{K+beta_g}(v/tau, -1/tau) = (tau/i)^{c/2} |K^o/K|^{-1/2}
        e^{pi i (v,v) tau ... } sum_{delta in K^o} e^{2 pi i (delta, beta_g)}
        e^{-2 pi i (delta, v)} q^{(delta,delta)/2} * e^{pi i (v,v)/tau};

collecting delta by cosets and using eta(-1/tau) = sqrt(tau/i) eta(tau) and
theta_{K+beta}(-v) = theta_{K-beta}(v) yields

    S_{g,h} = |K^o/K|^{-1/2} e^{-2 pi i (beta_g, beta_h)}.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cyclotomic import to_complex_scalar
from .errors import InputError
from .lattice import EvenLattice, discriminant_group, enumerate_coset
from .laurent import LaurentZ, RationalZ
from .nilpotent import NilElement
from .report import CheckReport
from .series import QSeries

TWO_PI_I = 2j * cmath.pi


@dataclass
class EvalPoint:
    tau: complex
    t: complex = 0.0
    h: tuple | None = None

    def __post_init__(self):
        if self.tau.imag <= 0:
            raise InputError("tau must lie in the upper half plane")

    @property
    def q(self) -> complex:
        return cmath.exp(TWO_PI_I * self.tau)

    @property
    def z(self) -> complex:
        return cmath.exp(TWO_PI_I * self.t)


@dataclass
class EvalResult:
    value: complex
    tail_bound: float

    def __complex__(self):
        return self.value


def _coeff_magnitude(coeff, point: EvalPoint) -> float:
    return abs(_coeff_value(coeff, point))


def _coeff_value(coeff, point: EvalPoint) -> complex:
    if isinstance(coeff, NilElement):
        raise InputError("cannot evaluate unintegrated nilpotent coefficients")
    if isinstance(coeff, (LaurentZ, RationalZ)):
        return coeff.evaluate_at_t(point.t)
    return to_complex_scalar(coeff)


def eval_series(series: QSeries, point: EvalPoint) -> EvalResult:
    """Sum the stored terms in ascending exponent order at q = e^{2 pi i tau}.

    tail_bound = C |q|^{T + d} / (1 - |q|^d) with d the exponent spacing and C
    the maximal coefficient magnitude over the last five stored orders; |q|
    must be < 1.
    """
    q = point.q
    absq = abs(q)
    if absq >= 1:
        raise InputError(f"|q| = {absq:.4f} >= 1: outside the convergence disc")
    total = 0.0 + 0.0j
    for e, coeff in series.sorted_terms():
        total += _coeff_value(coeff, point) * _q_power(q, e)
    if series.cutoff is None:
        return EvalResult(total, 0.0)
    delta = 1.0 / series.denom
    tail_exps = sorted(series.terms)[-5:]
    C = max((_coeff_magnitude(series.terms[e], point) for e in tail_exps), default=1.0)
    C = max(C, 1.0)
    tail = C * absq ** (float(series.cutoff) + delta) / (1 - absq**delta)
    return EvalResult(total, tail)


def _q_power(q: complex, e: Fraction) -> complex:
    # q^e via exp to keep fractional exponents on the principal branch of tau
    return cmath.exp(cmath.log(q) * float(e)) if e else 1.0 + 0j


# -- direct product-formula evaluations (independent of the series machinery) --


def eta_float(tau: complex, order: int = 60) -> complex:
    q = cmath.exp(TWO_PI_I * tau)
    out = cmath.exp(TWO_PI_I * tau / 24)
    for n in range(1, order + 1):
        out *= 1 - q**n
    return out


def theta_float(v: complex, tau: complex, order: int = 60) -> complex:
    """c(q) q^{1/8} 2 sin(pi v) prod (1 - q^n e^{2 pi i v})(1 - q^n e^{-2 pi i v})."""
    q = cmath.exp(TWO_PI_I * tau)
    zeta = cmath.exp(TWO_PI_I * v)
    out = cmath.exp(TWO_PI_I * tau / 8) * 2 * cmath.sin(cmath.pi * v)
    for n in range(1, order + 1):
        qn = q**n
        out *= (1 - qn) * (1 - qn * zeta) * (1 - qn / zeta)
    return out


def theta_prime_zero_float(tau: complex, order: int = 60) -> complex:
    """theta'(0, tau) = 2 pi eta^3 computed from the product limit directly."""
    q = cmath.exp(TWO_PI_I * tau)
    out = cmath.exp(TWO_PI_I * tau / 8) * 2 * cmath.pi
    for n in range(1, order + 1):
        out *= (1 - q**n) ** 3
    return out


def theta_S_check(t: complex, tau: complex, tol: float = 1e-8, order: int = 40) -> CheckReport:
    """theta(t/tau, -1/tau) = (1/i) sqrt(tau/i) e^{pi i t^2/tau} theta(t, tau).

    Both sides are evaluated through the exact series at the two arguments;
    sqrt takes the principal branch (Im tau > 0 keeps tau/i in the right
    half-plane, where the branch is continuous).
    """
    from .theta import jacobi_theta

    series = jacobi_theta(Fraction(int(order) * 8 + 1, 8))
    p_lhs = EvalPoint(tau=-1 / tau, t=t / tau)
    p_rhs = EvalPoint(tau=tau, t=t)
    lhs = eval_series(series, p_lhs)
    rhs_val = eval_series(series, p_rhs)
    phase = (1 / 1j) * cmath.sqrt(tau / 1j) * cmath.exp(1j * cmath.pi * t * t / tau)
    rhs = phase * rhs_val.value
    scale = max(abs(lhs.value), abs(rhs), 1e-30)
    rel = abs(lhs.value - rhs) / scale
    passed = rel < tol
    details = [
        f"t = {t}, tau = {tau}",
        f"relative error {rel:.3e} (tol {tol:.1e})",
        f"tail bounds {lhs.tail_bound:.2e} / {rhs_val.tail_bound:.2e}",
    ]
    return CheckReport(f"theta S-transformation at t={t}, tau={tau}", passed, details)


# -- lattice character evaluations ------------------------------------------------


def chi_numeric(
    lattice: EvenLattice, beta, v, tau: complex, bound: int = 30
) -> complex:
    """chi_{K+beta}(v, tau) by direct summation over the ball of norm 2*bound.

    v may be a complex vector (needed at the transformed argument v/tau).
    """
    q_exp = 1j * cmath.pi * tau
    total = 0.0 + 0.0j
    c = lattice.rank
    for gamma in enumerate_coset(lattice, beta, bound):
        w = lattice.gram_apply(gamma)
        pairing = sum(complex(vi) * float(wi) for vi, wi in zip(v, w))
        norm = float(lattice.norm(gamma))
        total += cmath.exp(TWO_PI_I * pairing + q_exp * norm)
    return total / eta_float(tau, 2 * bound + 10) ** c


def trace_numeric(
    lattice: EvenLattice, beta, v, u, tau: complex, bound: int = 30
) -> complex:
    """The two-variable trace at complex insertions, by direct summation:

        e^{pi i (u,v)} eta^{-c} sum_gamma e^{2 pi i (v,gamma)}
            e^{pi i tau (gamma+u, gamma+u)}.
    """
    c = lattice.rank
    uv = sum(
        complex(a) * float(b)
        for a, b in zip(u, lattice.gram_apply(tuple(Fraction(x) for x in v)))
    ) if all(isinstance(x, (int, Fraction)) for x in v) else _complex_pairing(lattice, u, v)
    total = 0.0 + 0.0j
    for gamma in enumerate_coset(lattice, beta, bound):
        shifted = [complex(g) + complex(x) for g, x in zip(gamma, u)]
        norm = _complex_pairing(lattice, shifted, shifted)
        pv = _complex_pairing(lattice, v, gamma)
        total += cmath.exp(TWO_PI_I * pv + 1j * cmath.pi * tau * norm)
    return cmath.exp(1j * cmath.pi * uv) * total / eta_float(tau, 2 * bound + 10) ** c


def _complex_pairing(lattice: EvenLattice, a, b) -> complex:
    total = 0.0 + 0.0j
    for i in range(lattice.rank):
        ai = complex(a[i])
        if not ai:
            continue
        row = lattice.gram[i]
        total += ai * sum(row[j] * complex(b[j]) for j in range(lattice.rank))
    return total


def poisson_s_matrix(lattice: EvenLattice) -> np.ndarray:
    """The Poisson-summation prediction S_{g,h} = |K^o/K|^{-1/2} e^{-2 pi i (b_g, b_h)}."""
    dual = discriminant_group(lattice)
    n = dual.group_order
    scale = 1.0 / math.sqrt(n)
    S = np.zeros((n, n), dtype=complex)
    for g in range(n):
        for h in range(n):
            pairing = lattice.pairing(dual.coset_reps[g], dual.coset_reps[h])
            S[g, h] = scale * cmath.exp(-TWO_PI_I * float(pairing))
    return S


def character_S_matrix(
    lattice: EvenLattice,
    tau: complex = 1.3j,
    tol: float = 1e-6,
    bound: int = 30,
    seed: int = 11,
) -> tuple[np.ndarray, CheckReport]:
    """Recover S from evaluations at sampled v and check it against the oracle.

    Solves chi_g(v/tau, -1/tau) e^{-pi i (v,v)/tau} = sum_h S_{g,h} chi_h(v,tau)
    in the least-squares sense over > |K^o/K| sample vectors; reports the solve
    residual, unitarity defect, and agreement with poisson_s_matrix.
    """
    dual = discriminant_group(lattice)
    n = dual.group_order
    rng = random.Random(seed)
    nsamples = n + 2
    c = lattice.rank
    samples = []
    for _ in range(nsamples):
        samples.append(tuple(rng.uniform(0.05, 0.45) for _ in range(c)))
    A = np.zeros((nsamples, n), dtype=complex)
    for j, v in enumerate(samples):
        for h in range(n):
            A[j, h] = chi_numeric(lattice, dual.coset_reps[h], v, tau, bound)
    tau_p = -1 / tau
    S = np.zeros((n, n), dtype=complex)
    max_resid = 0.0
    for g in range(n):
        b = np.zeros(nsamples, dtype=complex)
        for j, v in enumerate(samples):
            vv = _complex_pairing(lattice, v, v)
            vp = tuple(complex(x) / tau for x in v)
            b[j] = chi_numeric(lattice, dual.coset_reps[g], vp, tau_p, bound) * cmath.exp(
                -1j * cmath.pi * vv / tau
            )
        row, *_ = np.linalg.lstsq(A, b, rcond=None)
        S[g] = row
        max_resid = max(max_resid, float(np.max(np.abs(A @ row - b))))
    oracle = poisson_s_matrix(lattice)
    defect_oracle = float(np.max(np.abs(S - oracle)))
    unitarity = float(np.max(np.abs(S @ S.conj().T - np.eye(n))))
    passed = max_resid < tol and defect_oracle < math.sqrt(tol) and unitarity < tol * 10
    details = [
        f"solve residual {max_resid:.2e}",
        f"|S - Poisson oracle| {defect_oracle:.2e}",
        f"|S S^dag - 1| {unitarity:.2e}",
        f"tolerance {tol:.1e} at ball {bound}",
    ]
    return S, CheckReport(f"character S-matrix, {n} cosets", passed, details)


# -- genus-level numeric checks ------------------------------------------------------


def eval_genus(reduced: QSeries, t: complex, tau: complex) -> EvalResult:
    return eval_series(reduced, EvalPoint(tau=tau, t=t))


def jacobi_form_check(
    genus_by_coset: dict,
    module: int,
    anomaly: int,
    half_dim: int,
    matrix: str,
    lattice: EvenLattice,
    points,
    tol: float = 1e-5,
    bound: int = 30,
) -> CheckReport:
    """F_{M}(A(t,tau)) = e^{pi i l c t^2/(c tau + d)} (c tau + d)^k F_{AM}(t,tau)
    with AM the S- or T-mixed combination of irreducible modules.

    genus_by_coset maps coset index -> reduced genus QSeries (all to the same
    order); matrix is "S" or "T".
    """
    if matrix == "S":
        a, b, cc, dd = 0, -1, 1, 0
        mix, srep = character_S_matrix(lattice, tol=tol, bound=bound)
        mix_rows = mix
    elif matrix == "T":
        a, b, cc, dd = 1, 1, 0, 1
        n = discriminant_group(lattice).group_order
        mix_rows = None
    else:
        raise InputError('matrix must be "S" or "T"')
    problems = []
    details = []
    for t, tau in points:
        tau_new = (a * tau + b) / (cc * tau + dd)
        t_new = t / (cc * tau + dd)
        lhs = eval_genus(genus_by_coset[module], t_new, tau_new).value
        if matrix == "T":
            rhs_val = eval_genus(genus_by_coset[module], t, tau).value
        else:
            rhs_val = 0j
            for h, series in genus_by_coset.items():
                rhs_val += mix_rows[module, h] * eval_genus(series, t, tau).value
        phase = cmath.exp(1j * cmath.pi * anomaly * cc * t * t / (cc * tau + dd))
        rhs = phase * (cc * tau + dd) ** half_dim * rhs_val
        scale = max(abs(lhs), abs(rhs), 1e-30)
        rel = abs(lhs - rhs) / scale
        details.append(f"(t,tau)=({t},{tau}): rel err {rel:.2e}")
        if rel >= tol:
            problems.append(f"(t,tau)=({t},{tau}): {rel:.2e} >= {tol:.1e}")
    name = f"Jacobi-form check A={matrix}, module {module}"
    return CheckReport(name, not problems, details + problems)


def winding_number(f, tau: complex, contour_samples: int = 400, z0: complex = 0.11 + 0.07j):
    """Winding of f(t) along the parallelogram z0 -> z0+2 -> z0+2+2tau -> z0+2tau.

    f is a callable t -> complex (wrap a genus with eval_genus).  The argument
    is tracked continuously; an error is raised if the contour passes too close
    to a zero for the sample density (phase step > pi/2 or |f| below margin).
    """
    corners = [z0, z0 + 2, z0 + 2 + 2 * tau, z0 + 2 * tau, z0]
    values = []
    for c0, c1 in zip(corners, corners[1:]):
        for k in range(contour_samples):
            s = k / contour_samples
            values.append(f(c0 + (c1 - c0) * s))
    values.append(values[0])
    mags = [abs(v) for v in values]
    vmax = max(mags)
    if vmax == 0 or min(mags) < 1e-9 * vmax:
        raise InputError("contour passes near a zero of f (or f is identically zero)")
    total = 0.0
    for v0, v1 in zip(values, values[1:]):
        step = cmath.phase(v1 / v0)
        if abs(step) > cmath.pi / 2:
            raise InputError("phase step too large; refine contour_samples")
        total += step
    w = total / (2 * cmath.pi)
    nearest = round(w)
    if abs(w - nearest) > 0.05:
        raise InputError(f"winding {w:.3f} is not close to an integer")
    return int(nearest)
