"""Dedekind eta, the odd Jacobi theta function, and their exact shift laws.

theta(v, tau) = c(q) q^{1/8} 2 sin(pi v) prod_{n>=1} (1 - q^n zeta)(1 - q^n zeta^{-1})

with zeta = e^{2 pi i v} and c(q) = prod (1 - q^n).  The sine factor is stored
as -i (zeta^{1/2} - zeta^{-1/2}), so theta lives over Laurent polynomials in
zeta^{1/2} with coefficients in Q(zeta_4), and the series has exponents in
Z + 1/8.

All factors of pi are confined to two normalisation facts used by the genus
engine: theta'(0, tau) = 2 pi eta(q)^3, and the reciprocal

    R(v) := theta'(0, tau) / (2 pi i theta(v, tau))
          = 1 / [ (zeta^{1/2} - zeta^{-1/2})
                  prod_{n>=1} (1 - q^n zeta)(1 - q^n zeta^{-1})(1 - q^n)^{-2} ]

which is pi-free, so exact arithmetic never meets a transcendental.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import root_of_unity
from .errors import NonUnitError
from .laurent import LaurentZ, RationalZ
from .nilpotent import NilElement
from .report import CheckReport
from .series import QSeries, shift_z

_EIGHTH = Fraction(1, 8)
_HALF = Fraction(1, 2)


def euler_product(T) -> QSeries:
    """c(q) = prod_{n>=1} (1 - q^n), exact to the cutoff T."""
    T = Fraction(T)
    out = QSeries.one(1, T)
    n = 1
    while n <= T:
        out = out * QSeries(1, T, {0: Fraction(1), n: Fraction(-1)})
        n += 1
    return out


def dedekind_eta(T) -> QSeries:
    """eta(q) = q^{1/24} prod_{p>0} (1 - q^p), with D = 24."""
    T = Fraction(T)
    if T < Fraction(1, 24):
        raise ValueError("cutoff below the leading exponent 1/24")
    return euler_product(T - Fraction(1, 24)).shift(Fraction(1, 24))


def jacobi_theta(T) -> QSeries:
    """The odd theta series over LaurentZ in zeta^{1/2}; D = 8, lowest term q^{1/8}."""
    T = Fraction(T)
    if T < _EIGHTH:
        raise ValueError("cutoff below the leading exponent 1/8")
    body = T - _EIGHTH
    prod = QSeries.one(1, body)
    n = 1
    while n <= body:
        factor = QSeries(
            1,
            body,
            {
                0: LaurentZ.one(),
                Fraction(n): LaurentZ.monomial(1, -1) + LaurentZ.monomial(-1, -1),
                Fraction(2 * n): LaurentZ.one(),
            },
        )
        # (1 - q^n zeta)(1 - q^n zeta^{-1}) expanded
        prod = prod * factor
        n += 1
    prod = prod * euler_product(body)
    sine = LaurentZ.monomial(_HALF, root_of_unity(Fraction(-1, 4))) + LaurentZ.monomial(
        -_HALF, root_of_unity(Fraction(1, 4))
    )
    return (prod * sine).shift(_EIGHTH).with_denom(8)


def theta_sum_oracle(T) -> QSeries:
    """Independent sum-formula path:

        theta = -i sum_{n in Z} (-1)^n q^{(2n+1)^2/8} zeta^{(2n+1)/2}.

    Used to cross-check the product expansion coefficientwise.
    """
    T = Fraction(T)
    minus_i = root_of_unity(Fraction(-1, 4))
    terms: dict[Fraction, LaurentZ] = {}
    n = 0
    while True:
        hit = False
        for m in (2 * n + 1, -(2 * n + 1)):
            e = Fraction(m * m, 8)
            if e <= T:
                hit = True
                sign = -1 if ((m - 1) // 2) % 2 else 1
                mono = LaurentZ.monomial(Fraction(m, 2), minus_i * sign)
                acc = terms.get(e)
                terms[e] = acc + mono if acc is not None else mono
        if not hit:
            break
        n += 1
    return QSeries(8, T, terms)


def theta_prime_zero_over_2pi(T) -> QSeries:
    """theta'(0, tau) / (2 pi) = eta(q)^3, the module's normalisation identity."""
    T = Fraction(T)
    if T < _EIGHTH:
        raise ValueError("cutoff below the leading exponent 1/8")
    return (dedekind_eta(T) ** 3).truncate(T)


def theta_prime_by_differentiation(theta: QSeries) -> QSeries:
    """d theta / dv at v = 0, divided by 2 pi: apply d/dv zeta^k = 2 pi i k zeta^k
    and then set zeta = 1.  Independent of the eta-cube path."""
    i = root_of_unity(Fraction(1, 4))
    terms = {}
    for e, coeff in theta.terms.items():
        total = None
        for k, c in coeff.terms.items():
            p = c * (i * k)
            total = p if total is None else total + p
        if total is not None and total:
            terms[e] = total
    return QSeries(theta.denom, theta.cutoff, terms)


@dataclass
class ReciprocalParts:
    """R(v) as series / den_const, with the constant-in-q pole kept symbolic.

    den_const is None when the pole was absorbed into the series (possible
    whenever the theta argument carries a q-power offset, i.e. after a
    t -> t + a tau shift).
    """

    series: QSeries
    den_const: object  # LaurentZ | NilElement | None

    def folded(self) -> QSeries:
        if self.den_const is None:
            return self.series
        den = self.den_const
        if isinstance(den, LaurentZ):
            inv = RationalZ(LaurentZ.one(), den)
        else:
            inv = den.inverse()
        return self.series.map_coefficients(lambda c: c * inv)


def _nil_exp_half(nil_part, sign: int):
    """exp(sign * x / 2) for a nilpotent class x, or None when x is absent."""
    if nil_part is None or not nil_part:
        return None
    return (nil_part * Fraction(sign, 2)).exp()


def _zeta_halves(z_exp, nil_part):
    """zeta^{1/2} and zeta^{-1/2} as coefficients, for zeta = z^{z_exp} exp(nil)."""
    has_nil = nil_part is not None and bool(nil_part)

    def half(sign):
        mono = LaurentZ.monomial(sign * Fraction(z_exp) / 2)
        ex = _nil_exp_half(nil_part if has_nil else None, sign)
        return mono if ex is None else ex * mono

    return half(+1), half(-1)


def theta_product_body(z_exp, nil_part, T, q_offset: int = 0) -> QSeries:
    """prod_{n>=1} (1 - q^n zeta)(1 - q^n zeta^{-1}) for zeta = q^{q_offset} z^{z_exp} e^x.

    A finite exact product; with q_offset = 0 it is unital.  Nonzero q_offset
    realises the elliptic shift t -> t + a tau of the theta argument and
    introduces nonpositive q-powers; the product is complete to T regardless.
    """
    T = Fraction(T)
    j = int(q_offset)
    cpos, cneg = _zeta_halves(z_exp, nil_part)
    has_nil = nil_part is not None and bool(nil_part)
    one = nil_part.model.one() if has_nil else LaurentZ.one()
    zeta_pos = cpos * cpos
    zeta_neg = cneg * cneg
    N = int(T) + abs(j) + 1
    drift = sum(max(0, abs(j) - n) for n in range(1, N + 1))
    prod = QSeries.one(1, T + drift + 1)
    for n in range(1, N + 1):
        terms: dict[Fraction, object] = {Fraction(0): one}

        def bump(e, val):
            acc = terms.get(e)
            s = acc + val if acc is not None else val
            if s:
                terms[e] = s
            elif e in terms:
                del terms[e]

        bump(Fraction(n + j), -zeta_pos)
        bump(Fraction(n - j), -zeta_neg)
        bump(Fraction(2 * n), one)
        prod = prod * QSeries(1, None, terms)
    return prod


def theta_denominator(z_exp, nil_part, T, q_offset: int = 0) -> QSeries:
    """(zeta^{1/2} - zeta^{-1/2}) prod_{n>=1} (1 - q^n zeta)(1 - q^n zeta^{-1}).

    theta(v) = -i c(q) q^{1/8} theta_denominator(v), so this carries the full
    elliptic-variable structure of theta without any inversion; the genus
    shift checks compare cross-multiplied products of these.
    """
    j = int(q_offset)
    cpos, cneg = _zeta_halves(z_exp, nil_part)
    pole = QSeries(2, None, {Fraction(j, 2): cpos}) + QSeries(
        2, None, {Fraction(-j, 2): -cneg}
    )
    return pole * theta_product_body(z_exp, nil_part, T, q_offset)


def normalized_reciprocal_parts(z_exp, nil_part, T) -> ReciprocalParts:
    """R(v) for zeta = z^{z_exp} exp(nil_part), pole kept symbolic.

    The constant-in-q pole zeta^{1/2} - zeta^{-1/2} is returned in den_const;
    the series part stays over LaurentZ (tensor nilpotent) coefficients, so no
    rational-function arithmetic happens during the power-series inversion.
    """
    T = Fraction(T)
    z_exp = Fraction(z_exp)
    has_nil = nil_part is not None and bool(nil_part)
    if z_exp == 0 and not has_nil:
        raise NonUnitError("theta argument degenerates: genuine pole at zeta = 1")
    cpos, cneg = _zeta_halves(z_exp, nil_part)
    den_const = cpos - cneg
    prod = theta_product_body(z_exp, nil_part, T)
    inv = prod.invert_unital()
    c2 = euler_product(T + 1)
    series = (c2 * c2 * inv).truncate(T)
    return ReciprocalParts(series=series, den_const=den_const)


def normalized_reciprocal(zeta_monomial: LaurentZ, nil_part, T) -> QSeries:
    """Public form of R(v): QSeries over RationalZ (tensor nilpotent) coefficients.

    zeta_monomial must be a unit monomial z^m with coefficient 1 and integer m.
    The tangent case (zeta_monomial == 1) must go through tangent_reciprocal,
    which multiplies by the Chern root first.
    """
    if not zeta_monomial.is_monomial():
        raise ValueError("zeta must be specified as a single monomial")
    ((e, c),) = zeta_monomial.terms.items()
    if c != 1:
        raise ValueError("only phase-free monomials are supported")
    if e.denominator != 1:
        raise ValueError("the rotation weight must be an integer")
    if e == 0 and (nil_part is None or not nil_part):
        raise NonUnitError("zeta = 1 with no nilpotent part: genuine pole")
    if e == 0:
        raise NonUnitError(
            "zeta = 1 with a nilpotent argument: use tangent_reciprocal(c, T)"
        )
    return normalized_reciprocal_parts(e, nil_part, T).folded()


def tangent_reciprocal(c_root: NilElement, T) -> QSeries:
    """The tangent-bundle factor c * R(y) for a nilpotent Chern root c.

    Its q^0 part is c / (e^{c/2} - e^{-c/2}) = 1 - c^2/24 + 7c^4/5760 - ...;
    the c in the numerator cancels the nilpotent pole, so everything stays in
    the nilpotent ring over Q.
    """
    T = Fraction(T)
    model = c_root.model
    # u = (e^{c/2} - e^{-c/2}) / c = sum_{k odd} c^{k-1} / (2^{k-1} k!)
    u = model.one()
    k = 3
    power = c_root * c_root
    while power:
        u = u + power * Fraction(1, 2 ** (k - 1) * math.factorial(k))
        power = power * c_root * c_root
        k += 2
    ex_pos = c_root.exp()
    ex_neg = (-c_root).exp()
    cutoff = T + 1
    prod = QSeries.one(1, cutoff)
    for n in range(1, int(T) + 2):
        prod = prod * QSeries(
            1,
            cutoff,
            {
                0: model.one(),
                Fraction(n): -(ex_pos + ex_neg),
                Fraction(2 * n): model.one(),
            },
        )
    c2 = euler_product(cutoff)
    u_inv = u.inverse()
    return (c2 * c2 * prod.invert_unital()).truncate(T).map_coefficients(lambda x: x * u_inv)


def _theta_internal_order(T) -> QSeries:
    """theta built far enough out that all three shift checks conclude at T."""
    T = Fraction(T)
    Tp = T + 1
    while True:
        th = jacobi_theta(Tp)
        E = max(abs(k) for c in th.terms.values() for k in c.terms)
        if Tp - E >= T:
            return th
        Tp = T + E + 1


def theta_shift_checks(T, corrupt_at=None) -> CheckReport:
    """Exact verification of the elliptic shift laws of theta up to order T:

      (i)   t -> t + 1:    zeta^{1/2} -> -zeta^{1/2} negates theta;
      (ii)  t -> t + tau:  zeta -> q zeta equals -q^{-1/2} zeta^{-1} theta;
      (iii) tau -> tau + 1: multiplying the coefficient at q^e by e^{2 pi i e}
            equals e^{pi i /4} theta (all exponents lie in Z + 1/8).

    corrupt_at deliberately doubles one coefficient first (fault injection).
    """
    T = Fraction(T)
    theta = _theta_internal_order(T)
    if corrupt_at is not None:
        e = Fraction(corrupt_at)
        terms = dict(theta.terms)
        if e not in terms:
            raise ValueError(f"no theta coefficient at q^{e}")
        terms[e] = terms[e] * 2
        theta = QSeries(theta.denom, theta.cutoff, terms)
    E = max(abs(k) for c in theta.terms.values() for k in c.terms)
    details = []
    problems = []

    # (i) zeta^{1/2} -> -zeta^{1/2}
    flipped = theta.map_coefficients(
        lambda c: c.twist(lambda k: -1 if (2 * k) % 2 else 1)
    )
    bad = flipped.first_disagreement(-theta, upto=T)
    details.append(f"(i) t -> t+1 window q^{T}")
    if bad is not None:
        problems.append(f"(i) mismatch at q^{bad}")

    # (ii) zeta -> q zeta vs -q^{-1/2} zeta^{-1} theta
    lhs = shift_z(theta, 1, max_abs_zexp=E)
    rhs = (theta * LaurentZ.monomial(-1, -1)).shift(-_HALF)
    window = min(lhs.cutoff, rhs.cutoff, T)
    bad = lhs.first_disagreement(rhs, upto=window)
    details.append(f"(ii) t -> t+tau window q^{window}")
    if window < T:
        problems.append(f"(ii) reliable window q^{window} below requested q^{T}")
    if bad is not None:
        problems.append(f"(ii) mismatch at q^{bad}")

    # (iii) tau -> tau + 1
    twisted = QSeries(
        theta.denom,
        theta.cutoff,
        {e: c * root_of_unity(e % 1) for e, c in theta.terms.items()},
    )
    rhs3 = theta * root_of_unity(_EIGHTH)
    bad = twisted.first_disagreement(rhs3, upto=T)
    details.append(f"(iii) tau -> tau+1 phase e(1/8), window q^{T}")
    if bad is not None:
        problems.append(f"(iii) mismatch at q^{bad}")

    return CheckReport(
        name=f"theta elliptic shift laws to q^{T}",
        passed=not problems,
        details=details + problems,
    )
