"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Every phase e^{2 pi i r} with r rational is represented canonically as an
element of Q(zeta_N) with N the denominator of r, written in the power basis
1, zeta, ..., zeta^{phi(N)-1} and reduced modulo the N-th cyclotomic
polynomial.  Reduction modulo Phi_N (rather than working in the group algebra
of Q/Z) makes equality decidable: two elements are equal as complex numbers
iff, after promotion to a common conductor, their coefficient vectors agree.

Scalars are `fractions.Fraction` throughout; nothing here is ever floating
point except the explicit `to_complex` evaluation.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .errors import ConductorCapExceeded

Rational = Fraction

#: Conductors above this bound raise ConductorCapExceeded instead of silently
#: churning through enormous fields.  Configurable via set_conductor_cap.
_CONDUCTOR_CAP = 10_000


def set_conductor_cap(cap: int) -> None:
    global _CONDUCTOR_CAP
    if cap < 1:
        raise ValueError("conductor cap must be positive")
    _CONDUCTOR_CAP = cap


def get_conductor_cap() -> int:
    return _CONDUCTOR_CAP


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Exact division of integer polynomials (monic divisor), low-to-high coeffs."""
    num = list(num)
    dden = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    quot = [0] * max(len(num) - dden, 0)
    for i in range(len(num) - 1, dden - 1, -1):
        c = num[i]
        if c == 0:
            continue
        quot[i - dden] = c
        for j, d in enumerate(den):
            num[i - dden + j] -= c * d
    while num and num[-1] == 0:
        num.pop()
    return quot, num


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, low to high; monic of degree phi(n).

    Computed by dividing x^n - 1 by the product of Phi_d over proper
    divisors d of n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return (-1, 1)
    num = [0] * (n + 1)
    num[0], num[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod_int(num, list(cyclotomic_polynomial(d)))
            assert not rem
    return tuple(num)


@lru_cache(maxsize=None)
def _power_vector(n: int, k: int) -> tuple[int, ...]:
    """zeta_n^k written in the power basis of Q(zeta_n), as integers.

    k must already be reduced modulo n.
    """
    phi = euler_phi(n)
    if k < phi:
        vec = [0] * phi
        vec[k] = 1
        return tuple(vec)
    # zeta^k = zeta * zeta^{k-1}, reduced modulo Phi_n.
    prev = _power_vector(n, k - 1)
    shifted = [0] + list(prev[:-1])
    top = prev[-1]
    if top:
        phi_n = cyclotomic_polynomial(n)
        # x^phi = -(c_0 + ... + c_{phi-1} x^{phi-1})
        for i in range(phi):
            shifted[i] -= top * phi_n[i]
    return tuple(shifted)


def _reduce_exponent_vector(n: int, powers: dict[int, Fraction]) -> tuple[Fraction, ...]:
    """Reduce a sparse map exponent -> coefficient to the power basis of Q(zeta_n)."""
    phi = euler_phi(n)
    out = [Fraction(0)] * phi
    for k, c in powers.items():
        if not c:
            continue
        vec = _power_vector(n, k % n)
        for i, v in enumerate(vec):
            if v:
                out[i] += c * v
    return tuple(out)


class CycRat:
    """An element of the cyclotomic field Q(zeta_N) in canonical form.

    `coeffs` has length phi(N) and gives the element in the power basis.
    Instances are immutable; all operations return new values.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != euler_phi(conductor):
            raise ValueError(
                f"need phi({conductor}) = {euler_phi(conductor)} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *a):
        raise AttributeError("CycRat is immutable")

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_rational(x) -> "CycRat":
        return CycRat(1, (Fraction(x),))

    @staticmethod
    def zeta_power(n: int, k: int) -> "CycRat":
        """zeta_n^k in canonical form."""
        if n > _CONDUCTOR_CAP:
            raise ConductorCapExceeded(f"conductor {n} exceeds cap {_CONDUCTOR_CAP}")
        vec = _power_vector(n, k % n)
        return CycRat(n, tuple(Fraction(v) for v in vec))

    # -- conversions -------------------------------------------------------

    def promote(self, m: int) -> "CycRat":
        """Re-express the element in Q(zeta_m); conductor must divide m."""
        n = self.conductor
        if m == n:
            return self
        if m % n != 0:
            raise ValueError(f"conductor {n} does not divide {m}")
        if m > _CONDUCTOR_CAP:
            raise ConductorCapExceeded(f"conductor {m} exceeds cap {_CONDUCTOR_CAP}")
        step = m // n
        powers: dict[int, Fraction] = {}
        for k, c in enumerate(self.coeffs):
            if c:
                powers[k * step] = c
        return CycRat(m, _reduce_exponent_vector(m, powers))

    def as_rational(self) -> Fraction | None:
        """The value as a Fraction if it is rational, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def demote(self) -> "CycRat":
        """Re-express in the smallest cyclotomic subfield that contains the value.

        Optional optimisation; tries each divisor d of the conductor in
        increasing order and solves the linear membership system over Q.
        """
        n = self.conductor
        if n == 1:
            return self
        r = self.as_rational()
        if r is not None:
            return CycRat(1, (r,))
        for d in sorted(k for k in range(2, n) if n % k == 0):
            sol = self._in_subfield(d)
            if sol is not None:
                return CycRat(d, sol)
        return self

    def _in_subfield(self, d: int) -> tuple[Fraction, ...] | None:
        """Solve self = sum_j x_j zeta_d^j over Q, or return None."""
        n = self.conductor
        phi_d = euler_phi(d)
        basis = [CycRat.zeta_power(d, j).promote(n).coeffs for j in range(phi_d)]
        # Gaussian elimination on the phi(n) x phi_d system.
        rows = [list(col) for col in zip(*basis)]  # phi(n) rows, phi_d cols
        rhs = list(self.coeffs)
        ncols = phi_d
        pivots = []
        r = 0
        for c in range(ncols):
            pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if pivot is None:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            rhs[r], rhs[pivot] = rhs[pivot], rhs[r]
            inv = 1 / rows[r][c]
            rows[r] = [v * inv for v in rows[r]]
            rhs[r] *= inv
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
                    rhs[i] -= f * rhs[r]
            pivots.append(c)
            r += 1
        sol = [Fraction(0)] * ncols
        for row_i, c in enumerate(pivots):
            sol[c] = rhs[row_i]
        # consistency: rows beyond rank must have zero rhs
        for i in range(r, len(rows)):
            if rhs[i]:
                return None
        # verify (cheap insurance against rank deficiencies)
        cand = CycRat(d, sol).promote(n)
        return tuple(sol) if cand.coeffs == self.coeffs else None

    def to_complex(self) -> complex:
        n = self.conductor
        return sum(
            float(c) * cmath.exp(2j * cmath.pi * k / n)
            for k, c in enumerate(self.coeffs)
            if c
        ) + 0j

    def to_pairs(self) -> list[tuple[Fraction, Fraction]]:
        """[(k/N, coeff)] pairs meaning sum coeff * e^{2 pi i k/N}."""
        n = self.conductor
        return [(Fraction(k, n), c) for k, c in enumerate(self.coeffs) if c]

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "CycRat":
        if isinstance(x, CycRat):
            return x
        if isinstance(x, (int, Fraction)):
            return CycRat.from_rational(x)
        return NotImplemented

    def _common(self, other: "CycRat") -> tuple["CycRat", "CycRat", int]:
        n, m = self.conductor, other.conductor
        if n == m:
            return self, other, n
        l = n * m // math.gcd(n, m)
        return self.promote(l), other.promote(l), l

    def __add__(self, other):
        other = CycRat._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, n = self._common(other)
        return CycRat(n, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycRat(self.conductor, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = CycRat._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return CycRat(self.conductor, (0,) * len(self.coeffs))
            return CycRat(self.conductor, tuple(c * other for c in self.coeffs))
        if not isinstance(other, CycRat):
            return NotImplemented
        a, b, n = self._common(other)
        prod: dict[int, Fraction] = {}
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if not y:
                    continue
                k = i + j
                prod[k] = prod.get(k, Fraction(0)) + x * y
        return CycRat(n, _reduce_exponent_vector(n, prod))

    __rmul__ = __mul__

    def inverse(self) -> "CycRat":
        """Multiplicative inverse via the extended Euclidean algorithm mod Phi_N."""
        if not self:
            raise ZeroDivisionError("division by zero in Q(zeta_N)")
        r = self.as_rational()
        if r is not None:
            return CycRat(self.conductor, (1 / r,) + (Fraction(0),) * (len(self.coeffs) - 1))
        n = self.conductor
        phi_n = [Fraction(c) for c in cyclotomic_polynomial(n)]
        u = _poly_invmod(list(self.coeffs), phi_n)
        u += [Fraction(0)] * (euler_phi(n) - len(u))
        return CycRat(n, tuple(u[: euler_phi(n)]))

    def __truediv__(self, other):
        other = CycRat._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = CycRat._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycRat.from_rational(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self) -> "CycRat":
        """Complex conjugation, i.e. the automorphism zeta -> zeta^{-1}."""
        n = self.conductor
        powers = {(n - k) % n: c for k, c in enumerate(self.coeffs) if c}
        return CycRat(n, _reduce_exponent_vector(n, powers))

    # -- predicates ---------------------------------------------------------

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not self

    def __eq__(self, other):
        other = CycRat._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # mutable-free but conductor-dependent representation

    def __repr__(self):
        if not self:
            return "CycRat(0)"
        r = self.as_rational()
        if r is not None:
            return f"CycRat({r})"
        terms = "+".join(f"({c})z{self.conductor}^{k}" for k, c in enumerate(self.coeffs) if c)
        return f"CycRat[{terms}]"

    def __str__(self):
        return format_cycrat(self)


def _poly_invmod(a: list[Fraction], mod: list[Fraction]) -> list[Fraction]:
    """Inverse of a modulo mod in Q[x] (mod monic, gcd(a, mod) = 1)."""

    def deg(p):
        for i in range(len(p) - 1, -1, -1):
            if p[i]:
                return i
        return -1

    def pdivmod(num, den):
        num = list(num)
        dd = deg(den)
        lead = den[dd]
        q = [Fraction(0)] * max(deg(num) - dd + 1, 0)
        for i in range(deg(num), dd - 1, -1):
            if not num[i]:
                continue
            c = num[i] / lead
            q[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
        return q, num

    # extended Euclid: keep r0 = mod, r1 = a
    r0, r1 = list(mod), list(a)
    t0, t1 = [Fraction(0)], [Fraction(1)]
    while deg(r1) > 0:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        # t = t0 - q*t1
        prod = [Fraction(0)] * (deg(q) + deg(t1) + 2 if deg(q) >= 0 and deg(t1) >= 0 else 1)
        for i, qc in enumerate(q):
            if not qc:
                continue
            for j, tc in enumerate(t1):
                if tc:
                    prod[i + j] += qc * tc
        newt = [Fraction(0)] * max(len(t0), len(prod))
        for i, c in enumerate(t0):
            newt[i] += c
        for i, c in enumerate(prod):
            newt[i] -= c
        t0, t1 = t1, newt
    d = deg(r1)
    if d < 0:
        raise ZeroDivisionError("element shares a factor with Phi_N")
    c = r1[d]  # constant gcd
    return [t / c for t in t1]


def root_of_unity(r) -> CycRat:
    """The canonical representation of e^{2 pi i r} for rational r.

    The conductor is the denominator of r reduced modulo 1.
    """
    r = Fraction(r) % 1
    return CycRat.zeta_power(r.denominator, r.numerator)


def cyc_add(a, b) -> CycRat:
    return CycRat._coerce(a) + b


def cyc_mul(a, b) -> CycRat:
    return CycRat._coerce(a) * b


def cyc_div(a, b) -> CycRat:
    return CycRat._coerce(a) / b


def conj_scalar(x):
    """Complex conjugation for the scalar types used in this package."""
    if isinstance(x, CycRat):
        return x.conj()
    return x


def to_complex_scalar(x) -> complex:
    if isinstance(x, CycRat):
        return x.to_complex()
    return complex(float(x), 0.0)


def format_cycrat(x: CycRat) -> str:
    """Render as a sum of coeff*e(r) terms with r = k/N, per the CLI format."""
    if not x:
        return "0"
    r = x.as_rational()
    if r is not None:
        return str(r)
    parts = []
    for r_, c in x.to_pairs():
        parts.append(f"({c})e({r_})")
    return "+".join(parts)
