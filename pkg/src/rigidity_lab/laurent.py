"""Laurent polynomials and rational functions in the elliptic variable z.

z stands for e^{2 pi i t}; half-integer exponents (spinor weights z^{m/2})
are built in.  Coefficients are exact scalars: int, Fraction or CycRat.
`RationalZ` is the quotient ring needed while summing fixed-point
contributions; `reduce_rational` performs the exact division back to a
Laurent polynomial whenever the poles cancel.
"""

from __future__ import annotations

import cmath
from collections import namedtuple
from fractions import Fraction

from .cyclotomic import CycRat, conj_scalar, to_complex_scalar
from .errors import NonUnitError

_HALF = Fraction(1, 2)


def _as_exp(e) -> Fraction:
    e = Fraction(e)
    if e.denominator not in (1, 2):
        raise ValueError(f"z-exponent {e} has denominator > 2")
    return e


def _scalar_inverse(c):
    if isinstance(c, CycRat):
        return c.inverse()
    return 1 / Fraction(c)


class LaurentZ:
    """A Laurent polynomial in z^{1/2} with exact scalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            for e, c in (terms.items() if isinstance(terms, dict) else terms):
                if not c:
                    continue
                e = _as_exp(e)
                acc = data.get(e)
                c = acc + c if acc is not None else c
                if c:
                    data[e] = c
                elif e in data:
                    del data[e]
        object.__setattr__(self, "terms", data)

    def __setattr__(self, *a):
        raise AttributeError("LaurentZ is immutable")

    # -- construction ------------------------------------------------------

    @staticmethod
    def zero() -> "LaurentZ":
        return LaurentZ()

    @staticmethod
    def one() -> "LaurentZ":
        return LaurentZ({Fraction(0): Fraction(1)})

    @staticmethod
    def monomial(exp, coeff=1) -> "LaurentZ":
        return LaurentZ({_as_exp(exp): coeff if not isinstance(coeff, int) else Fraction(coeff)})

    @staticmethod
    def _coerce(x):
        if isinstance(x, LaurentZ):
            return x
        if isinstance(x, (int, Fraction, CycRat)):
            return LaurentZ({Fraction(0): x}) if x else LaurentZ()
        return NotImplemented

    # -- structure ---------------------------------------------------------

    def min_exp(self) -> Fraction:
        return min(self.terms)

    def max_exp(self) -> Fraction:
        return max(self.terms)

    def coeff(self, e):
        return self.terms.get(_as_exp(e), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {Fraction(0)}

    def constant_value(self):
        """The value if constant in z, else None."""
        if not self.terms:
            return Fraction(0)
        if set(self.terms) == {Fraction(0)}:
            return self.terms[Fraction(0)]
        return None

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = LaurentZ._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        data = dict(self.terms)
        for e, c in other.terms.items():
            acc = data.get(e)
            s = acc + c if acc is not None else c
            if s:
                data[e] = s
            elif e in data:
                del data[e]
        out = LaurentZ()
        object.__setattr__(out, "terms", data)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LaurentZ()
        object.__setattr__(out, "terms", {e: -c for e, c in self.terms.items()})
        return out

    def __sub__(self, other):
        other = LaurentZ._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycRat)):
            if not other:
                return LaurentZ()
            out = LaurentZ()
            object.__setattr__(out, "terms", {e: c * other for e, c in self.terms.items()})
            return out
        if not isinstance(other, LaurentZ):
            return NotImplemented
        data: dict[Fraction, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                p = c1 * c2
                acc = data.get(e)
                s = acc + p if acc is not None else p
                if s:
                    data[e] = s
                elif e in data:
                    del data[e]
        out = LaurentZ()
        object.__setattr__(out, "terms", data)
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse_monomial() ** (-n)
        result = LaurentZ.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse_monomial(self) -> "LaurentZ":
        if not self.is_monomial():
            raise NonUnitError("only monomials are units in the Laurent ring")
        ((e, c),) = self.terms.items()
        return LaurentZ.monomial(-e, _scalar_inverse(c))

    def inverse(self):
        """Inverse as a monomial if possible, otherwise as a RationalZ."""
        if self.is_monomial():
            return self.inverse_monomial()
        return RationalZ(LaurentZ.one(), self)

    # -- substitutions -------------------------------------------------------

    def twist(self, fn) -> "LaurentZ":
        """Multiply the coefficient of z^e by fn(e) for every term."""
        return LaurentZ({e: c * fn(e) for e, c in self.terms.items()})

    def invert_z(self) -> "LaurentZ":
        """The substitution z -> z^{-1}."""
        return LaurentZ({-e: c for e, c in self.terms.items()})

    def conjugate(self) -> "LaurentZ":
        """Complex conjugation for |z| = 1: conjugate scalars and invert z."""
        return LaurentZ({-e: conj_scalar(c) for e, c in self.terms.items()})

    def conj_scalars(self) -> "LaurentZ":
        return LaurentZ({e: conj_scalar(c) for e, c in self.terms.items()})

    def evaluate(self, z: complex) -> complex:
        if not self.terms:
            return 0j
        w = cmath.sqrt(z)  # principal branch for half-integer exponents
        total = 0j
        for e, c in self.terms.items():
            k2 = int(2 * e)
            total += to_complex_scalar(c) * w**k2
        return total

    def evaluate_at_t(self, t: complex) -> complex:
        """Evaluate with z = e^{2 pi i t}; half powers use e^{pi i t} directly."""
        total = 0j
        for e, c in self.terms.items():
            total += to_complex_scalar(c) * cmath.exp(2j * cmath.pi * t * Fraction(e))
        return total

    # -- predicates ----------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        other = LaurentZ._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return not (self - other)

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "LaurentZ(0)"
        bits = []
        for e in sorted(self.terms):
            bits.append(f"({self.terms[e]})z^{e}")
        return "+".join(bits)


ReduceResult = namedtuple("ReduceResult", ["ok", "quotient", "residual"])


def _to_wpoly(p: LaurentZ) -> tuple[list, Fraction]:
    """Write p as (dense coeff list in w = z^{1/2}, exponent shift)."""
    if not p.terms:
        return [], Fraction(0)
    shift = p.min_exp()
    deg = int(2 * (p.max_exp() - shift))
    coeffs = [Fraction(0)] * (deg + 1)
    for e, c in p.terms.items():
        coeffs[int(2 * (e - shift))] = c
    return coeffs, shift


def _from_wpoly(coeffs, shift) -> LaurentZ:
    return LaurentZ({shift + Fraction(i, 2): c for i, c in enumerate(coeffs) if c})


def _wdeg(p) -> int:
    for i in range(len(p) - 1, -1, -1):
        if p[i]:
            return i
    return -1


def _wdivmod(num, den):
    num = list(num)
    dd = _wdeg(den)
    lead_inv = _scalar_inverse(den[dd])
    q = [Fraction(0)] * max(_wdeg(num) - dd + 1, 0)
    for i in range(_wdeg(num), dd - 1, -1):
        if not num[i]:
            continue
        c = num[i] * lead_inv
        q[i - dd] = c
        for j in range(dd + 1):
            if den[j]:
                num[i - dd + j] = num[i - dd + j] - c * den[j]
    while num and not num[-1]:
        num.pop()
    return q, num


def _wgcd(a, b):
    a, b = list(a), list(b)
    while _wdeg(b) >= 0:
        _, r = _wdivmod(a, b)
        a, b = b, r
    d = _wdeg(a)
    if d < 0:
        return a
    inv = _scalar_inverse(a[d])
    return [c * inv for c in a]


class RationalZ:
    """A rational function of z with LaurentZ numerator and denominator.

    The denominator is normalised to have lowest exponent 0 and leading
    coefficient 1.  gcd reduction is not performed eagerly; call
    `reduced()` for the canonical form (equality uses cross-multiplication,
    so unreduced values compare correctly).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = LaurentZ._coerce(num)
        den = LaurentZ.one() if den is None else LaurentZ._coerce(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        # normalise: lowest exponent of den is 0, leading coefficient 1
        shift = den.min_exp()
        if shift:
            den = LaurentZ({e - shift: c for e, c in den.terms.items()})
            num = LaurentZ({e - shift: c for e, c in num.terms.items()})
        lead = den.terms[den.max_exp()]
        if lead != 1:
            inv = _scalar_inverse(lead)
            den = den * inv
            num = num * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RationalZ is immutable")

    @staticmethod
    def _coerce(x):
        if isinstance(x, RationalZ):
            return x
        y = LaurentZ._coerce(x)
        if y is NotImplemented:
            return NotImplemented
        return RationalZ(y)

    def __add__(self, other):
        other = RationalZ._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalZ(self.num + other.num, self.den)
        return RationalZ(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalZ(-self.num, self.den)

    def __sub__(self, other):
        other = RationalZ._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycRat)):
            return RationalZ(self.num * other, self.den)
        if isinstance(other, LaurentZ):
            return RationalZ(self.num * other, self.den)
        if not isinstance(other, RationalZ):
            return NotImplemented
        return RationalZ(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalZ._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("division by zero rational function")
        return RationalZ(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = RationalZ._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def inverse(self):
        return RationalZ(self.den, self.num)

    def __bool__(self):
        return bool(self.num)

    def is_zero(self):
        return not self.num

    def __eq__(self, other):
        other = RationalZ._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return not (self.num * other.den - other.num * self.den)

    __hash__ = None

    def invert_z(self):
        return RationalZ(self.num.invert_z(), self.den.invert_z())

    def conjugate(self):
        return RationalZ(self.num.conjugate(), self.den.conjugate())

    def reduced(self) -> "RationalZ":
        """Canonical form with the gcd removed via Euclidean division."""
        if not self.num:
            return RationalZ(LaurentZ.zero(), LaurentZ.one())
        n, ns = _to_wpoly(self.num)
        d, ds = _to_wpoly(self.den)
        g = _wgcd(n, d)
        if _wdeg(g) > 0:
            n, _ = _wdivmod(n, g)
            d, _ = _wdivmod(d, g)
        return RationalZ(_from_wpoly(n, ns), _from_wpoly(d, ds))

    def evaluate(self, z: complex) -> complex:
        return self.num.evaluate(z) / self.den.evaluate(z)

    def evaluate_at_t(self, t: complex) -> complex:
        return self.num.evaluate_at_t(t) / self.den.evaluate_at_t(t)

    def __repr__(self):
        return f"({self.num!r})/({self.den!r})"


def reduce_rational(f) -> ReduceResult:
    """Divide numerator by denominator over the cyclotomic coefficient field.

    Returns ReduceResult(ok=True, quotient, None) when the denominator divides
    the numerator exactly, and ReduceResult(ok=False, None, residual) with the
    residual denominator factor otherwise.  Failure is an outcome, not an
    exception.
    """
    if isinstance(f, LaurentZ):
        return ReduceResult(True, f, None)
    if not f.num:
        return ReduceResult(True, LaurentZ.zero(), None)
    n, ns = _to_wpoly(f.num)
    d, ds = _to_wpoly(f.den)
    q, r = _wdivmod(n, d)
    if _wdeg(r) < 0:
        return ReduceResult(True, _from_wpoly(q, ns - ds), None)
    g = _wgcd(n, d)
    resid, _ = _wdivmod(d, g) if _wdeg(g) > 0 else (d, None)
    return ReduceResult(False, None, _from_wpoly(resid, Fraction(0)))
