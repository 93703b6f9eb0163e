"""Sparse truncated series in q with exponents in (1/D)Z.

The cutoff T means "terms with exponent > T are unknown", never "zero".
Every operation computes the correct output window; a cutoff of None means
the series is exact at all orders (finite q-polynomials).  Coefficients may
live in any commutative ring that supports +, *, unary -, and truthiness
for the zero test: Fraction, CycRat, LaurentZ, RationalZ, NilElement.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .cyclotomic import CycRat
from .errors import NonUnitError
from .laurent import LaurentZ, RationalZ

_SCALARS = (int, Fraction, CycRat)


def _invert_coeff(c):
    """Inverse of a coefficient, possibly in a larger ring (LaurentZ -> RationalZ)."""
    if isinstance(c, (int, Fraction)):
        if not c:
            raise ZeroDivisionError("zero coefficient")
        return 1 / Fraction(c)
    if hasattr(c, "inverse"):
        return c.inverse()
    raise NonUnitError(f"cannot invert coefficient of type {type(c).__name__}")


class QSeries:
    """A sparse q-series: denom D, cutoff T, and exponent -> coefficient terms."""

    __slots__ = ("denom", "cutoff", "terms")

    def __init__(self, denom: int = 1, cutoff=None, terms=None):
        denom = int(denom)
        if denom < 1:
            raise ValueError("denom must be a positive integer")
        cutoff = None if cutoff is None else Fraction(cutoff)
        data = {}
        if terms:
            for e, c in (terms.items() if isinstance(terms, dict) else terms):
                if not c:
                    continue
                e = Fraction(e)
                if denom % e.denominator != 0:
                    raise ValueError(f"exponent {e} not on the 1/{denom} grid")
                if cutoff is not None and e > cutoff:
                    continue
                acc = data.get(e)
                c = acc + c if acc is not None else c
                if c:
                    data[e] = c
                elif e in data:
                    del data[e]
        object.__setattr__(self, "denom", denom)
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "terms", data)

    def __setattr__(self, *a):
        raise AttributeError("QSeries is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(denom: int = 1, cutoff=None) -> "QSeries":
        return QSeries(denom, cutoff, {})

    @staticmethod
    def one(denom: int = 1, cutoff=None) -> "QSeries":
        return QSeries(denom, cutoff, {Fraction(0): Fraction(1)})

    @staticmethod
    def monomial(exp, coeff=Fraction(1), cutoff=None) -> "QSeries":
        exp = Fraction(exp)
        return QSeries(exp.denominator, cutoff, {exp: coeff})

    # -- structure -------------------------------------------------------------

    def min_exp(self):
        return min(self.terms) if self.terms else None

    def max_exp(self):
        return max(self.terms) if self.terms else None

    def coeff(self, e):
        e = Fraction(e)
        if self.cutoff is not None and e > self.cutoff:
            raise ValueError(f"exponent {e} is beyond the reliable window {self.cutoff}")
        return self.terms.get(e, 0)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def _lower_bound(self):
        """A bound below which unknown terms cannot occur (min exp, or cutoff if empty)."""
        if self.terms:
            return min(self.terms)
        return self.cutoff if self.cutoff is not None else Fraction(0)

    # -- ring operations --------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, QSeries):
            return x
        if isinstance(x, _SCALARS):
            return QSeries(1, None, {Fraction(0): x})
        return NotImplemented

    def __add__(self, other):
        other = QSeries._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        denom = self.denom * other.denom // math.gcd(self.denom, other.denom)
        cutoffs = [c for c in (self.cutoff, other.cutoff) if c is not None]
        cutoff = min(cutoffs) if cutoffs else None
        data = dict(self.terms)
        for e, c in other.terms.items():
            acc = data.get(e)
            s = acc + c if acc is not None else c
            if s:
                data[e] = s
            elif e in data:
                del data[e]
        return QSeries(denom, cutoff, data)

    __radd__ = __add__

    def __neg__(self):
        out = QSeries(self.denom, self.cutoff)
        object.__setattr__(out, "terms", {e: -c for e, c in self.terms.items()})
        return out

    def __sub__(self, other):
        other = QSeries._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return self._mul_series(other)
        if not other:
            return QSeries(self.denom, self.cutoff, {})
        out = QSeries(self.denom, self.cutoff)
        object.__setattr__(out, "terms", {e: c * other for e, c in self.terms.items()})
        return out

    def __rmul__(self, other):
        return self.__mul__(other)

    def _mul_series(self, other: "QSeries") -> "QSeries":
        denom = self.denom * other.denom // math.gcd(self.denom, other.denom)
        # standard truncation bookkeeping: unknown terms of one factor first
        # pollute the product above cutoff + (minimal exponent of the other)
        windows = []
        if self.cutoff is not None:
            windows.append(self.cutoff + other._lower_bound())
        if other.cutoff is not None:
            windows.append(other.cutoff + self._lower_bound())
        cutoff = min(windows) if windows else None
        data = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if cutoff is not None and e > cutoff:
                    continue
                p = c1 * c2
                if not p:
                    continue
                acc = data.get(e)
                s = acc + p if acc is not None else p
                if s:
                    data[e] = s
                elif e in data:
                    del data[e]
        return QSeries(denom, cutoff, data)

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return self.invert() ** (-n)
        result = QSeries.one(self.denom, None)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- inversion ---------------------------------------------------------------

    def invert(self) -> "QSeries":
        """Multiplicative inverse: self * self.invert() == 1 up to the window.

        The lowest coefficient must be a unit of (an extension of) the
        coefficient ring; for a series known to T with lowest exponent m the
        inverse is reliable to T - 2m.
        """
        if not self.terms:
            raise NonUnitError("cannot invert a series with no known nonzero term")
        m = self.min_exp()
        c0 = self.terms[m]
        u0 = _invert_coeff(c0)
        window = None if self.cutoff is None else self.cutoff - m
        # shifted unital-direction series a_hat = q^{-m} self, lowest exponent 0
        a_hat = {e - m: c for e, c in self.terms.items()}
        a_pos = sorted((e, c) for e, c in a_hat.items() if e > 0)
        if window is None:
            if a_pos:
                raise NonUnitError("cannot invert an untruncated infinite series")
            return QSeries(self.denom, None, {-m: u0})
        b: dict[Fraction, object] = {Fraction(0): u0}
        step = Fraction(1, self.denom)
        n_steps = int(window / step)
        for k in range(1, n_steps + 1):
            e = k * step
            total = None
            for f, c in a_pos:
                if f > e:
                    break
                prev = b.get(e - f)
                if prev is None:
                    continue
                p = c * prev
                total = p if total is None else total + p
            if total is not None and total:
                b[e] = -(u0 * total)
        out_terms = {e - m: c for e, c in b.items() if c}
        return QSeries(self.denom, window - m, out_terms)

    def invert_unital(self) -> "QSeries":
        """Inverse of a series with lowest term 1*q^0; stays in the same ring."""
        if self.terms.get(Fraction(0), 0) != 1:
            raise NonUnitError("invert_unital needs constant term 1")
        if self.cutoff is None:
            if len(self.terms) == 1:
                return QSeries(self.denom, None, {Fraction(0): Fraction(1)})
            raise NonUnitError("cannot invert an untruncated infinite series")
        a_pos = sorted((e, c) for e, c in self.terms.items() if e > 0)
        b: dict[Fraction, object] = {Fraction(0): Fraction(1)}
        step = Fraction(1, self.denom)
        n_steps = int(self.cutoff / step)
        for k in range(1, n_steps + 1):
            e = k * step
            total = None
            for f, c in a_pos:
                if f > e:
                    break
                prev = b.get(e - f)
                if prev is None:
                    continue
                p = c * prev
                total = p if total is None else total + p
            if total is not None and total:
                b[e] = -total
        return QSeries(self.denom, self.cutoff, b)

    # -- reshaping ---------------------------------------------------------------

    def truncate(self, cutoff) -> "QSeries":
        cutoff = Fraction(cutoff)
        if self.cutoff is not None and cutoff > self.cutoff:
            raise ValueError("cannot extend the reliable window by truncating")
        return QSeries(self.denom, cutoff, {e: c for e, c in self.terms.items() if e <= cutoff})

    def shift(self, offset) -> "QSeries":
        """Multiply by q^offset."""
        offset = Fraction(offset)
        denom = self.denom * offset.denominator // math.gcd(self.denom, offset.denominator)
        cutoff = None if self.cutoff is None else self.cutoff + offset
        return QSeries(denom, cutoff, {e + offset: c for e, c in self.terms.items()})

    def map_coefficients(self, fn) -> "QSeries":
        return QSeries(self.denom, self.cutoff, {e: fn(c) for e, c in self.terms.items()})

    def with_denom(self, denom: int) -> "QSeries":
        denom = denom * self.denom // math.gcd(denom, self.denom)
        out = QSeries(denom, self.cutoff)
        object.__setattr__(out, "terms", dict(self.terms))
        return out

    # -- comparisons ---------------------------------------------------------------

    def __eq__(self, other):
        other = QSeries._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(not (c - other.terms[e]) for e, c in self.terms.items())

    __hash__ = None

    def agrees_with(self, other: "QSeries", upto=None) -> bool:
        """Exact agreement of all coefficients with exponent <= upto.

        With upto=None the common reliable window is used.
        """
        windows = [c for c in (self.cutoff, other.cutoff) if c is not None]
        if upto is None:
            if not windows:
                return self == other
            upto = min(windows)
        else:
            upto = Fraction(upto)
            if windows and upto > min(windows):
                raise ValueError(
                    f"comparison to {upto} exceeds the reliable window {min(windows)}"
                )
        exps = {e for e in self.terms if e <= upto} | {e for e in other.terms if e <= upto}
        for e in exps:
            if self.terms.get(e, 0) != other.terms.get(e, 0):
                return False
        return True

    def first_disagreement(self, other: "QSeries", upto=None):
        """The smallest exponent <= upto where the two series differ, or None."""
        windows = [c for c in (self.cutoff, other.cutoff) if c is not None]
        if upto is None:
            upto = min(windows) if windows else max(
                list(self.terms) + list(other.terms) + [Fraction(0)]
            )
        exps = sorted(
            {e for e in self.terms if e <= upto} | {e for e in other.terms if e <= upto}
        )
        for e in exps:
            if self.terms.get(e, 0) != other.terms.get(e, 0):
                return e
        return None

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        head = ", ".join(f"q^{e}: {c!r}" for e, c in self.sorted_terms()[:6])
        more = " ..." if len(self.terms) > 6 else ""
        return f"QSeries(D={self.denom}, T={self.cutoff}, {{{head}{more}}})"


def shift_z(series: QSeries, a_shift: int, max_abs_zexp=None) -> QSeries:
    """The substitution t -> t + a_shift * tau, i.e. z -> q^{a_shift} z.

    Each monomial z^k at q-order e moves to q-order e + a_shift*k.  The
    caller should supply the maximal |z-exponent| occurring up to the cutoff;
    the default uses the observed maximum.  The result is reliable only to
    cutoff - |a_shift| * E.
    """
    a_shift = int(a_shift)
    if a_shift == 0:
        return series
    if max_abs_zexp is None:
        max_abs_zexp = Fraction(0)
        for c in series.terms.values():
            if isinstance(c, LaurentZ) and c.terms:
                m = max(abs(e) for e in c.terms)
                if m > max_abs_zexp:
                    max_abs_zexp = m
    E = Fraction(max_abs_zexp)
    cutoff = None if series.cutoff is None else series.cutoff - abs(a_shift) * E
    data: dict[Fraction, LaurentZ] = {}
    denom = series.denom
    for e, coeff in series.terms.items():
        if not isinstance(coeff, LaurentZ):
            coeff = LaurentZ._coerce(coeff)
            if coeff is NotImplemented:
                raise TypeError("shift_z needs LaurentZ coefficients; reduce first")
        for k, c in coeff.terms.items():
            e2 = e + a_shift * k
            if cutoff is not None and e2 > cutoff:
                continue
            denom = denom * e2.denominator // math.gcd(denom, e2.denominator)
            mono = LaurentZ({k: c})
            acc = data.get(e2)
            data[e2] = acc + mono if acc is not None else mono
    return QSeries(denom, cutoff, {e: c for e, c in data.items() if c})


def geometric(ratio_exp, z_weight, cutoff, denom: int = 1) -> QSeries:
    """sum_k q^{k*ratio_exp} z^{k*z_weight} expanded directly (|q| route).

    An explicit geometric series in z-weights, used by the independent
    bundle-expansion path; never calls invert().
    """
    ratio_exp = Fraction(ratio_exp)
    if ratio_exp <= 0:
        raise ValueError("need a positive q-exponent ratio")
    denom = denom * ratio_exp.denominator // math.gcd(denom, ratio_exp.denominator)
    terms = {}
    k = 0
    while k * ratio_exp <= cutoff:
        terms[k * ratio_exp] = LaurentZ.monomial(z_weight * k) if z_weight else LaurentZ.one()
        k += 1
    return QSeries(denom, Fraction(cutoff), terms)
