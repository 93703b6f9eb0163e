"""Truncated cohomology rings: nilpotent generators with an integration table.

A model consists of generators g_1..g_s, each with a top power e_i (so
g_i^{e_i + 1} = 0), and a linear integration functional given by its values on
designated top-degree monomials.  This covers points (no generators) and
products of projective lines, which is all the fixed-point geometry the genus
engine consumes.  Element coefficients may be Fraction, CycRat, LaurentZ or
RationalZ; mixed arithmetic coerces through the coefficient dunders.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import NonUnitError


class NilModel:
    """Generator top-powers plus the integration table."""

    __slots__ = ("tops", "weights")

    def __init__(self, tops, weights=None):
        tops = tuple(int(t) for t in tops)
        if any(t < 1 for t in tops):
            raise ValueError("top powers must be >= 1")
        weights = {tuple(int(x) for x in k): Fraction(v) for k, v in (weights or {}).items()}
        for k in weights:
            if len(k) != len(tops) or any(a > t for a, t in zip(k, tops)):
                raise ValueError(f"integration monomial {k} exceeds the top powers")
        object.__setattr__(self, "tops", tops)
        object.__setattr__(self, "weights", weights)

    def __setattr__(self, *a):
        raise AttributeError("NilModel is immutable")

    @property
    def ngens(self) -> int:
        return len(self.tops)

    @staticmethod
    def point() -> "NilModel":
        return NilModel((), {(): Fraction(1)})

    def zero(self) -> "NilElement":
        return NilElement(self, {})

    def one(self) -> "NilElement":
        return NilElement(self, {self.unit_key(): Fraction(1)})

    def unit_key(self) -> tuple[int, ...]:
        return (0,) * len(self.tops)

    def gen(self, i: int, power: int = 1) -> "NilElement":
        key = [0] * len(self.tops)
        key[i] = power
        if power > self.tops[i]:
            return self.zero()
        return NilElement(self, {tuple(key): Fraction(1)})

    def scalar(self, c) -> "NilElement":
        return NilElement(self, {self.unit_key(): c} if c else {})

    def __eq__(self, other):
        return (
            isinstance(other, NilModel)
            and self.tops == other.tops
            and self.weights == other.weights
        )

    __hash__ = None

    def __repr__(self):
        return f"NilModel(tops={self.tops}, weights={self.weights})"


class NilElement:
    """A truncated polynomial in the model's generators."""

    __slots__ = ("model", "terms")

    def __init__(self, model: NilModel, terms):
        data = {}
        for k, c in (terms.items() if isinstance(terms, dict) else terms):
            if not c:
                continue
            k = tuple(k)
            if any(a > t for a, t in zip(k, model.tops)):
                continue  # beyond a top power: the monomial vanishes
            acc = data.get(k)
            c = acc + c if acc is not None else c
            if c:
                data[k] = c
            elif k in data:
                del data[k]
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "terms", data)

    def __setattr__(self, *a):
        raise AttributeError("NilElement is immutable")

    def _coerce(self, x):
        if isinstance(x, NilElement):
            if x.model == self.model:
                return x
            raise ValueError("elements live in different nilpotent models")
        return self.model.scalar(x)

    def constant_term(self):
        return self.terms.get(self.model.unit_key(), Fraction(0))

    def positive_part(self) -> "NilElement":
        unit = self.model.unit_key()
        return NilElement(self.model, {k: c for k, c in self.terms.items() if k != unit})

    def __add__(self, other):
        other = self._coerce(other)
        data = dict(self.terms)
        for k, c in other.terms.items():
            acc = data.get(k)
            s = acc + c if acc is not None else c
            if s:
                data[k] = s
            elif k in data:
                del data[k]
        return NilElement(self.model, data)

    __radd__ = __add__

    def __neg__(self):
        return NilElement(self.model, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other) if not isinstance(other, NilElement) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, NilElement):
            if not other:
                return self.model.zero()
            return NilElement(self.model, {k: c * other for k, c in self.terms.items()})
        if other.model != self.model:
            raise ValueError("elements live in different nilpotent models")
        tops = self.model.tops
        data = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                if any(a > t for a, t in zip(k, tops)):
                    continue
                p = c1 * c2
                acc = data.get(k)
                s = acc + p if acc is not None else p
                if s:
                    data[k] = s
                elif k in data:
                    del data[k]
        return NilElement(self.model, data)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers: use inverse() explicitly")
        result = self.model.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exp(self) -> "NilElement":
        """sum x^k / k!; requires zero constant term, terminates by nilpotency."""
        if self.constant_term():
            raise ValueError("exp needs a zero constant term")
        result = self.model.one()
        power = self.model.one()
        k = 0
        while True:
            k += 1
            power = power * self
            if not power.terms:
                break
            result = result + power * Fraction(1, math.factorial(k))
        return result

    def inverse(self) -> "NilElement":
        """Inverse of a unit: constant term invertible, geometric series on the rest."""
        c0 = self.constant_term()
        if not c0:
            raise NonUnitError("constant term is zero")
        if hasattr(c0, "inverse"):
            c0_inv = c0.inverse()
        else:
            c0_inv = 1 / Fraction(c0)
        # (c0(1 + u))^{-1} = c0^{-1} sum (-u)^k, terminating by nilpotency
        u = self.positive_part() * c0_inv
        result = self.model.one()
        term = self.model.one()
        sign = 1
        while True:
            term = term * u
            if not term.terms:
                break
            sign = -sign
            result = result + term * sign
        return result * c0_inv

    def integrate(self):
        """Apply the integration functional: sum of weights on designated monomials."""
        total = Fraction(0)
        for k, w in self.model.weights.items():
            c = self.terms.get(k)
            if c is not None:
                total = total + c * w
        return total

    def map_coefficients(self, fn) -> "NilElement":
        return NilElement(self.model, {k: fn(c) for k, c in self.terms.items()})

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, NilElement):
            other = self.model.scalar(other)
        return not (self - other)

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "Nil(0)"
        bits = []
        for k in sorted(self.terms):
            mono = "*".join(f"g{i}^{p}" for i, p in enumerate(k) if p) or "1"
            bits.append(f"({self.terms[k]}){mono}")
        return "+".join(bits)


def nilpotent_exp(x: NilElement) -> NilElement:
    return x.exp()


def integrate(x):
    """Integration functional; scalars pass through (point components)."""
    if isinstance(x, NilElement):
        return x.integrate()
    return x
