"""Even positive-definite lattices: validation, dual data, enumeration, theta series.

Vectors are coordinate tuples in the lattice basis; dual vectors are rational
coordinate tuples in the same basis (h lies in the dual lattice iff G h is
integral).  Short-vector enumeration is recursive coordinate bounding from the
rational Cholesky (LDL) factorisation, run in scaled integer arithmetic so the
results are exact and complete by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .cyclotomic import CycRat, root_of_unity
from .errors import InputError
from .laurent import LaurentZ
from .series import QSeries


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class EvenLattice:
    """An even positive-definite lattice given by its Gram matrix."""

    __slots__ = ("rank", "gram", "name")

    def __init__(self, gram, name: str | None = None):
        gram = tuple(tuple(int(x) for x in row) for row in gram)
        rank = len(gram)
        for row in gram:
            if len(row) != rank:
                raise InputError("Gram matrix must be square")
        for i in range(rank):
            for j in range(rank):
                if gram[i][j] != gram[j][i]:
                    raise InputError("Gram matrix must be symmetric")
            if gram[i][i] % 2 != 0:
                raise InputError(f"diagonal entry gram[{i}][{i}] = {gram[i][i]} is odd")
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "name", name)
        d, _ = self._ldl()  # raises if not positive definite

    def __setattr__(self, *a):
        raise AttributeError("EvenLattice is immutable")

    def __eq__(self, other):
        return isinstance(other, EvenLattice) and self.gram == other.gram

    __hash__ = None

    def __repr__(self):
        label = self.name or f"rank{self.rank}"
        return f"EvenLattice({label}, gram={self.gram})"

    # -- linear algebra -----------------------------------------------------

    def _ldl(self):
        """G = L D L^T with L unit lower triangular; pivots must be positive."""
        n = self.rank
        d = [Fraction(0)] * n
        L = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            s = Fraction(self.gram[i][i])
            for k in range(i):
                s -= L[i][k] * L[i][k] * d[k]
            if s <= 0:
                raise InputError("Gram matrix is not positive definite")
            d[i] = s
            L[i][i] = Fraction(1)
            for j in range(i + 1, n):
                t = Fraction(self.gram[j][i])
                for k in range(i):
                    t -= L[j][k] * L[i][k] * d[k]
                L[j][i] = t / d[i]
        return d, L

    def det(self) -> int:
        d, _ = self._ldl()
        out = Fraction(1)
        for x in d:
            out *= x
        assert out.denominator == 1
        return int(out)

    def pairing(self, u, v) -> Fraction:
        """(u, v) = u^T G v for coordinate vectors of rationals."""
        total = Fraction(0)
        for i in range(self.rank):
            if not u[i]:
                continue
            row = self.gram[i]
            total += u[i] * sum(row[j] * v[j] for j in range(self.rank) if v[j])
        return total

    def norm(self, v) -> Fraction:
        return self.pairing(v, v)

    def gram_apply(self, v):
        """G v as a tuple of rationals."""
        return tuple(
            sum(Fraction(self.gram[i][j]) * v[j] for j in range(self.rank))
            for i in range(self.rank)
        )

    def gram_inverse(self):
        """G^{-1} as rows of Fractions (Gauss-Jordan)."""
        n = self.rank
        aug = [
            [Fraction(self.gram[i][j]) for j in range(n)]
            + [Fraction(1 if j == i else 0) for j in range(n)]
            for i in range(n)
        ]
        for col in range(n):
            piv = next(r for r in range(col, n) if aug[r][col])
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = 1 / aug[col][col]
            aug[col] = [x * inv for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        return tuple(tuple(row[n:]) for row in aug)


def validate(gram, name=None) -> EvenLattice:
    """Accept a Gram matrix or reject it with a reason (InputError)."""
    return EvenLattice(gram, name)


def load_lattice(source) -> EvenLattice:
    """Lattice from a JSON dict or file path: {"rank": r, "gram": [[...]], "name": ...}."""
    if isinstance(source, str):
        try:
            with open(source) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read lattice file {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{source} is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    else:
        data = source
    if not isinstance(data, dict) or "gram" not in data:
        raise InputError('lattice JSON needs a "gram" field')
    gram = data["gram"]
    if "rank" in data and len(gram) != data["rank"]:
        raise InputError('"rank" disagrees with the Gram matrix size')
    return EvenLattice(gram, data.get("name"))


# -- Smith normal form -------------------------------------------------------


def smith_normal_form(mat):
    """U A V = D with U, V unimodular and D diagonal with d_1 | d_2 | ...

    Returns (D, U, V) as lists of lists of ints.
    """
    a = [list(map(int, row)) for row in mat]
    n = len(a)
    m = len(a[0]) if n else 0
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        for row in a:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    t = 0
    while t < min(n, m):
        # find the smallest nonzero entry in the remaining block
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        again = False
        for i in range(t + 1, n):
            if a[i][t]:
                add_row(t, i, -(a[i][t] // a[t][t]))
                if a[i][t]:
                    again = True
        for j in range(t + 1, m):
            if a[t][j]:
                add_col(t, j, -(a[t][j] // a[t][t]))
                if a[t][j]:
                    again = True
        if again:
            continue
        # pivot must divide the rest of the block
        div_ok = True
        for i in range(t + 1, n):
            for j in range(t + 1, m):
                if a[i][j] % a[t][t]:
                    add_row(i, t, 1)
                    div_ok = False
                    break
            if not div_ok:
                break
        if div_ok:
            if a[t][t] < 0:
                a[t] = [-x for x in a[t]]
                U[t] = [-x for x in U[t]]
            t += 1
    return a, U, V


@dataclass(frozen=True)
class DualData:
    """Dual-lattice structure: G^{-1}, coset representatives, group order."""

    gram_inverse: tuple
    coset_reps: tuple
    group_order: int
    smith_diagonal: tuple

    def coset_index(self, lattice: EvenLattice, vec) -> int:
        """Index of the coset of `vec` (a dual vector) among the representatives."""
        frac = tuple(Fraction(x) % 1 for x in vec)
        for g, rep in enumerate(self.coset_reps):
            if all((a - b).denominator == 1 for a, b in zip(frac, rep)):
                return g
        raise InputError(f"{vec} does not lie in the dual lattice")


@lru_cache(maxsize=32)
def _discriminant_cached(gram: tuple) -> DualData:
    lattice = EvenLattice(gram)
    n = lattice.rank
    if n == 0:
        return DualData((), ((),), 1, ())
    D, U, V = smith_normal_form(lattice.gram)
    diag = tuple(D[i][i] for i in range(n))
    order = 1
    for d in diag:
        order *= d
    reps = []

    def mixed_radix(idx):
        out = []
        for d in diag:
            out.append(idx % d)
            idx //= d
        return out

    for g in range(order):
        k = mixed_radix(g)
        rep = tuple(
            sum(Fraction(V[i][j] * k[j], diag[j]) for j in range(n)) % 1 for i in range(n)
        )
        reps.append(rep)
    assert len(set(reps)) == order
    return DualData(lattice.gram_inverse(), tuple(reps), order, diag)


def discriminant_group(lattice: EvenLattice) -> DualData:
    """Coset representatives of the dual modulo the lattice, via Smith form.

    Representatives are normalised to the fundamental box (coordinates in
    [0, 1)) so serialisation is canonical; group order equals det(gram).
    """
    data = _discriminant_cached(lattice.gram)
    assert data.group_order == lattice.det()
    return data


# -- enumeration ----------------------------------------------------------------


def _enumerate_core(lattice: EvenLattice, offset, bound, forms, collect_vectors):
    """All x in Z^c with (x+offset, x+offset) <= 2*bound, in exact arithmetic.

    Returns (scale data, buckets or vectors):
      - collect_vectors=False: dict {(scaled_norm, scaled form values): count}
      - collect_vectors=True:  list of (x tuple, scaled_norm, scaled form values)

    Scaled norm means (gamma, gamma) * NORM_SCALE; form value t is
    (f_t, gamma) * form_scale[t].  The recursion carries integer partial sums
    only; nothing is floating point.
    """
    n = lattice.rank
    two_b = 2 * Fraction(bound)
    if n == 0:
        if two_b < 0:
            return (1, (), {} if not collect_vectors else [])
        if collect_vectors:
            return (1, (), [((), 0, ())])
        return (1, (), {(0, ()): 1})
    d, L = lattice._ldl()
    offset = tuple(Fraction(x) for x in offset)
    den = 1
    for x in offset:
        den = _lcm(den, x.denominator)
    lam = 1
    for j in range(n):
        for i in range(j):
            lam = _lcm(lam, L[j][i].denominator)
    DD = 1
    for x in d:
        DD = _lcm(DD, x.denominator)
    A = [int(d[i] * DD) for i in range(n)]  # d_i * DD, integral
    Lint = [[int(L[j][i] * lam) for i in range(n)] for j in range(n)]
    offnum = [int(x * den) for x in offset]
    # scaled center SC_i = lam * Y_i + sum_{j>i} Lint[j][i] * Y_j, Y_j = den*(x_j+off_j)
    # norm * (DD * lam^2 * den^2) = sum A_i * SC_i^2
    norm_scale = DD * lam * lam * den * den
    remtot_frac = two_b * norm_scale
    remtot = int(remtot_frac) if remtot_frac >= 0 else -1
    if remtot_frac < 0:
        return (norm_scale, (), [] if collect_vectors else {})

    wints = []
    wdens = []
    for f in forms:
        w = lattice.gram_apply(tuple(Fraction(x) for x in f))
        wd = 1
        for x in w:
            wd = _lcm(wd, x.denominator)
        wints.append([int(x * wd) for x in w])
        wdens.append(wd * den)  # (f, gamma) = acc / (wd * den)
    nforms = len(forms)

    out_buckets: dict = {}
    out_vectors: list = []
    xs = [0] * n
    ps = [0] * n  # partial center sums
    facc = [0] * nforms

    lam_den = lam * den

    def recurse(level, rem, used):
        # used = sum of A_j SC_j^2 for levels > level
        Ai = A[level]
        b = lam * offnum[level] + ps[level]
        r = isqrt(rem // Ai) if rem >= 0 else -1
        lo = -(r + b)
        x_lo = -((-lo) // lam_den) if lo < 0 else (lo + lam_den - 1) // lam_den
        x_hi = (r - b) // lam_den
        for x in range(x_lo, x_hi + 1):
            y = den * x + offnum[level]
            sc = lam * y + ps[level]
            term = Ai * sc * sc
            if term > rem:
                continue
            xs[level] = x
            if level == 0:
                ns = used + term
                if nforms:
                    key_forms = tuple(
                        facc[t] + wints[t][0] * y for t in range(nforms)
                    )
                else:
                    key_forms = ()
                if collect_vectors:
                    out_vectors.append((tuple(xs), ns, key_forms))
                else:
                    key = (ns, key_forms)
                    out_buckets[key] = out_buckets.get(key, 0) + 1
            else:
                saved_ps = [ps[i] for i in range(level)]
                saved_facc = list(facc)
                for i in range(level):
                    ps[i] += Lint[level][i] * y
                for t in range(nforms):
                    facc[t] += wints[t][level] * y
                recurse(level - 1, rem - term, used + term)
                for i in range(level):
                    ps[i] = saved_ps[i]
                for t in range(nforms):
                    facc[t] = saved_facc[t]

    recurse(n - 1, remtot, 0)
    scales = tuple(wdens)
    if collect_vectors:
        return (norm_scale, scales, out_vectors)
    return (norm_scale, scales, out_buckets)


def enumerate_coset(lattice: EvenLattice, coset_rep, bound):
    """All gamma in K + coset_rep with (gamma, gamma)/2 <= bound, sorted.

    Complete and duplicate-free; empty for negative bounds.
    """
    if lattice.rank == 0:
        return [()] if Fraction(bound) >= 0 else []
    offset = tuple(Fraction(x) for x in coset_rep)
    _, _, rows = _enumerate_core(lattice, offset, bound, (), collect_vectors=True)
    vecs = [tuple(x + o for x, o in zip(xs, offset)) for xs, _, _ in rows]
    vecs.sort()
    return vecs


# -- exponential characters ---------------------------------------------------


class ExpCharacter:
    """gamma -> ring element with phase(g1 + g2) = phase(g1) phase(g2).

    Subclasses declare the linear pairing forms they need; the coefficient is
    then a function of those pairings, which lets the theta sum bucket lattice
    points instead of touching every vector with scalar arithmetic.
    """

    def forms(self, lattice: EvenLattice):
        return ()

    def coefficient(self, values):
        raise NotImplementedError

    def value(self, lattice: EvenLattice, gamma):
        vals = tuple(lattice.pairing(f, gamma) for f in self.forms(lattice))
        return self.coefficient(vals)


class TrivialCharacter(ExpCharacter):
    def coefficient(self, values):
        return Fraction(1)


class VectorCharacter(ExpCharacter):
    """gamma -> e^{2 pi i (h, gamma)} for a rational vector h."""

    def __init__(self, h):
        self.h = tuple(Fraction(x) for x in h)

    def forms(self, lattice):
        return (self.h,)

    def coefficient(self, values):
        return root_of_unity(values[0])


class GenusCharacter(ExpCharacter):
    """gamma -> z^{(T, gamma)} exp((U~, gamma)) for moment data (T, U~).

    T is a rational vector; U~ is an optional per-coordinate list of nilpotent
    degree-2 classes (2 pi i already absorbed).  The z-exponents must land on
    the half-integer grid; coarser denominators are rejected at model load.
    """

    def __init__(self, t_vec, u_tilde=None):
        self.t_vec = tuple(Fraction(x) for x in t_vec)
        self.u_tilde = u_tilde

    def forms(self, lattice):
        basis = []
        if self.u_tilde is not None:
            n = lattice.rank
            for j, u in enumerate(self.u_tilde):
                if u:
                    basis.append(tuple(Fraction(1 if i == j else 0) for i in range(n)))
        return (self.t_vec,) + tuple(basis)

    def coefficient(self, values):
        mono = LaurentZ.monomial(values[0])
        if self.u_tilde is None:
            return mono
        nz = [u for u in self.u_tilde if u]
        if not nz:
            return mono
        acc = None
        for u, v in zip(nz, values[1:]):
            t = u * v
            acc = t if acc is None else acc + t
        return acc.exp() * mono


def theta_series(
    lattice: EvenLattice,
    coset_rep,
    phase: ExpCharacter | None = None,
    tau_shift=None,
    T=Fraction(10),
) -> QSeries:
    """theta_{K+beta}(phase; tau_shift alpha) = sum_gamma phase(gamma) q^{(gamma,gamma)/2 + (alpha,gamma)}.

    With tau_shift = alpha this realises the argument shift h -> h + alpha tau:
    enumeration runs over the shifted ball (gamma+alpha, gamma+alpha)/2 <= T +
    (alpha, alpha)/2, so every reported coefficient is complete.
    """
    T = Fraction(T)
    phase = phase or TrivialCharacter()
    if lattice.rank == 0:
        return QSeries(1, T, {Fraction(0): Fraction(1)})
    beta = tuple(Fraction(x) for x in coset_rep)
    alpha = tuple(Fraction(x) for x in (tau_shift or (0,) * lattice.rank))
    shifted = any(alpha)
    offset = tuple(b + a for b, a in zip(beta, alpha))
    alpha_norm = lattice.norm(alpha) if shifted else Fraction(0)
    bound = T + alpha_norm / 2
    forms = phase.forms(lattice)
    norm_scale, form_scales, buckets = _enumerate_core(
        lattice, offset, bound, forms, collect_vectors=False
    )
    form_off = [lattice.pairing(f, alpha) for f in forms] if shifted else [0] * len(forms)
    terms: dict[Fraction, object] = {}
    denom = 1
    for (ns, fvals), count in buckets.items():
        exponent = Fraction(ns, 2 * norm_scale) - alpha_norm / 2
        if exponent > T:
            continue
        vals = tuple(
            Fraction(v, s) - o for v, s, o in zip(fvals, form_scales, form_off)
        )
        coeff = phase.coefficient(vals) * count
        acc = terms.get(exponent)
        s = acc + coeff if acc is not None else coeff
        if s:
            terms[exponent] = s
        elif exponent in terms:
            del terms[exponent]
        denom = _lcm(denom, exponent.denominator)
    return QSeries(denom, T, terms)
