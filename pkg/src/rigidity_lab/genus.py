"""The equivariant elliptic genus of a fixed-point model, and its exact checks.

A model is the combinatorial shadow of a circle action: per fixed component,
rotation numbers m_gamma with normal Chern roots, tangent Chern roots, moment
data (T, U~) valued in the Cartan of the lattice vertex algebra, and an
orientation sign.  The genus is assembled pi-free as

    F = sum_components sign * integral[ prod_j (c_j R(y'_j))
          * prod_{gamma,l} R(x_gamma^l + m_gamma t) * chi_M(U + T t, tau) ]

with R(v) = theta'(0)/(2 pi i theta(v)); each q-coefficient is a rational
function of z that must reduce to a Laurent polynomial in z^{1/2} when the
model comes from a genuine manifold (pole cancellation).  The anomaly integer

    l = (T,T) - sum m_gamma^2 d_gamma

controls rigidity: reduced coefficients are z-free constants for l = 0 and
vanish identically for l < 0 on the shipped geometric models.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .characters import _colored_partition_counts, eta_inverse_power
from .errors import InputError, PoleCancellationError
from .lattice import (
    EvenLattice,
    GenusCharacter,
    discriminant_group,
    enumerate_coset,
    load_lattice,
    theta_series,
)
from .laurent import LaurentZ, RationalZ, reduce_rational
from .nilpotent import NilElement, NilModel
from .report import CheckReport
from .series import QSeries, geometric
from .theta import euler_product, tangent_reciprocal, theta_denominator, theta_product_body


@dataclass(frozen=True)
class NormalSummand:
    """A normal-bundle piece: rotation number and its degree-2 Chern roots.

    For isolated points the roots are absent and `dim` carries the complex
    dimension; otherwise dim == len(roots).
    """

    m: int
    dim: int
    roots: tuple = ()  # NilElements, one per complex line; empty for points

    def __post_init__(self):
        if self.m == 0:
            raise InputError("rotation number m must be nonzero")
        if self.dim < 1:
            raise InputError("normal summand needs dim >= 1")
        if self.roots and len(self.roots) != self.dim:
            raise InputError("number of Chern roots disagrees with dim")


@dataclass(frozen=True)
class FixedComponent:
    """One fixed submanifold: cohomology model, tangent/normal data, moments."""

    normals: tuple  # NormalSummand
    t_vec: tuple  # rational vector in the Cartan (lattice-basis coordinates)
    sign: int = 1
    cohomology: NilModel | None = None  # None for isolated points
    tangent_roots: tuple = ()  # NilElements, k_alpha of them
    u_tilde: tuple | None = None  # per-coordinate NilElements (2 pi i absorbed)

    @property
    def k_alpha(self) -> int:
        return len(self.tangent_roots)

    @property
    def half_dim(self) -> int:
        return self.k_alpha + sum(n.dim for n in self.normals)


@dataclass(frozen=True)
class FixedPointModel:
    lattice: EvenLattice
    module: tuple  # ((coset index, weight), ...)
    half_dim: int
    components: tuple
    geometric: bool = True
    name: str | None = None

    def __post_init__(self):
        if not self.components:
            raise InputError("a fixed-point model needs at least one component")
        for i, comp in enumerate(self.components):
            if comp.half_dim != self.half_dim:
                raise InputError(
                    f"component {i}: k_alpha + sum d_gamma = {comp.half_dim}"
                    f" != half_dim {self.half_dim}"
                )
            if len(comp.t_vec) != self.lattice.rank:
                raise InputError(f"component {i}: T has wrong length")


@dataclass
class GenusSeries:
    """F as a q-series of rational functions, with its reduced Laurent form."""

    raw: QSeries  # RationalZ coefficients
    reduced: QSeries | None  # LaurentZ coefficients, present iff reduction succeeded
    window: Fraction
    anomaly: int
    failures: list = field(default_factory=list)  # (exponent, residual) pairs


def _as_module(module, lattice) -> tuple:
    dual = discriminant_group(lattice)
    if isinstance(module, int):
        items = [(module, Fraction(1))]
    elif isinstance(module, dict):
        items = [(int(g), Fraction(w)) for g, w in module.items()]
    else:
        items = [(int(g), Fraction(w)) for g, w in module]
    for g, _ in items:
        if not 0 <= g < dual.group_order:
            raise InputError(f"coset index {g} out of range 0..{dual.group_order - 1}")
    return tuple(items)


# -- anomaly ------------------------------------------------------------------


def anomaly_check(model: FixedPointModel) -> int:
    """Verify the three fixed-point identities per component and return l:

        (T,T) - sum m^2 d = l          (scalar)
        (T, U~) = sum m_gamma x_gamma  (degree 2)
        (U~, U~) = sum y'^2 + sum x^2  (degree 4)

    Raises CheckFailure-flavoured InputError naming the component and line on
    failure; l must agree across components.
    """
    lattice = model.lattice
    l_values = []
    for idx, comp in enumerate(model.components):
        t = tuple(Fraction(x) for x in comp.t_vec)
        tt = lattice.pairing(t, t) if lattice.rank else Fraction(0)
        l_c = tt - sum(n.m * n.m * n.dim for n in comp.normals)
        if l_c.denominator != 1:
            raise InputError(f"component {idx}: (T,T) - sum m^2 d = {l_c} is not an integer")
        l_values.append(int(l_c))
        model_ring = comp.cohomology
        if model_ring is None:
            continue
        zero = model_ring.zero()
        gu = []
        u = comp.u_tilde or tuple(zero for _ in range(lattice.rank))
        # (T, U~) = sum_i T_i (G U~)_i
        lhs2 = zero
        for i in range(lattice.rank):
            if not t[i]:
                continue
            row = lattice.gram[i]
            acc = zero
            for j in range(lattice.rank):
                if row[j] and u[j]:
                    acc = acc + u[j] * Fraction(row[j])
            lhs2 = lhs2 + acc * t[i]
        rhs2 = zero
        for n in comp.normals:
            for root in n.roots:
                rhs2 = rhs2 + root * Fraction(n.m)
        if lhs2 != rhs2:
            raise InputError(f"component {idx}: (T, U) != sum m_gamma x_gamma")
        lhs3 = zero
        for i in range(lattice.rank):
            for j in range(lattice.rank):
                if lattice.gram[i][j] and u[i] and u[j]:
                    lhs3 = lhs3 + (u[i] * u[j]) * Fraction(lattice.gram[i][j])
        rhs3 = zero
        for root in comp.tangent_roots:
            rhs3 = rhs3 + root * root
        for n in comp.normals:
            for root in n.roots:
                rhs3 = rhs3 + root * root
        if lhs3 != rhs3:
            raise InputError(f"component {idx}: (U, U) != sum y'^2 + sum x^2")
    if len(set(l_values)) > 1:
        raise InputError(f"anomaly differs across components: {l_values}")
    return l_values[0] if l_values else 0


# -- local contributions --------------------------------------------------------


def _component_character(comp, model, T, tau_shift_scale: int = 0) -> QSeries:
    """sum_g w_g theta_{K+beta_g}(phase z^{(T,gamma)} exp((U~,gamma))), exact to T."""
    lattice = model.lattice
    char = GenusCharacter(comp.t_vec, comp.u_tilde)
    shift = None
    if tau_shift_scale:
        shift = tuple(Fraction(x) * tau_shift_scale for x in comp.t_vec)
    dual = discriminant_group(lattice)
    total = None
    for g, w in model.module:
        th = theta_series(lattice, dual.coset_reps[g], char, shift, T)
        th = th * w if w != 1 else th
        total = th if total is None else total + th
    return total


def _component_series(comp, model, T):
    """(series, pole) with local = integrate(series * pole^{-1}) per q-order.

    The series collects every pi-free factor with plain Laurent (tensor
    nilpotent) coefficients; the pole is the constant-in-q product of
    zeta^{1/2} - zeta^{-1/2} factors, one per normal line.
    """
    T = Fraction(T)
    lattice = model.lattice
    c = lattice.rank
    series = _component_character(comp, model, T) * eta_inverse_power(c, T)
    pole = None
    n_lines = 0
    for n in comp.normals:
        roots = n.roots if n.roots else (None,) * n.dim
        for root in roots:
            n_lines += 1
            body = theta_product_body(n.m, root, T)
            series = series * body.invert_unital()
            w = Fraction(n.m, 2)
            if root is None or not root:
                line_pole = LaurentZ.monomial(w) - LaurentZ.monomial(-w)
            else:
                half = (root * Fraction(1, 2)).exp()
                line_pole = half * LaurentZ.monomial(w) - half.inverse() * LaurentZ.monomial(-w)
            pole = line_pole if pole is None else pole * line_pole
    c2 = euler_product(T) ** 2
    for _ in range(n_lines):
        series = series * c2
    for root in comp.tangent_roots:
        series = series * tangent_reciprocal(root, T)
    if comp.sign != 1:
        series = series * comp.sign
    return series, pole


def local_contribution(comp, model, T) -> QSeries:
    """The integrand of one component as a QSeries over RationalZ coefficients."""
    series, pole = _component_series(comp, model, T)
    if pole is None:
        return series
    if isinstance(pole, LaurentZ):
        inv = RationalZ(LaurentZ.one(), pole)
    else:
        inv = pole.inverse()
    return series.map_coefficients(lambda x: x * inv)


def _integrate_coefficient(coeff, pole):
    """integral of coeff / pole as a RationalZ (pole may carry nilpotents)."""
    if isinstance(pole, LaurentZ) or pole is None:
        if isinstance(coeff, NilElement):
            coeff = coeff.integrate()
        if pole is None:
            return RationalZ._coerce(coeff)
        return RationalZ(LaurentZ._coerce(coeff), pole)
    # nilpotent pole: fold its inverse in before integrating
    folded = coeff * pole.inverse() if isinstance(coeff, NilElement) else pole.inverse() * coeff
    out = folded.integrate()
    return RationalZ._coerce(out)


def elliptic_genus(model: FixedPointModel, T, strict: bool = True) -> GenusSeries:
    """Sum of integrated local contributions, reduced coefficientwise.

    Every q-coefficient must reduce to a Laurent polynomial in z^{1/2}
    (pole cancellation); a failure means the data does not come from a
    genuine circle-manifold, and is raised (strict) or recorded in
    `failures` (strict=False).
    """
    T = Fraction(T)
    l = anomaly_check(model)
    total: QSeries | None = None
    for comp in model.components:
        series, pole = _component_series(comp, model, T)
        folded = series.map_coefficients(lambda x, _p=pole: _integrate_coefficient(x, _p))
        total = folded if total is None else total + folded
    window = total.cutoff
    reduced_terms = {}
    failures = []
    for e, coeff in total.terms.items():
        res = reduce_rational(coeff)
        if res.ok:
            if res.quotient:
                reduced_terms[e] = res.quotient
        else:
            failures.append((e, res.residual))
    if failures:
        failures.sort()
        if strict:
            raise PoleCancellationError(*failures[0])
        return GenusSeries(total, None, window, l, failures)
    reduced = QSeries(total.denom, window, reduced_terms)
    return GenusSeries(total, reduced, window, l)


# -- checks ----------------------------------------------------------------------


def pole_cancellation_report(model: FixedPointModel, T) -> CheckReport:
    gs = elliptic_genus(model, T, strict=False)
    name = f"pole cancellation to q^{gs.window}"
    if not gs.failures:
        return CheckReport(name, True, [f"{len(gs.raw.terms)} coefficients reduce"])
    details = [
        f"q^{e}: residual denominator {res!r}" for e, res in gs.failures[:4]
    ]
    return CheckReport(name, False, details)


def rigidity_report(gs: GenusSeries) -> CheckReport:
    """Rigidity verdict per q-coefficient: the reduced form must be z-free."""
    if gs.reduced is None:
        return CheckReport("rigidity", False, ["reduction failed; not applicable"])
    offenders = []
    for e, coeff in sorted(gs.reduced.terms.items()):
        val = coeff.constant_value()
        if val is None:
            offenders.append(f"q^{e}: z-dependent coefficient {coeff!r}")
    name = f"rigidity (l = {gs.anomaly}) to q^{gs.window}"
    if offenders:
        return CheckReport(name, False, offenders)
    details = [f"all {len(gs.reduced.terms)} nonzero coefficients are constants"]
    if gs.anomaly < 0:
        vanishes = not gs.reduced.terms
        if not vanishes:
            return CheckReport(name, False, ["l < 0 but the genus does not vanish"])
        details = ["identically zero"]
    return CheckReport(name, True, details)


def shift_law_check(model: FixedPointModel, a_shift: int = 2, T=Fraction(6)) -> CheckReport:
    """F(t + a tau) = q^{-l a^2/2} z^{-l a} F(t), checked per component without
    any series inversion: cross-multiplied as

        theta_char(tau-shifted) * prod Denom == q^{-la^2/2} z^{-la}
            * theta_char * prod Denom(q-offset a m).

    a must be even and a*T must be a lattice vector.
    """
    T = Fraction(T)
    a = int(a_shift)
    if a % 2:
        raise InputError("the shift parameter must be even")
    l = anomaly_check(model)
    if a == 0:
        return CheckReport("shift law a=0", True, ["identity shift"])
    problems = []
    details = []
    for idx, comp in enumerate(model.components):
        at = tuple(Fraction(x) * a for x in comp.t_vec)
        if any(x.denominator != 1 for x in at):
            raise InputError(
                f"component {idx}: a*T = {at} is not a lattice vector; "
                "the shift law needs a*T in K"
            )
        theta_plain = _component_character(comp, model, T)
        theta_shift = _component_character(comp, model, T, tau_shift_scale=a)
        lhs = theta_shift
        rhs = theta_plain
        for n in comp.normals:
            roots = n.roots if n.roots else (None,) * n.dim
            for root in roots:
                lhs = lhs * theta_denominator(n.m, root, T)
                rhs = rhs * theta_denominator(n.m, root, T, q_offset=a * n.m)
        phase = LaurentZ.monomial(Fraction(-l * a))
        rhs = (rhs * phase).shift(Fraction(-l * a * a, 2))
        window = min(lhs.cutoff, rhs.cutoff)
        bad = lhs.first_disagreement(rhs, upto=window)
        details.append(f"component {idx}: window q^{window}")
        if bad is not None:
            problems.append(f"component {idx}: mismatch at q^{bad}")
    name = f"shift law t -> t + {a} tau (l = {l})"
    return CheckReport(name, not problems, details + problems)


def bundle_expansion_oracle(model: FixedPointModel, order) -> QSeries:
    """Independent expansion for isolated-fixed-point models:

    per point, the classical Dirac term 1/prod (z^{m/2} - z^{-m/2})^d, the
    symmetric-power tower expanded as explicit geometric series in z-weights,
    and the module bundle expanded from partition counts and lattice points.
    Must equal elliptic_genus coefficientwise.
    """
    order = Fraction(order)
    lattice = model.lattice
    c = lattice.rank
    dual = discriminant_group(lattice)
    total = None
    for idx, comp in enumerate(model.components):
        if comp.cohomology is not None or comp.tangent_roots:
            raise InputError("the expansion oracle handles isolated fixed points only")
        # classical local Dirac term
        den = None
        for n in comp.normals:
            w = Fraction(n.m, 2)
            line = LaurentZ.monomial(w) - LaurentZ.monomial(-w)
            for _ in range(n.dim):
                den = line if den is None else den * line
        dirac = RationalZ(LaurentZ._coerce(comp.sign), den)
        # Sym_{q^m}(TX - dim X) as geometric series
        sym = QSeries.one(1, order)
        mq = 1
        while mq <= order:
            one_minus = QSeries(1, None, {0: Fraction(1), Fraction(mq): Fraction(-1)})
            for n in comp.normals:
                for _ in range(n.dim):
                    sym = sym * one_minus * one_minus
                    sym = sym * geometric(mq, Fraction(n.m), order)
                    sym = sym * geometric(mq, Fraction(-n.m), order)
            mq += 1
        # module bundle: q^{-c/24} (colored partitions) x (lattice z-weights)
        heis_terms = _colored_partition_counts(c, int(order) + 1)
        heis = QSeries(1, order, {Fraction(n): Fraction(v) for n, v in enumerate(heis_terms)})
        t = tuple(Fraction(x) for x in comp.t_vec)
        lat_terms: dict[Fraction, LaurentZ] = {}
        for g, wgt in model.module:
            beta = dual.coset_reps[g]
            for gamma in enumerate_coset(lattice, beta, order):
                e = lattice.norm(gamma) / 2
                mono = LaurentZ.monomial(lattice.pairing(t, gamma), wgt)
                acc = lat_terms.get(e)
                s = acc + mono if acc is not None else mono
                if s:
                    lat_terms[e] = s
                elif e in lat_terms:
                    del lat_terms[e]
        denom = 1
        for e in lat_terms:
            denom = denom * e.denominator // math.gcd(denom, e.denominator)
        lat_part = QSeries(denom, order, lat_terms)
        psi = (heis * lat_part).shift(Fraction(-c, 24))
        local = (sym * psi) * dirac
        total = local if total is None else local + total
    return total


# -- model files -------------------------------------------------------------------


def _frac(x, where: str) -> Fraction:
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"{where}: {x!r} is not a rational number") from exc


def _parse_component(data: dict, lattice: EvenLattice, where: str) -> FixedComponent:
    kind = data.get("type", "point")
    sign = int(data.get("sign", 1))
    if sign not in (1, -1):
        raise InputError(f"{where}.sign must be +1 or -1")
    t_vec = tuple(_frac(x, f"{where}.T") for x in data.get("T", ()))
    if kind == "point":
        ms = data.get("m", [])
        ds = data.get("d", [1] * len(ms))
        if len(ms) != len(ds):
            raise InputError(f'{where}: "m" and "d" must have equal length')
        normals = tuple(NormalSummand(int(m), int(d)) for m, d in zip(ms, ds))
        return FixedComponent(normals=normals, t_vec=t_vec, sign=sign)
    if kind == "cp1-product":
        chern = data.get("chern", {})
        factors = int(chern.get("factors", 1))
        ring = NilModel((1,) * factors, {(1,) * factors: Fraction(1)})
        degrees = chern.get("tangent_degrees", [2] * factors)
        if len(degrees) != factors:
            raise InputError(f"{where}.chern.tangent_degrees needs {factors} entries")
        tangent = tuple(
            ring.gen(i) * _frac(d, f"{where}.chern.tangent_degrees") for i, d in enumerate(degrees)
        )

        def element(coeffs, label):
            if len(coeffs) != factors:
                raise InputError(f"{label} needs {factors} generator coefficients")
            acc = ring.zero()
            for i, x in enumerate(coeffs):
                acc = acc + ring.gen(i) * _frac(x, label)
            return acc

        normals = []
        for k, n in enumerate(chern.get("normals", [])):
            roots = tuple(
                element(r, f"{where}.chern.normals[{k}].roots") for r in n.get("roots", [])
            )
            normals.append(NormalSummand(int(n["m"]), len(roots), roots))
        u_raw = data.get("U")
        u_tilde = None
        if u_raw is not None:
            u_tilde = tuple(element(row, f"{where}.U") for row in u_raw)
        return FixedComponent(
            normals=tuple(normals),
            t_vec=t_vec,
            sign=sign,
            cohomology=ring,
            tangent_roots=tangent,
            u_tilde=u_tilde,
        )
    raise InputError(f'{where}.type must be "point" or "cp1-product", got {kind!r}')


def load_model(source) -> FixedPointModel:
    """A fixed-point model from JSON:

    {"name": ..., "lattice": {...} | "file.json", "module": g | {"g": weight},
     "half_dim": k, "geometric": true,
     "components": [{"type": "point", "m": [...], "d": [...],
                     "T": ["p/q", ...], "sign": 1},
                    {"type": "cp1-product", "chern": {...}, ...}]}
    """
    if isinstance(source, str):
        try:
            with open(source) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read model file {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(
                f"{source} is not valid JSON: line {exc.lineno}: {exc.msg}"
            ) from exc
    else:
        data = source
    for key in ("lattice", "module", "half_dim", "components"):
        if key not in data:
            raise InputError(f'model file is missing the "{key}" field')
    lattice = load_lattice(data["lattice"])
    module = _as_module(data["module"], lattice)
    comps = tuple(
        _parse_component(c, lattice, f"components[{i}]")
        for i, c in enumerate(data["components"])
    )
    model = FixedPointModel(
        lattice=lattice,
        module=module,
        half_dim=int(data["half_dim"]),
        components=comps,
        geometric=bool(data.get("geometric", True)),
        name=data.get("name"),
    )
    _check_z_grid(model)
    return model


def _check_z_grid(model: FixedPointModel) -> None:
    """Moment pairings must land on the half-integer z-grid."""
    lattice = model.lattice
    dual = discriminant_group(lattice)
    for i, comp in enumerate(model.components):
        t = tuple(Fraction(x) for x in comp.t_vec)
        for j in range(lattice.rank):
            basis = tuple(Fraction(1 if k == j else 0) for k in range(lattice.rank))
            if lattice.pairing(t, basis).denominator > 2:
                raise InputError(
                    f"components[{i}]: (T, basis_{j}) has denominator > 2; "
                    "z-exponents leave the spinor grid"
                )
        for g, _ in model.module:
            if lattice.pairing(t, dual.coset_reps[g]).denominator > 2:
                raise InputError(
                    f"components[{i}]: (T, beta_{g}) has denominator > 2"
                )
