from fractions import Fraction
from importlib import resources

import pytest

from rigidity_lab.errors import InputError, PoleCancellationError
from rigidity_lab.genus import (
    FixedComponent,
    FixedPointModel,
    NormalSummand,
    anomaly_check,
    bundle_expansion_oracle,
    elliptic_genus,
    load_model,
    local_contribution,
    pole_cancellation_report,
    rigidity_report,
    shift_law_check,
)
from rigidity_lab.lattice import EvenLattice
from rigidity_lab.laurent import LaurentZ, RationalZ
from rigidity_lab.nilpotent import NilModel

HALF = Fraction(1, 2)


def model_path(name):
    return str(resources.files("rigidity_lab").joinpath(f"models/{name}.json"))


@pytest.fixture(scope="module")
def s2():
    return load_model(model_path("s2"))


@pytest.fixture(scope="module")
def circle_bundle():
    return load_model(model_path("circle_bundle"))


@pytest.fixture(scope="module")
def nongeometric():
    return load_model(model_path("nongeometric"))


def test_anomaly_s2(s2):
    assert anomaly_check(s2) == -1


def test_anomaly_circle_bundle(circle_bundle):
    assert anomaly_check(circle_bundle) == 0


def test_anomaly_inconsistent_l_rejected(s2, circle_bundle):
    mixed = FixedPointModel(
        lattice=circle_bundle.lattice,
        module=((0, Fraction(1)),),
        half_dim=1,
        components=(circle_bundle.components[0], FixedComponent(
            normals=(NormalSummand(1, 1),), t_vec=(Fraction(0),), sign=1)),
    )
    with pytest.raises(InputError, match="anomaly differs"):
        anomaly_check(mixed)


def test_anomaly_nilpotent_identities():
    # CP^1 with trivial action and U~ = lambda * c: (U,U) = c^2 = 0 = sum y'^2
    ring = NilModel((1,), {(1,): 1})
    lat = EvenLattice([[2]])
    comp = FixedComponent(
        normals=(),
        t_vec=(Fraction(0),),
        cohomology=ring,
        tangent_roots=(ring.gen(0) * 2,),
        u_tilde=(ring.gen(0) * HALF,),
    )
    model = FixedPointModel(lat, ((0, Fraction(1)),), 1, (comp,))
    assert anomaly_check(model) == 0


def test_anomaly_degree2_violation_detected():
    ring = NilModel((1,), {(1,): 1})
    lat = EvenLattice([[2]])
    comp = FixedComponent(
        normals=(NormalSummand(1, 1, (ring.gen(0),)),),
        t_vec=(Fraction(1),),  # (T,T) = 2, l = 1; but (T, U) = 0 != sum m x = g0
        cohomology=ring,
        tangent_roots=(),
        u_tilde=None,
    )
    model = FixedPointModel(lat, ((0, Fraction(1)),), 1, (comp,))
    with pytest.raises(InputError, match=r"\(T, U\)"):
        anomaly_check(model)


def test_local_contribution_q0_is_dirac_term(s2):
    loc = local_contribution(s2.components[0], s2, 4)
    pole = LaurentZ.monomial(HALF) - LaurentZ.monomial(-HALF)
    assert loc.coeff(0) == RationalZ(LaurentZ.one(), pole)


def test_s2_genus_vanishes(s2):
    gs = elliptic_genus(s2, 6)
    assert gs.anomaly == -1
    assert gs.reduced is not None and not gs.reduced.terms
    assert gs.window >= 6
    rep = rigidity_report(gs)
    assert rep.passed


def test_circle_bundle_rigid_constants(circle_bundle):
    gs = elliptic_genus(circle_bundle, 6)
    assert gs.anomaly == 0
    assert gs.reduced is not None
    rep = rigidity_report(gs)
    assert rep.passed, rep.summary()
    # module coset 1 has lowest weight 1/8, central charge 1:
    # F starts at 1/8 - 1/24 = 1/12 with the classical index 1
    assert gs.reduced.coeff(Fraction(1, 12)) == 1


def test_circle_bundle_coset0_vanishes(circle_bundle):
    model = FixedPointModel(
        lattice=circle_bundle.lattice,
        module=((0, Fraction(1)),),
        half_dim=1,
        components=circle_bundle.components,
        geometric=True,
    )
    gs = elliptic_genus(model, 6)
    assert gs.reduced is not None and not gs.reduced.terms
    assert rigidity_report(gs).passed


def test_all_cosets_rigid(circle_bundle):
    for g in range(4):
        model = FixedPointModel(
            lattice=circle_bundle.lattice,
            module=((g, Fraction(1)),),
            half_dim=1,
            components=circle_bundle.components,
        )
        gs = elliptic_genus(model, 5)
        assert rigidity_report(gs).passed, f"coset {g}"


def test_pole_cancellation_negative_control(nongeometric):
    rep = pole_cancellation_report(nongeometric, 4)
    assert not rep.passed
    assert "residual" in rep.details[0]
    with pytest.raises(PoleCancellationError):
        elliptic_genus(nongeometric, 4)


def test_pole_cancellation_geometric_models(s2, circle_bundle):
    assert pole_cancellation_report(s2, 6).passed
    assert pole_cancellation_report(circle_bundle, 6).passed


def test_oracle_equivalence(s2, circle_bundle):
    for model in (s2, circle_bundle):
        gs = elliptic_genus(model, 4)
        oracle = bundle_expansion_oracle(model, 4)
        window = min(gs.window, oracle.cutoff)
        exps = {e for e in list(gs.raw.terms) + list(oracle.terms) if e <= window}
        for e in sorted(exps):
            lhs = gs.raw.terms.get(e, RationalZ(LaurentZ.zero()))
            rhs = oracle.terms.get(e, RationalZ(LaurentZ.zero()))
            assert lhs == rhs, f"{model.name} disagrees at q^{e}"


def test_oracle_q0_classical_lefschetz(circle_bundle):
    oracle = bundle_expansion_oracle(circle_bundle, 2)
    # lowest term: (z^{1/2} - z^{-1/2}) / (z^{1/2} - z^{-1/2}) = 1 at q^{1/8 - 1/24}
    assert oracle.coeff(Fraction(1, 12)) == 1


def test_shift_law_circle_bundle(circle_bundle):
    rep = shift_law_check(circle_bundle, 2, 6)
    assert rep.passed, rep.summary()
    rep_neg = shift_law_check(circle_bundle, -2, 6)
    assert rep_neg.passed, rep_neg.summary()


def test_shift_law_s2_zero_function(s2):
    rep = shift_law_check(s2, 2, 5)
    assert rep.passed


def test_shift_law_odd_shift_rejected(circle_bundle):
    with pytest.raises(InputError):
        shift_law_check(circle_bundle, 1, 4)


def test_z_inversion_symmetry(s2, circle_bundle):
    # both shipped models are symmetric under m -> -m, T -> -T, so F is
    # invariant under z -> 1/z with conjugated coefficients
    for model in (s2, circle_bundle):
        gs = elliptic_genus(model, 5)
        for e, c in gs.reduced.terms.items():
            assert c.conjugate() == c or c.invert_z().conj_scalars() == c


def test_reduced_against_shift_z_route(circle_bundle):
    # shift_z on the reduced series is an independent (window-lossy) route;
    # for a rigid model the coefficients are constants, so it must agree with
    # the exact cross-multiplied check trivially: verify F(z -> q^2 z) == F
    from rigidity_lab.series import shift_z

    gs = elliptic_genus(circle_bundle, 6)
    shifted = shift_z(gs.reduced, 2)
    assert shifted.agrees_with(gs.reduced)


def test_cp1_component_with_twist():
    # X = S^2 with trivial circle action, bundle with moment U~ = (1/2) alpha c:
    # q^0 coefficient of F is the classical index integral over CP^1 of
    # (1 - c^2/24)(sum over lattice points of e^{(U,gamma)} q^{norm/2}) |_{q^0}
    ring = NilModel((1,), {(1,): 1})
    lat = EvenLattice([[2]])
    comp = FixedComponent(
        normals=(),
        t_vec=(Fraction(0),),
        cohomology=ring,
        tangent_roots=(ring.gen(0) * 2,),
        u_tilde=(ring.gen(0) * HALF,),
    )
    model = FixedPointModel(lat, ((0, Fraction(1)),), 1, (comp,))
    gs = elliptic_genus(model, 3)
    # q^0 (at exponent -1/24): gamma = 0 only: integral of 1*(1+0) = 0... the
    # tangent factor contributes integral(c R(c))|_{q^0} = integral(1 - c^2/24) = 0
    assert gs.reduced.terms.get(Fraction(-1, 24), LaurentZ.zero()) == LaurentZ.zero()
    # at q^{1 - 1/24}: gamma = +-alpha enter with e^{(U,gamma)} = 1 +- c,
    # Heisenberg part contributes 1 (c=1 partition of 1), tangent gives
    # integral over CP^1: p(1)*0 + [2 from (1+c)+(1-c) times -c^2/24... ] = 0
    # plus the Sym-side corrections; just check it reduced and is z-free
    assert rigidity_report(gs).passed


def test_model_loader_validation():
    with pytest.raises(InputError, match="missing"):
        load_model({"lattice": {"rank": 0, "gram": []}})
    with pytest.raises(InputError, match="half_dim"):
        load_model(
            {
                "lattice": {"rank": 0, "gram": []},
                "module": 0,
                "half_dim": 2,
                "components": [{"type": "point", "m": [1], "d": [1], "T": []}],
            }
        )
    with pytest.raises(InputError, match="denominator > 2"):
        load_model(
            {
                "lattice": {"rank": 1, "gram": [[2]]},
                "module": 0,
                "half_dim": 1,
                "components": [{"type": "point", "m": [1], "d": [1], "T": ["1/3"]}],
            }
        )


def test_module_combination_is_linear(circle_bundle):
    half_each = FixedPointModel(
        lattice=circle_bundle.lattice,
        module=((1, HALF), (3, HALF)),
        half_dim=1,
        components=circle_bundle.components,
    )
    gs_mix = elliptic_genus(half_each, 4)
    gs1 = elliptic_genus(circle_bundle, 4)
    model3 = FixedPointModel(
        lattice=circle_bundle.lattice,
        module=((3, Fraction(1)),),
        half_dim=1,
        components=circle_bundle.components,
    )
    gs3 = elliptic_genus(model3, 4)
    for e in gs_mix.reduced.terms:
        lhs = gs_mix.reduced.coeff(e)
        rhs = (gs1.reduced.terms.get(e, LaurentZ.zero()) + gs3.reduced.terms.get(e, LaurentZ.zero())) * HALF
        assert lhs == rhs
