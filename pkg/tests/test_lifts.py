import math
import warnings

import numpy as np
import pytest

from moebius_lab import invariants, jets, lifts, surfaces
from moebius_lab.errors import MathDomainError, RiccatiBlowupError
from moebius_lab.jets import Jet
from moebius_lab.minkowski import inner, norm_hermitian
from tests.conftest import seeded_points

PT_S = 0.25 * (1 / 0.64 - 1 / 0.36)
PT_KK = (1 / 0.64 + 1 / 0.36) / 16.0

MU_CHOICES = {
    "clifford": ["zero", "meromorphic:-3-3i"],
    "product-torus": ["constant", "constant-"],
    "great-sphere": ["zero"],
}


def _mu_specs(chart):
    return [lifts.MuSpec.parse(text) for text in MU_CHOICES[chart.name.split("+")[0]]]


# -- Riccati -----------------------------------------------------------------


def test_constant_solutions_clifford(clifford):
    data = invariants.compute_invariants(clifford, 0.3, 0.7)
    plus, minus = lifts.riccati_constant(data.s)
    assert plus == pytest.approx(0.0, abs=1e-8)
    assert minus == pytest.approx(0.0, abs=1e-8)


def test_constant_solutions_product_torus(product_torus):
    data = invariants.compute_invariants(product_torus, 0.3, 0.7)
    plus, minus = lifts.riccati_constant(data.s)
    ref = math.sqrt(-2.0 * PT_S)
    assert plus == pytest.approx(ref, abs=1e-7)
    assert plus == pytest.approx(0.7795123, abs=1e-6)
    assert minus == pytest.approx(-ref, abs=1e-7)
    for root in (plus, minus):
        assert abs(-0.5 * root * root - data.s.value) < 1e-12


def test_constant_rejects_varying_schwarzian():
    table = np.zeros((6, 6), dtype=complex)
    table[0, 0] = -0.3
    table[1, 0] = 0.05  # nonzero first-order coefficient
    with pytest.raises(MathDomainError):
        lifts.riccati_constant(Jet(table, 2))


def test_holomorphic_integration_matches_meromorphic_family():
    c = 0.5 + 0.25j
    z0, z1 = 2.0 + 0.0j, 3.0 + 1.0j
    sol = lifts.riccati_integrate(lambda z: 0.0, -2.0 / (z0 - c), [z0, z1])
    assert sol[-1] == pytest.approx(-2.0 / (z1 - c), abs=1e-9)


def test_holomorphic_integration_zero_solution():
    sol = lifts.riccati_integrate(lambda z: 0.0, 0.0, [0.0, 1.0 + 1.0j, 2.0])
    assert all(abs(mu) < 1e-14 for mu in sol)


def test_integration_detects_movable_pole():
    c = 0.5 + 0.25j
    z0 = 2.0 + 0.0j
    with pytest.raises(RiccatiBlowupError):
        lifts.riccati_integrate(lambda z: 0.0, -2.0 / (z0 - c), [z0, c])


def test_mu_jet_from_integration_endpoint(product_torus):
    """The jet rebuilt at an output point satisfies the Riccati equation."""
    data = invariants.compute_invariants(product_torus, 0.3, 0.7)
    s0 = data.s.value
    mu0 = complex(np.sqrt(-2.0 * s0))
    end = lifts.riccati_integrate(lambda z: s0, mu0, [0.3 + 0.7j, 0.8 + 0.2j])[-1]
    mu_jet = lifts.mu_jet_from_value(end, data.s)
    theta = jets.d_z(mu_jet) - 0.5 * mu_jet * mu_jet - data.s
    assert abs(theta.value) < 1e-8


def test_mu_jet_nonconstant_solution():
    # s = 0, non-constant branch: mu = -2/(z - c); jet recursion must match
    c = -1.0 - 1.0j
    z = 0.3 + 0.7j
    mu_jet = lifts.mu_jet_from_value(-2.0 / (z - c), Jet.constant(0.0, 2))
    theta = jets.d_z(mu_jet) - 0.5 * mu_jet * mu_jet
    assert abs(theta.value) < 1e-12
    assert abs(theta.coeff(1, 0)) < 1e-12


# -- hat lift ----------------------------------------------------------------


def test_hat_lift_clifford_gives_antipodal_dual(clifford):
    u, v = 0.3, 0.7
    data = invariants.compute_invariants(clifford, u, v)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("zero"))
    assert np.allclose(lift.Yhat.value, data.N.value, atol=1e-12)
    expected = -np.array([math.cos(u), math.sin(u), math.cos(v), math.sin(v)]) / math.sqrt(2)
    assert np.allclose(lift.dual_position.real, expected, atol=1e-10)
    assert not lift.dual_degenerate


def test_hat_lift_great_sphere_degenerate_dual(great_sphere):
    data = invariants.compute_invariants(great_sphere, 0.3, -0.2)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("zero"))
    assert np.allclose(lift.Yhat.value.real, [1.0, 0.0, 0.0, -1.0, 0.0], atol=1e-10)
    assert lift.dual_degenerate


def test_hat_lift_normalization_everywhere(catalog):
    for chart in catalog:
        box = ((0.1, 5.9), (0.1, 5.9)) if chart.periods else ((-0.8, 0.8), (-0.8, 0.8))
        for u, v in seeded_points(5, seed=17, box=box):
            data = invariants.compute_invariants(chart, u, v)
            for spec in _mu_specs(chart):
                lift = lifts.build_lift(data, spec)
                pairing = inner(lift.Yhat, data.Y)
                null = inner(lift.Yhat, lift.Yhat)
                assert pairing.value == pytest.approx(-1.0, abs=1e-10)
                assert abs(null.value) < 1e-10
                # jet coefficients of the constraints vanish too
                assert abs(pairing.coeff(1, 0)) < 1e-9
                assert abs(pairing.coeff(0, 1)) < 1e-9
                assert abs(null.coeff(1, 0)) < 1e-9


# -- theta, rho, L -------------------------------------------------------------


def test_lift_quantities_clifford_zero(clifford):
    data = invariants.compute_invariants(clifford, 0.3, 0.7)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("zero"))
    assert abs(lift.theta.value) < 1e-12
    assert lift.rho.value == pytest.approx(-0.25, abs=1e-12)
    assert norm_hermitian(lift.L.value) < 1e-12
    assert lift.conformal_factor == pytest.approx(-0.5, abs=1e-12)


def test_lift_quantities_clifford_meromorphic(clifford):
    data = invariants.compute_invariants(clifford, 0.3, 0.7)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("meromorphic:-3-3i"))
    mu = lift.mu.value
    assert abs(lift.theta.value) < 1e-12
    assert norm_hermitian(lift.L.value) > 1e-3
    assert lift.LL == pytest.approx(np.conj(mu) ** 2 / 8.0, abs=1e-12)


def test_lift_quantities_product_torus(product_torus):
    data = invariants.compute_invariants(product_torus, 0.3, 0.7)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("constant"))
    assert abs(lift.theta.value) < 1e-12
    assert lift.rho.value == pytest.approx(-2.0 * PT_KK, abs=1e-12)
    assert lift.rho.value == pytest.approx(-0.5425347, abs=1e-6)


def test_wedge_and_algebraic_forms_agree(catalog):
    for chart in catalog:
        box = ((0.1, 5.9), (0.1, 5.9)) if chart.periods else ((-0.8, 0.8), (-0.8, 0.8))
        for u, v in seeded_points(34, seed=5, box=box):
            data = invariants.compute_invariants(chart, u, v)
            for spec in _mu_specs(chart):
                lift = lifts.build_lift(data, spec)
                assert abs(lift.theta.value - lift.theta_wedge) < 1e-9
                assert abs(lift.rho.value - lift.rho_wedge) < 1e-9


def test_explicit_mu_without_riccati(product_torus):
    data = invariants.compute_invariants(product_torus, 0.3, 0.7)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("0.1+0.2i"))
    expected_theta = -0.5 * (0.1 + 0.2j) ** 2 - data.s.value
    assert lift.theta.value == pytest.approx(expected_theta, abs=1e-12)
    flags = lifts.classify(data, lift)
    assert not flags.conformal_lift


# -- isotropy candidates ---------------------------------------------------------


def test_isotropy_clifford_double_root(clifford):
    data = invariants.compute_invariants(clifford, 0.3, 0.7)
    result = lifts.isotropic_mu_candidates(data)
    assert result.status == "quadratic"
    assert len(result.roots) == 2
    for root in result.roots:
        assert abs(root.mu) < 1e-8
        assert abs(root.theta_constant) < 1e-8
        assert root.quadratic_residual < 1e-10
    # the root gives L = 0: the dual surface route
    lift = lifts.build_lift(data, lifts.MuSpec.parse("zero"))
    assert norm_hermitian(lift.L.value) < 1e-10


def test_isotropy_great_sphere_vacuous(great_sphere):
    data = invariants.compute_invariants(great_sphere, 0.1, 0.2)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = lifts.isotropic_mu_candidates(data)
    assert result.status == "degenerate"
    assert len(caught) == 1


def test_isotropy_rank_one_normal_bundle(product_torus):
    """With one normal direction, <L,L> = 0 forces L = 0."""
    data = invariants.compute_invariants(product_torus, 0.3, 0.7)
    result = lifts.isotropic_mu_candidates(data)
    assert result.status == "quadratic"
    for root in result.roots:
        mu_jet = Jet.constant(root.mu, 4)
        lift = lifts.theta_rho_L(data, mu_jet)
        assert abs(lift.LL) < 1e-10
        assert norm_hermitian(lift.L.value) < 1e-5


# -- classification ----------------------------------------------------------------


def test_classify_clifford_zero(clifford):
    data = invariants.compute_invariants(clifford, 0.3, 0.7)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("zero"))
    flags = lifts.classify(data, lift)
    assert flags.willmore and flags.s_willmore
    assert flags.isotropic and flags.s_isotropic
    assert flags.conformal_lift
    assert not flags.umbilic


def test_classify_clifford_meromorphic(clifford):
    data = invariants.compute_invariants(clifford, 0.3, 0.7)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("meromorphic:-3-3i"))
    flags = lifts.classify(data, lift)
    assert flags.willmore and flags.conformal_lift
    assert not flags.isotropic and not flags.s_isotropic


def test_classify_product_torus(product_torus):
    data = invariants.compute_invariants(product_torus, 0.3, 0.7)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("constant"))
    flags = lifts.classify(data, lift)
    assert not flags.willmore
    assert not flags.s_willmore
    assert flags.conformal_lift
    assert flags.diagnostics["willmore_residual_norm"] == pytest.approx(
        0.0791196, abs=1e-6
    )


# -- identities --------------------------------------------------------------------


def test_harmonicity_identity_for_any_riccati_mu(clifford, product_torus):
    cases = [
        (clifford, "zero"),
        (clifford, "meromorphic:-3-3i"),
        (product_torus, "constant"),
        (product_torus, "constant-"),
    ]
    for chart, mu_text in cases:
        for u, v in seeded_points(6, seed=40):
            data = invariants.compute_invariants(chart, u, v)
            lift = lifts.build_lift(data, lifts.MuSpec.parse(mu_text))
            lhs, rhs = lifts.harmonicity_identity(data, lift)
            assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_rho_identity_on_willmore_charts(clifford, great_sphere):
    for chart, mu_text in ((clifford, "zero"), (clifford, "meromorphic:-3-3i"), (great_sphere, "zero")):
        box = ((0.1, 5.9), (0.1, 5.9)) if chart.periods else ((-0.7, 0.7), (-0.7, 0.7))
        for u, v in seeded_points(6, seed=41, box=box):
            data = invariants.compute_invariants(chart, u, v)
            lift = lifts.build_lift(data, lifts.MuSpec.parse(mu_text))
            assert abs(lifts.rho_identity_residual(data, lift)) < 1e-8


def test_rho_identity_fails_off_willmore(product_torus):
    data = invariants.compute_invariants(product_torus, 0.3, 0.7)
    lift = lifts.build_lift(data, lifts.MuSpec.parse("constant"))
    assert abs(lifts.rho_identity_residual(data, lift)) > 1e-3
