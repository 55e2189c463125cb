"""Homogeneous (space-free) generation map: closed forms, equilibria,
thresholds, Jacobians, and stability verdicts.

The closed-form season flow is checked against an independent fourth-order
Runge-Kutta integration of the governing equations and, for parameter values
admitting elementary antiderivatives, against those antiderivatives.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import (
    flow_integral_lam2_gamma1,
    flow_integral_unit_gamma2,
    logistic_reference,
    season_flow_rk4,
)
from pulsefront.homogeneous import (
    HomogeneousState,
    classify,
    fixed_points,
    iterate_season_map,
    jacobian_at,
    log_mass_Iu,
    logistic_exact,
    season_map,
    stability,
    thresholds,
    v_exact,
    vbar,
    _flow_integral,
)
from pulsefront.savanna import ConfigError, NormalizedParams, load_config, normalize

FOREST_CFG = "demos/configs/forest_invasion.cfg"
GRASSLAND_CFG = "demos/configs/grassland_invasion.cfg"


@pytest.fixture(scope="module")
def forest_norm() -> NormalizedParams:
    return normalize(load_config(FOREST_CFG))


@pytest.fixture(scope="module")
def grassland_norm() -> NormalizedParams:
    return normalize(load_config(GRASSLAND_CFG))


def bare_params(**overrides) -> NormalizedParams:
    """A normalized parameter set detached from any raw configuration."""
    base = dict(
        lam=1.5, gamma=2.0, tau=1.8, eta=0.7, alpha=0.35, p=2.5,
        a_min=0.1, a_max=0.9, d_u=0.001, d_v=0.002,
    )
    base.update(overrides)
    return NormalizedParams(**base)


class TestLogisticClosedForm:
    def test_matches_reference_form(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            u0 = float(rng.uniform(0.0, 1.0))
            t = float(rng.uniform(0.0, 5.0))
            assert logistic_exact(u0, t) == pytest.approx(
                logistic_reference(u0, t), abs=1e-14
            )

    def test_endpoints_are_fixed(self):
        assert logistic_exact(0.0, 3.0) == 0.0
        assert logistic_exact(1.0, 3.0) == 1.0

    def test_zero_time_is_identity(self):
        assert logistic_exact(0.37, 0.0) == pytest.approx(0.37, abs=1e-15)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            logistic_exact(0.5, -0.1)

    def test_log_mass_is_exp_of_integrated_logistic(self):
        # d/dt log I = u(t): check with a fine central difference.
        u0, t, h = 0.42, 1.3, 1e-6
        lhs = (math.log(log_mass_Iu(u0, t + h)) - math.log(log_mass_Iu(u0, t - h))) / (
            2.0 * h
        )
        assert lhs == pytest.approx(logistic_exact(u0, t), abs=1e-8)
        assert log_mass_Iu(u0, 0.0) == 1.0


class TestGrassFlowClosedForm:
    def test_quadrature_against_unit_lam_gamma_two_antiderivative(self):
        for u0 in (0.05, 0.3, 0.8, 1.0):
            for t in (0.2, 1.0, 2.7):
                assert _flow_integral(u0, t, 1.0, 2.0) == pytest.approx(
                    flow_integral_unit_gamma2(u0, t), abs=1e-9
                )

    def test_quadrature_against_lam_two_gamma_one_antiderivative(self):
        for u0 in (0.05, 0.3, 0.8):
            for t in (0.2, 1.0, 2.7):
                assert _flow_integral(u0, t, 2.0, 1.0) == pytest.approx(
                    flow_integral_lam2_gamma1(u0, t), abs=1e-9
                )

    def test_against_runge_kutta_sweep(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            u0 = float(rng.uniform(0.0, 1.0))
            v0 = float(rng.uniform(0.0, 1.0))
            t = float(rng.uniform(0.0, 3.0))
            lam = float(rng.uniform(0.25, 4.0))
            gamma = float(rng.uniform(0.0, 3.0))
            u_ref, v_ref = season_flow_rk4(u0, v0, t, lam, gamma)
            assert logistic_exact(u0, t) == pytest.approx(u_ref, abs=1e-10)
            assert v_exact(v0, u0, t, lam, gamma) == pytest.approx(v_ref, abs=1e-10)

    def test_gamma_zero_reduces_to_logistic_decay(self):
        # With no tree forcing, the deficit y = 1 - v grows logistically at
        # rate lam, independent of the tree trajectory.
        for u0 in (0.0, 0.6):
            v = v_exact(0.25, u0, 1.7, 2.0, 0.0)
            assert v == pytest.approx(1.0 - logistic_exact(0.75, 2.0 * 1.7), abs=1e-12)

    def test_saturated_grass_deficit_is_invariant(self):
        assert v_exact(1.0, 0.5, 2.0, 1.5, 2.0) == 1.0

    def test_zero_time_is_identity(self):
        assert v_exact(0.33, 0.5, 0.0, 1.5, 2.0) == pytest.approx(0.33, abs=1e-15)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            v_exact(0.5, 0.5, -1.0, 1.0, 1.0)


class TestGrasslandLevel:
    def test_closed_form(self, forest_norm):
        p = forest_norm
        expected = p.eta / ((1.0 - p.eta) * math.expm1(p.lam * p.tau))
        assert vbar(p) == pytest.approx(expected, rel=1e-15)

    def test_is_fixed_point_of_season_map(self, forest_norm, grassland_norm):
        for p in (forest_norm, grassland_norm):
            vb = vbar(p)
            u1, v1 = season_map((0.0, vb), p)
            assert u1 == 0.0
            assert v1 == pytest.approx(vb, abs=1e-12)

    def test_raises_when_grassland_absent(self):
        p = bare_params(lam=1.0, tau=0.1, eta=0.5)  # R0 = 0.5 e^0.1 < 1
        with pytest.raises(ConfigError, match="R0"):
            vbar(p)


class TestSeasonMap:
    def test_fixed_points_are_exact(self, forest_norm, grassland_norm):
        for p in (forest_norm, grassland_norm):
            for label, point in fixed_points(p):
                u1, v1 = season_map(point, p)
                assert u1 == pytest.approx(point[0], abs=1e-12), label
                assert v1 == pytest.approx(point[1], abs=1e-12), label

    def test_matches_hand_composed_impulse_and_rk4(self, forest_norm):
        p = forest_norm
        rng = np.random.default_rng(3)
        for _ in range(10):
            u, v = float(rng.uniform(0, 1)), float(rng.uniform(0, 1))
            w = (1.0 - v) ** 2 / ((1.0 - v) ** 2 + p.alpha**2)
            psi = p.a_min + (p.a_max - p.a_min) * math.exp(-p.p * u)
            u0 = (1.0 - w * psi) * u
            v0 = (1.0 - p.eta) * v + p.eta
            u_ref, v_ref = season_flow_rk4(u0, v0, p.tau, p.lam, p.gamma)
            u1, v1 = season_map((u, v), p)
            assert u1 == pytest.approx(u_ref, abs=1e-10)
            assert v1 == pytest.approx(v_ref, abs=1e-10)

    def test_shifted_frame_agrees_with_cooperative(self, forest_norm):
        p = forest_norm
        vb = vbar(p)
        u, v = 0.35, 0.8
        u_c, v_c = season_map((u, v), p)
        u_s, q_s = season_map((u, v - vb), p, frame="shifted")
        assert u_s == pytest.approx(u_c, abs=1e-14)
        assert q_s == pytest.approx(v_c - vb, abs=1e-13)

    def test_rejects_out_of_box_input(self, forest_norm):
        with pytest.raises(ValueError, match="first component"):
            season_map((-0.01, 0.5), forest_norm)
        with pytest.raises(ValueError, match="second component"):
            season_map((0.5, 1.2), forest_norm)

    def test_accepts_slightly_off_box_probes(self, forest_norm):
        season_map((1.0005, 0.5), forest_norm)  # within the documented slack

    def test_rejects_unknown_frame(self, forest_norm):
        with pytest.raises(ValueError, match="frame"):
            season_map((0.5, 0.5), forest_norm, frame="raw")

    def test_iterate_counts_generations(self, forest_norm):
        out = iterate_season_map(HomogeneousState(0.5, 0.5, generation=3), forest_norm, 5)
        assert out.generation == 8

    def test_interior_orbit_reaches_forest_attractor(self, forest_norm):
        out = iterate_season_map(HomogeneousState(0.5, 0.5), forest_norm, 200)
        assert out.u == pytest.approx(1.0, abs=1e-6)
        assert out.v == pytest.approx(1.0, abs=1e-6)

    def test_interior_orbit_reaches_grassland_attractor(self, grassland_norm):
        out = iterate_season_map(HomogeneousState(0.5, 0.5), grassland_norm, 4000)
        assert out.u == pytest.approx(0.0, abs=1e-6)
        assert out.v == pytest.approx(vbar(grassland_norm), abs=1e-6)

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(
        u1=st.floats(0.0, 1.0), v1=st.floats(0.0, 1.0),
        du=st.floats(0.0, 1.0), dv=st.floats(0.0, 1.0),
    )
    def test_order_preservation_and_box_invariance(self, u1, v1, du, dv):
        p = normalize(load_config(FOREST_CFG))
        u2 = min(1.0, u1 + du)
        v2 = min(1.0, v1 + dv)
        lo = season_map((u1, v1), p)
        hi = season_map((u2, v2), p)
        assert lo[0] <= hi[0] + 1e-12
        assert lo[1] <= hi[1] + 1e-12
        for pt in (lo, hi):
            assert -1e-12 <= pt[0] <= 1.0 + 1e-12
            assert -1e-12 <= pt[1] <= 1.0 + 1e-12


class TestThresholds:
    def test_forest_table_values(self, forest_norm):
        R0, R1, R2 = thresholds(forest_norm)
        assert f"{R0:.4f}" == "1.3667"
        assert f"{R1:.4f}" == "0.0058"
        assert f"{R2:.4f}" == "3.3801"

    def test_grassland_table_values(self, grassland_norm):
        R0, R1, R2 = thresholds(grassland_norm)
        assert f"{R0:.4f}" == "2.0425"
        assert f"{R1:.4f}" == "1.2541"
        assert f"{R2:.4f}" == "0.9932"

    def test_grassland_absent_below_unit_R0(self):
        p = bare_params(lam=1.0, tau=0.1, eta=0.5)
        R0, _, R2 = thresholds(p)
        assert R0 < 1.0
        assert R2 == pytest.approx(math.exp(p.tau), rel=1e-15)
        labels = [label for label, _ in fixed_points(p)]
        assert labels == ["extinction", "forest"]
        assert math.isnan(classify(p).grass_level)


class TestJacobians:
    def test_extinction_closed_form(self, forest_norm):
        p = forest_norm
        J, eigs = jacobian_at("extinction", p)
        R0, _, _ = thresholds(p)
        assert J[0, 0] == pytest.approx(math.exp(p.tau), rel=1e-15)
        assert J[1, 1] == pytest.approx(R0, rel=1e-15)
        assert J[0, 1] == 0.0 and J[1, 0] == 0.0
        assert eigs == (J[0, 0], J[1, 1])

    def test_forest_closed_form(self, forest_norm):
        p = forest_norm
        J, _ = jacobian_at("forest", p)
        _, R1, _ = thresholds(p)
        assert J[0, 0] == pytest.approx(math.exp(-p.tau), rel=1e-15)
        assert J[1, 1] == pytest.approx(R1, rel=1e-15)

    def test_grassland_diagonal_closed_form(self, forest_norm):
        p = forest_norm
        J, _ = jacobian_at("grassland", p)
        R0, _, R2 = thresholds(p)
        assert J[0, 0] == pytest.approx(R2, rel=1e-12)
        assert J[1, 1] == pytest.approx(1.0 / R0, rel=1e-12)
        assert J[0, 1] == 0.0

    @pytest.mark.parametrize("label", ["extinction", "forest", "grassland"])
    def test_against_finite_differences_of_the_map(self, forest_norm, label):
        # Independent route: differentiate the full season map numerically
        # in shifted coordinates around each equilibrium.
        p = forest_norm
        vb = vbar(p)
        centers = {
            "extinction": (0.0, 1.0 - vb),
            "forest": (1.0, 1.0 - vb),
            "grassland": (0.0, 0.0),
        }
        u0, q0 = centers[label]
        h = 1e-6

        def map_s(u, q):
            return season_map((u, q), p, frame="shifted")

        J_fd = np.empty((2, 2))
        fu_p, fq_p = map_s(u0 + h, q0)
        fu_m, fq_m = map_s(u0 - h, q0)
        J_fd[0, 0] = (fu_p - fu_m) / (2 * h)
        J_fd[1, 0] = (fq_p - fq_m) / (2 * h)
        fu_p, fq_p = map_s(u0, q0 + h)
        fu_m, fq_m = map_s(u0, q0 - h)
        J_fd[0, 1] = (fu_p - fu_m) / (2 * h)
        J_fd[1, 1] = (fq_p - fq_m) / (2 * h)

        J, _ = jacobian_at(label, p)
        assert np.allclose(J, J_fd, rtol=2e-5, atol=2e-5)

    def test_unknown_label_rejected(self, forest_norm):
        with pytest.raises(ValueError, match="unknown equilibrium"):
            jacobian_at("desert", forest_norm)

    def test_grassland_requires_existence(self):
        p = bare_params(lam=1.0, tau=0.1, eta=0.5)
        with pytest.raises(ConfigError, match="R0"):
            jacobian_at("grassland", p)


class TestStability:
    def test_forest_config_verdicts(self, forest_norm):
        verdicts = {sv.label: sv.verdict for sv in stability(forest_norm)}
        assert verdicts == {
            "extinction": "unstable",
            "forest": "LAS",
            "grassland": "unstable",
        }

    def test_grassland_config_verdicts(self, grassland_norm):
        verdicts = {sv.label: sv.verdict for sv in stability(grassland_norm)}
        assert verdicts == {
            "extinction": "unstable",
            "forest": "unstable",
            "grassland": "LAS",
        }

    def test_eigenvalues_follow_thresholds(self, grassland_norm):
        R0, R1, R2 = thresholds(grassland_norm)
        by_label = {sv.label: sv.eigenvalues for sv in stability(grassland_norm)}
        assert by_label["extinction"][1] == pytest.approx(R0, rel=1e-15)
        assert by_label["forest"][1] == pytest.approx(R1, rel=1e-15)
        assert by_label["grassland"][0] == pytest.approx(R2, rel=1e-12)
        assert by_label["grassland"][1] == pytest.approx(1.0 / R0, rel=1e-12)
