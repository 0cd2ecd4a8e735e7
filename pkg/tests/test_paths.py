"""
Tests for boundaries and most probable paths

Validates the Case A exit point, the saddle seed, reverse path integration and
the divergence line integral on the analytic double well.
"""

import dataclasses

import numpy as np
import pytest

from large_deviation_prefactors.fields import AnalyticField
from large_deviation_prefactors.models.run_config import CaseABoundary
from large_deviation_prefactors.paths import (
    CharacteristicBoundary,
    NonCharacteristicBoundary,
    divergence_integral,
    exit_point_on_boundary,
    integrate_mpp,
    line_boundary,
    saddle_seed,
    summarize_path,
    with_divergence,
    write_path_csv,
)
from large_deviation_prefactors.systems import make_doublewell
from large_deviation_prefactors.utils.errors import AssumptionViolation, UsageError
from large_deviation_prefactors.utils.io_utils import read_csv

X_BAR = np.array([-1.0, 0.0])


@pytest.fixture(scope="module")
def field():
    return AnalyticField(make_doublewell())


@pytest.fixture(scope="module")
def case_a_path(field):
    start = exit_point_on_boundary(field, line_boundary(CaseABoundary())).point
    return integrate_mpp(field, start, X_BAR, delta2=0.01, sigma_step=1e-3, max_length=10.0)


@pytest.fixture(scope="module")
def case_b_path(field):
    start, _ = saddle_seed(field.system, field.system.fixed_point("US"), 0.05, X_BAR)
    return integrate_mpp(field, start, X_BAR, delta2=0.01, sigma_step=1e-3, max_length=10.0)


class TestBoundaries:
    """Test boundary construction."""

    def test_line_boundary_points(self):
        """Test the default Case A line x1 = -0.5."""
        boundary = line_boundary(CaseABoundary())
        np.testing.assert_allclose(boundary.point(0.3), [-0.5, 0.3])
        np.testing.assert_allclose(boundary.unit_normal(np.zeros(2)), [1.0, 0.0])

    def test_non_unit_normal_rejected(self):
        """Test a normal of length 2."""
        with pytest.raises(UsageError):
            line_boundary(CaseABoundary(normal=[2.0, 0.0]))

    def test_normal_along_line_rejected(self):
        """Test a normal parallel to the line."""
        with pytest.raises(UsageError):
            line_boundary(CaseABoundary(normal=[0.0, 1.0]))

    def test_empty_interval(self):
        """Test s_max <= s_min."""
        with pytest.raises(UsageError):
            NonCharacteristicBoundary(
                curve=lambda s: s[:, None], normal=lambda y: y, s_min=1.0, s_max=1.0
            )

    def test_characteristic_boundary_needs_saddle(self, field):
        """Test a stable point cannot carry a characteristic boundary."""
        CharacteristicBoundary(field.system.fixed_point("US"))
        with pytest.raises(AssumptionViolation):
            CharacteristicBoundary(field.system.fixed_point("SN1"))


class TestExitPoint:
    """Test the minimisation of V along the boundary."""

    def test_case_a_exit_point(self, field):
        """Test x* = (-0.5, 0) with V* = 0.28125."""
        result = exit_point_on_boundary(field, line_boundary(CaseABoundary()))
        np.testing.assert_allclose(result.point, [-0.5, 0.0], atol=1e-6)
        assert result.value == pytest.approx(0.28125, abs=1e-10)
        assert result.warnings == []

    def test_endpoint_minimum_warns(self, field):
        """Test a minimum at the interval end is flagged."""
        boundary = line_boundary(CaseABoundary(s_min=0.2, s_max=0.8))
        result = exit_point_on_boundary(field, boundary)
        np.testing.assert_allclose(result.point, [-0.5, 0.2], atol=1e-6)
        assert any("endpoint" in w for w in result.warnings)


class TestSaddleSeed:
    """Test the Case B start point."""

    def test_seed_points_toward_stable_point(self, field):
        """Test x_sad + delta1 * e_u lands at (-0.05, 0)."""
        seed, warnings = saddle_seed(field.system, field.system.fixed_point("US"), 0.05, X_BAR)
        np.testing.assert_allclose(seed, [-0.05, 0.0], atol=1e-12)
        assert warnings == []

    def test_zero_offset_warns(self, field):
        """Test delta1 = 0 starts on the saddle."""
        seed, warnings = saddle_seed(field.system, field.system.fixed_point("US"), 0.0, X_BAR)
        np.testing.assert_array_equal(seed, [0.0, 0.0])
        assert warnings


class TestIntegrateMpp:
    """Test reverse path integration."""

    def test_case_a_path_converges(self, case_a_path):
        """Test the path ends in the delta2 ball and starts at x*."""
        assert case_a_path.status == "converged"
        assert np.linalg.norm(case_a_path.points[0] - X_BAR) <= 0.01
        np.testing.assert_allclose(case_a_path.points[-1], [-0.5, 0.0], atol=1e-6)

    def test_node_spacing_matches_step(self, case_a_path):
        """Test consecutive nodes are one arc-length step apart."""
        spacing = np.linalg.norm(np.diff(case_a_path.points, axis=0), axis=1)
        np.testing.assert_allclose(spacing, 1e-3, rtol=0.01)
        np.testing.assert_allclose(np.diff(case_a_path.sigma), 1e-3)

    def test_unit_speed_on_exact_field(self, case_a_path):
        """Test |G| / |b| stays at 1 for an orthogonal decomposition."""
        assert np.all(case_a_path.speed_ratio >= 0.98)
        assert np.all(case_a_path.speed_ratio <= 1.02)

    def test_case_b_path_leaves_saddle_upward(self, case_b_path):
        """Test the path reaches the saddle seed from the x2 > 0 side."""
        assert case_b_path.status == "converged"
        np.testing.assert_allclose(case_b_path.points[-1], [-0.05, 0.0])
        assert case_b_path.points[-2][1] > 0.0

    def test_halving_step_shrinks_error_sixteenfold(self, field):
        """Test fourth-order convergence of the node reached after arc length 0.3."""

        def node_at(step: float) -> np.ndarray:
            path = integrate_mpp(field, [-0.5, 0.0], X_BAR, 0.01, step, 0.35)
            return path.points[-1 - round(0.3 / step)]

        reference = node_at(0.0025)
        coarse = np.linalg.norm(node_at(0.02) - reference)
        fine = np.linalg.norm(node_at(0.01) - reference)
        assert 10.0 < coarse / fine < 22.0

    def test_start_inside_ball(self, field):
        """Test x* within delta2 of x_bar gives a one-node path."""
        path = integrate_mpp(field, [-0.995, 0.0], X_BAR, 0.01, 1e-3, 10.0)
        assert path.status == "converged"
        assert path.n_nodes == 1
        assert path.length == 0.0

    def test_start_at_x_bar_rejected(self, field):
        """Test x* equal to x_bar."""
        with pytest.raises(UsageError):
            integrate_mpp(field, X_BAR, X_BAR, 0.01, 1e-3, 10.0)

    def test_stall_at_saddle(self, field):
        """Test starting on a fixed point stops with status stalled."""
        path = integrate_mpp(field, [0.0, 0.0], X_BAR, 0.01, 1e-3, 10.0)
        assert path.status == "stalled"
        np.testing.assert_array_equal(path.stall_location, [0.0, 0.0])
        assert "registered fixed point" in path.warnings[0]

    def test_length_cap(self, field):
        """Test a short arc-length cap stops with status max_length."""
        path = integrate_mpp(field, [-0.05, 0.0], X_BAR, 0.01, 1e-3, 0.05)
        assert path.status == "max_length"
        assert path.warnings


class TestDivergenceIntegral:
    """Test the line integral of div l / |b|."""

    def test_case_a_integral_is_negative(self, field, case_a_path):
        """Test div l = -3 x2 and the path bulges into x2 > 0."""
        value = divergence_integral(field, case_a_path)
        assert value < 0.0
        assert with_divergence(field, case_a_path).div_integral == value

    def test_gradient_system_integral_vanishes(self):
        """Test beta = 0 has div l = 0."""
        grad_field = AnalyticField(make_doublewell(beta=0.0))
        path = integrate_mpp(grad_field, [-0.5, 0.0], X_BAR, 0.01, 1e-3, 10.0)
        assert path.status == "converged"
        assert divergence_integral(grad_field, path) == 0.0

    def test_additive_over_subpaths(self, field, case_a_path):
        """Test splitting the path at a node adds up without baselines."""
        k = case_a_path.n_nodes // 3
        head = dataclasses.replace(
            case_a_path, points=case_a_path.points[: k + 1], sigma=case_a_path.sigma[: k + 1]
        )
        tail = dataclasses.replace(
            case_a_path, points=case_a_path.points[k:], sigma=case_a_path.sigma[k:]
        )
        whole = divergence_integral(field, case_a_path, subtract_baseline=False)
        parts = divergence_integral(field, head, subtract_baseline=False) + divergence_integral(
            field, tail, subtract_baseline=False
        )
        assert parts == pytest.approx(whole, rel=1e-12, abs=1e-14)

    def test_single_node_path(self, field):
        """Test a one-node path integrates to 0."""
        path = integrate_mpp(field, [-0.995, 0.0], X_BAR, 0.01, 1e-3, 10.0)
        assert divergence_integral(field, path) == 0.0


class TestPathOutput:
    """Test path summaries and CSV output."""

    def test_summary(self, field, case_b_path):
        """Test the JSON summary."""
        summary = summarize_path(with_divergence(field, case_b_path), "B", field.backing)
        assert summary.case == "B"
        assert summary.backing == "analytic"
        assert summary.status == "converged"
        assert summary.nodes == case_b_path.n_nodes
        assert summary.div_integral is not None

    def test_csv_columns(self, field, case_b_path, tmp_path):
        """Test sigma, x1, x2, V, divl, |b| columns."""
        path = write_path_csv(field, case_b_path, tmp_path / "case_B.csv")
        header, rows = read_csv(path)
        assert header == ["sigma", "x1", "x2", "V", "divl", "|b|"]
        assert len(rows) == case_b_path.n_nodes
