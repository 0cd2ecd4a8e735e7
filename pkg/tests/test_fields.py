"""
Tests for potential fields

Validates learned and analytic field evaluation, finite-difference Hessians and
the Lyapunov / Riccati matrix solvers at the double-well fixed points.
"""

import numpy as np
import pytest

from large_deviation_prefactors.fields import (
    AnalyticField,
    LearnedField,
    eval_field,
    hessian_fd,
    lyapunov_hessian,
    riccati_newton,
    riccati_residual,
)
from large_deviation_prefactors.models.architecture import Architecture
from large_deviation_prefactors.network import init_network
from large_deviation_prefactors.systems import DoubleWellSystem, make_doublewell
from large_deviation_prefactors.utils.errors import (
    AssumptionViolation,
    NumericalError,
    UsageError,
)

X_BAR = np.array([-1.0, 0.0])


@pytest.fixture
def analytic():
    return AnalyticField(make_doublewell())


@pytest.fixture
def learned():
    params = init_network(Architecture(input_dim=2, hidden_widths=[8, 8]), seed=11)
    return LearnedField(DoubleWellSystem(), params, X_BAR)


class TestAnalyticField:
    """Test the closed-form field."""

    def test_sample_at_case_a_exit_point(self, analytic):
        """Test V, grad V, l, div l at (-0.5, 0)."""
        s = eval_field(analytic, [-0.5, 0.0])
        assert s.V == pytest.approx(0.28125)
        np.testing.assert_allclose(s.grad_v, [0.75, 0.0], atol=1e-14)
        np.testing.assert_allclose(s.l, [0.0, -1.125], atol=1e-14)
        assert s.div_l == pytest.approx(0.0)

    def test_mpp_velocity_is_half_gradient_plus_rotation(self, analytic):
        """Test G = b + grad V = 1/2 grad V + l."""
        x = np.array([-0.6, 0.2])
        s = analytic.sample(x)
        np.testing.assert_allclose(analytic.mpp_velocity(x), 0.5 * s.grad_v + s.l, atol=1e-13)

    def test_non_finite_point_rejected(self, analytic):
        """Test evaluation at NaN."""
        with pytest.raises(UsageError):
            analytic.value([np.nan, 0.0])


class TestLearnedField:
    """Test the network-backed field."""

    def test_gradient_matches_finite_differences(self, learned):
        """Test grad V from the input Jacobian."""
        x = np.array([-0.4, 0.3])
        h = 1e-6
        fd = [(learned.value(x + h * e) - learned.value(x - h * e)) / (2 * h) for e in np.eye(2)]
        np.testing.assert_allclose(learned.sample(x).grad_v, fd, atol=1e-8)

    def test_divergence_matches_finite_differences(self, learned):
        """Test div l is the trace of the l block of the Jacobian."""
        x = np.array([-0.8, -0.1])
        h = 1e-6
        div = sum(
            (learned.sample(x + h * e).l[k] - learned.sample(x - h * e).l[k]) / (2 * h)
            for k, e in enumerate(np.eye(2))
        )
        assert learned.sample(x).div_l == pytest.approx(div, abs=1e-8)

    def test_value_includes_quadratic_pin(self, learned):
        """Test V = V_hat + |x - x_bar|^2."""
        assert learned.value(X_BAR) == pytest.approx(learned.anchor_value)
        x = np.array([0.0, 0.0])
        assert learned.sample(x).V == pytest.approx(learned.value(x))

    def test_anchor_tolerance(self):
        """Test a large V_hat(x_bar) is refused when a tolerance is declared."""
        params = init_network(Architecture(input_dim=2, hidden_widths=[8]), seed=5)
        with pytest.raises(NumericalError):
            LearnedField(DoubleWellSystem(), params, X_BAR, anchor_tolerance=0.0)

    def test_dimension_mismatch(self):
        """Test a 3-input network for a planar system."""
        params = init_network(Architecture(input_dim=3, hidden_widths=[4]), seed=0)
        with pytest.raises(UsageError):
            LearnedField(DoubleWellSystem(), params, X_BAR)


class TestHessianFd:
    """Test finite-difference Hessians."""

    def test_stable_point(self, analytic):
        """Test H_bar = diag(4, 1) at SN1."""
        result = hessian_fd(analytic, X_BAR)
        np.testing.assert_allclose(result.array, np.diag([4.0, 1.0]), atol=1e-6)
        assert result.method == "finite_difference"
        assert result.residuals["symmetry"] < 1e-8

    def test_saddle(self, analytic):
        """Test H* = diag(-2, 1) at the saddle."""
        result = hessian_fd(analytic, [0.0, 0.0])
        np.testing.assert_allclose(result.array, np.diag([-2.0, 1.0]), atol=1e-6)
        assert result.signature == (1, 1)

    def test_learned_hessian_is_symmetric(self, learned):
        """Test the symmetrized output."""
        h = hessian_fd(learned, [-0.7, 0.1]).array
        np.testing.assert_array_equal(h, h.T)

    def test_bad_step(self, analytic):
        """Test a non-positive step."""
        with pytest.raises(UsageError):
            hessian_fd(analytic, X_BAR, step=0.0)

    def test_batch_refused(self, analytic):
        """Test more than one point."""
        with pytest.raises(UsageError):
            hessian_fd(analytic, np.zeros((2, 2)))


class TestMatrixEquations:
    """Test the Lyapunov and Riccati solvers."""

    def test_lyapunov_identity(self):
        """Test Q = I gives H = 2I."""
        result = lyapunov_hessian(np.eye(3))
        np.testing.assert_allclose(result.array, 2.0 * np.eye(3), atol=1e-12)

    def test_lyapunov_at_stable_point(self):
        """Test Q = -grad b(SN1) gives diag(4, 1)."""
        q = -DoubleWellSystem().jacobian(X_BAR)
        result = lyapunov_hessian(q)
        np.testing.assert_allclose(result.array, np.diag([4.0, 1.0]), atol=1e-10)
        assert result.residuals["riccati"] < 1e-9
        assert result.convention == "adopted"

    def test_lyapunov_paper_convention_halves(self):
        """Test the printed convention returns H / 2 and satisfies 2H^2 = Q^T H + H Q."""
        q = -DoubleWellSystem().jacobian(X_BAR)
        result = lyapunov_hessian(q, paper_convention=True)
        np.testing.assert_allclose(result.array, np.diag([2.0, 0.5]), atol=1e-10)
        assert riccati_residual(result.array, q, paper_convention=True) < 1e-9

    def test_lyapunov_refuses_saddle(self):
        """Test Q with a negative eigenvalue."""
        with pytest.raises(AssumptionViolation):
            lyapunov_hessian(np.diag([-1.0, 0.5]))

    def test_riccati_at_saddle(self):
        """Test Newton from a perturbed seed reaches diag(-2, 1)."""
        q = -DoubleWellSystem().jacobian([0.0, 0.0])
        result = riccati_newton(q, np.diag([-1.9, 1.1]))
        np.testing.assert_allclose(result.array, np.diag([-2.0, 1.0]), atol=1e-9)
        assert result.method == "riccati_newton"
        assert result.iterations > 0

    def test_riccati_reproduces_lyapunov(self):
        """Test Newton on the linearised rotational drift lands on the Lyapunov Hessian."""
        q = -DoubleWellSystem().jacobian(X_BAR)
        lyap = lyapunov_hessian(q)
        newton = riccati_newton(q, lyap.array + 0.05 * np.eye(2))
        np.testing.assert_allclose(newton.array, lyap.array, atol=1e-9)
        assert newton.iterations > 0

    def test_exact_seed_needs_no_iteration(self):
        """Test an exact seed is returned immediately."""
        q = np.diag([-1.0, 0.5])
        result = riccati_newton(q, np.diag([-2.0, 1.0]))
        assert result.iterations == 0

    def test_riccati_non_convergence(self):
        """Test the iteration cap."""
        q = np.diag([-1.0, 0.5])
        with pytest.raises(NumericalError):
            riccati_newton(q, np.diag([-50.0, 40.0]), max_iterations=1)
