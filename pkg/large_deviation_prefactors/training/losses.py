"""
Decomposition loss

    L = L_dyn + gamma1 * L_orth + gamma2 * L_0

    L_dyn  = mean_i |b(x_i) + 1/2 grad V(x_i) - l(x_i)|^2
    L_orth = mean_i <grad V, l>^2 / (|grad V|^2 |l|^2 + delta)
    L_0    = V(x_bar)^2

with V(x) = V_hat(x) + |x - x_bar|^2, so grad V = grad V_hat + 2 (x - x_bar).
The network is evaluated on the training points with x_bar appended as the
last batch row; that row only feeds L_0.
"""

from dataclasses import dataclass

import numpy as np

from large_deviation_prefactors.models.run_config import TrainConfig
from large_deviation_prefactors.network.diffnet import NetworkParams, forward_with_input_jacobian
from large_deviation_prefactors.systems.base import DriftSystem
from large_deviation_prefactors.utils.errors import NumericalError, UsageError


@dataclass(frozen=True)
class LossComponents:
    """The three unweighted loss terms and their weighted total."""

    l_dyn: float
    l_orth: float
    l_zero: float
    total: float


@dataclass(frozen=True)
class DecompositionTerms:
    """Per-sample residual r = b + 1/2 grad V - l and orthogonality ratio."""

    residual: np.ndarray
    orth: np.ndarray


def decomposition_terms(
    b: np.ndarray, grad_v: np.ndarray, l: np.ndarray, delta: float  # noqa: E741
) -> DecompositionTerms:
    """Per-sample loss terms for any (b, grad V, l) triple of shape (N, n)."""
    residual = b + 0.5 * grad_v - l
    inner = np.sum(grad_v * l, axis=1)
    denom = np.sum(grad_v * grad_v, axis=1) * np.sum(l * l, axis=1) + delta
    return DecompositionTerms(residual=residual, orth=inner * inner / denom)


def _check_rows(values: np.ndarray, what: str) -> None:
    bad = np.flatnonzero(~np.all(np.isfinite(values.reshape(values.shape[0], -1)), axis=1))
    if bad.size:
        raise NumericalError(f"non-finite {what} at sample index {int(bad[0])}")


class DecompositionLoss:
    """
    JacobianLoss over training points + x_bar.

    Called with network outputs (N+1, n+1) and input Jacobians (N+1, n+1, n);
    returns the total loss and its partials with respect to both.
    """

    def __init__(
        self,
        system: DriftSystem,
        points: np.ndarray,
        x_bar: np.ndarray,
        gamma1: float,
        gamma2: float,
        delta: float,
    ):
        points = system.check_point(points)
        if points.ndim != 2 or points.shape[0] == 0:
            raise UsageError("loss needs a nonempty (N, n) batch of training points")
        self.points = points
        self.x_bar = system.check_point(x_bar)
        self.drift = system.drift(points)
        _check_rows(self.drift, "drift")
        self.offset = points - self.x_bar
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.delta = delta
        self.last: LossComponents | None = None

    @property
    def batch(self) -> np.ndarray:
        """Network input: training points followed by x_bar."""
        return np.vstack([self.points, self.x_bar[None, :]])

    def components(self, outputs: np.ndarray, jacobians: np.ndarray) -> LossComponents:
        self(outputs, jacobians)
        assert self.last is not None
        return self.last

    def __call__(
        self, outputs: np.ndarray, jacobians: np.ndarray
    ) -> tuple[float, np.ndarray, np.ndarray]:
        n_points = self.points.shape[0]
        grad_v = jacobians[:n_points, 0, :] + 2.0 * self.offset
        l = outputs[:n_points, 1:]  # noqa: E741
        _check_rows(grad_v, "grad V")
        _check_rows(l, "l")

        terms = decomposition_terms(self.drift, grad_v, l, self.delta)
        r = terms.residual
        anchor = float(outputs[n_points, 0])

        l_dyn = float(np.sum(r * r) / n_points)
        l_orth = float(np.sum(terms.orth) / n_points)
        l_zero = anchor * anchor
        total = l_dyn + self.gamma1 * l_orth + self.gamma2 * l_zero
        self.last = LossComponents(l_dyn, l_orth, l_zero, total)

        inner = np.sum(grad_v * l, axis=1)[:, None]
        gg = np.sum(grad_v * grad_v, axis=1)[:, None]
        ll = np.sum(l * l, axis=1)[:, None]
        denom = gg * ll + self.delta
        num = inner * inner
        d_orth_grad = (2.0 * inner * l * denom - num * 2.0 * ll * grad_v) / (denom * denom)
        d_orth_l = (2.0 * inner * grad_v * denom - num * 2.0 * gg * l) / (denom * denom)

        d_grad = r / n_points + self.gamma1 * d_orth_grad / n_points
        d_l = -2.0 * r / n_points + self.gamma1 * d_orth_l / n_points

        g_out = np.zeros_like(outputs)
        g_jac = np.zeros_like(jacobians)
        g_out[:n_points, 1:] = d_l
        g_jac[:n_points, 0, :] = d_grad
        g_out[n_points, 0] = 2.0 * self.gamma2 * anchor
        return total, g_out, g_jac


def make_loss(system: DriftSystem, points: np.ndarray, cfg: TrainConfig) -> DecompositionLoss:
    """DecompositionLoss with the weights of `cfg`."""
    return DecompositionLoss(
        system,
        points,
        np.asarray(cfg.x_bar, dtype=float),
        gamma1=cfg.gamma1,
        gamma2=cfg.gamma2,
        delta=cfg.delta,
    )


def loss_components(
    params: NetworkParams, system: DriftSystem, points: np.ndarray, cfg: TrainConfig
) -> LossComponents:
    """
    L_dyn, L_orth and L_0 of `params` on `points`.

    Raises:
        UsageError: empty point set
        NumericalError: non-finite network or drift values, naming the sample index
    """
    loss = make_loss(system, points, cfg)
    ev = forward_with_input_jacobian(params, loss.batch)
    return loss.components(ev.outputs, ev.input_jacobian)
