"""
Decomposition network engine

A tanh multilayer perceptron x -> (V_hat, l) that propagates the input Jacobian
alongside the values, and a reverse pass that differentiates any scalar loss of
(outputs, input Jacobians) with respect to the weights. The loss depends on the
Jacobian, so the reverse pass runs through the Jacobian recursion as well:

    z_k = W_k a_{k-1} + c_k,  a_k = tanh(z_k),  J_k = diag(1 - a_k^2) W_k J_{k-1},  J_0 = I

Batches are (B, n) arrays. Jacobians are stored as (B, n, width) so that each
layer and each batch reduction is a single matrix product; results are
reproducible for a given batch and BLAS build.
"""

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from large_deviation_prefactors.models.architecture import Architecture
from large_deviation_prefactors.utils.errors import NumericalError, UsageError, require_finite


@dataclass(frozen=True)
class NetworkParams:
    """Weights (out, in) and biases of every layer, input to output."""

    architecture: Architecture
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    seed: int

    @property
    def n_parameters(self) -> int:
        return sum(w.size + c.size for w, c in zip(self.weights, self.biases))

    def flatten(self) -> np.ndarray:
        """All parameters as one vector: W_1, c_1, W_2, c_2, ..."""
        parts: list[np.ndarray] = []
        for w, c in zip(self.weights, self.biases):
            parts.extend((w.ravel(), c.ravel()))
        return np.concatenate(parts)

    @classmethod
    def from_flat(cls, architecture: Architecture, flat: np.ndarray, seed: int) -> "NetworkParams":
        """Inverse of flatten."""
        sizes = architecture.layer_sizes
        expected = sum(sizes[k + 1] * sizes[k] + sizes[k + 1] for k in range(len(sizes) - 1))
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (expected,):
            raise UsageError(f"expected {expected} parameters, got shape {flat.shape}")
        weights, biases, offset = [], [], 0
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            weights.append(flat[offset : offset + fan_out * fan_in].reshape(fan_out, fan_in).copy())
            offset += fan_out * fan_in
            biases.append(flat[offset : offset + fan_out].copy())
            offset += fan_out
        return cls(architecture, tuple(weights), tuple(biases), seed)


@dataclass(frozen=True)
class NetworkGradient:
    """Gradient of a scalar loss, laid out like NetworkParams."""

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def flatten(self) -> np.ndarray:
        parts: list[np.ndarray] = []
        for w, c in zip(self.weights, self.biases):
            parts.extend((w.ravel(), c.ravel()))
        return np.concatenate(parts)


@dataclass(frozen=True)
class EvalWithJacobian:
    """Network outputs (..., n+1) and input Jacobian (..., n+1, n)."""

    outputs: np.ndarray
    input_jacobian: np.ndarray


class JacobianLoss(Protocol):
    """
    Scalar loss of a batch of outputs and input Jacobians.

    Returns the loss value and its partial derivatives with respect to the
    outputs (B, m) and the Jacobians (B, m, n).
    """

    def __call__(
        self, outputs: np.ndarray, jacobians: np.ndarray
    ) -> tuple[float, np.ndarray, np.ndarray]: ...


@dataclass
class _ForwardCache:
    activations: list[np.ndarray]
    slopes: list[np.ndarray]
    pre_jacobians: list[np.ndarray]
    jacobians: list[np.ndarray]
    outputs: np.ndarray
    output_jacobian: np.ndarray


def init_network(arch: Architecture, seed: int) -> NetworkParams:
    """
    Glorot-uniform weights in [-sqrt(6 / (fan_in + fan_out)), +...], biases zero.

    Deterministic given (arch, seed).
    """
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    sizes = arch.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetworkParams(arch, tuple(weights), tuple(biases), seed)


def _as_batch(params: NetworkParams, x: np.ndarray | list[float]) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    n = params.architecture.input_dim
    if arr.ndim == 1 and arr.shape[0] == n:
        return arr[None, :], True
    if arr.ndim == 2 and arr.shape[1] == n:
        return arr, False
    raise UsageError(f"expected input of shape ({n},) or (B, {n}), got {arr.shape}")


def _check_layer(values: np.ndarray, layer: int) -> None:
    require_finite(values, f"layer {layer}")


def _forward_values(params: NetworkParams, batch: np.ndarray) -> np.ndarray:
    a = batch
    n_hidden = len(params.weights) - 1
    for k in range(n_hidden):
        a = np.tanh(a @ params.weights[k].T + params.biases[k])
        _check_layer(a, k + 1)
    out = a @ params.weights[-1].T + params.biases[-1]
    _check_layer(out, n_hidden + 1)
    return out


def _right_multiply(jac: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """(B, n, p) @ (p, q) as one matrix product."""
    b, n, p = jac.shape
    return (jac.reshape(b * n, p) @ matrix).reshape(b, n, matrix.shape[1])


def _contract(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """sum over batch and input axes of left[b, n, i] * right[b, n, j], shape (i, j)."""
    return left.reshape(-1, left.shape[-1]).T @ right.reshape(-1, right.shape[-1])


def _forward_with_cache(params: NetworkParams, batch: np.ndarray) -> _ForwardCache:
    # Jacobians are held as (B, n, width): d a_k / d x transposed
    n = params.architecture.input_dim
    a = batch
    jac = np.ascontiguousarray(np.broadcast_to(np.eye(n), (batch.shape[0], n, n)))
    cache = _ForwardCache([a], [], [], [jac], np.empty(0), np.empty(0))
    n_hidden = len(params.weights) - 1
    for k in range(n_hidden):
        w = params.weights[k]
        a = np.tanh(a @ w.T + params.biases[k])
        slope = 1.0 - a * a
        pre = _right_multiply(jac, w.T)
        jac = slope[:, None, :] * pre
        _check_layer(a, k + 1)
        _check_layer(jac, k + 1)
        cache.activations.append(a)
        cache.slopes.append(slope)
        cache.pre_jacobians.append(pre)
        cache.jacobians.append(jac)
    w_out = params.weights[-1]
    cache.outputs = a @ w_out.T + params.biases[-1]
    cache.output_jacobian = _right_multiply(jac, w_out.T).transpose(0, 2, 1)
    _check_layer(cache.outputs, n_hidden + 1)
    _check_layer(cache.output_jacobian, n_hidden + 1)
    return cache


def forward(params: NetworkParams, x: np.ndarray | list[float]) -> np.ndarray:
    """
    Evaluate (V_hat, l_1, ..., l_n) at one point (n,) or a batch (B, n).

    Raises:
        NumericalError: naming the first layer that produced a non-finite value
    """
    batch, single = _as_batch(params, x)
    out = _forward_values(params, batch)
    return out[0] if single else out


def forward_with_input_jacobian(
    params: NetworkParams, x: np.ndarray | list[float]
) -> EvalWithJacobian:
    """Outputs plus the exact Jacobian d output_k / d x_j."""
    batch, single = _as_batch(params, x)
    cache = _forward_with_cache(params, batch)
    if single:
        return EvalWithJacobian(cache.outputs[0], cache.output_jacobian[0])
    return EvalWithJacobian(cache.outputs, cache.output_jacobian)


def _first_bad_row(values: np.ndarray) -> int | None:
    bad = np.flatnonzero(~np.all(np.isfinite(values.reshape(values.shape[0], -1)), axis=1))
    return int(bad[0]) if bad.size else None


def _raise_if_bad(values: np.ndarray, where: str) -> None:
    row = _first_bad_row(values)
    if row is not None:
        raise NumericalError(f"non-finite gradient at sample index {row} ({where})")


def parameter_gradient(
    params: NetworkParams, batch: np.ndarray, scalar_loss: JacobianLoss
) -> tuple[float, NetworkGradient]:
    """
    Exact gradient of scalar_loss(outputs, input_jacobians) over a batch.

    Args:
        params: Network parameters
        batch: Points of shape (B, n)
        scalar_loss: Loss returning (value, d/d outputs, d/d jacobians)

    Returns:
        (loss value, gradient laid out like params)

    Raises:
        NumericalError: on a non-finite gradient, naming the offending sample index
    """
    batch, _ = _as_batch(params, batch)
    cache = _forward_with_cache(params, batch)
    value, g_out, g_jac = scalar_loss(cache.outputs, cache.output_jacobian)
    _raise_if_bad(g_out, "loss partials")
    _raise_if_bad(g_jac, "loss partials")

    n_hidden = len(params.weights) - 1
    grad_w: list[np.ndarray] = [np.empty(0)] * (n_hidden + 1)
    grad_b: list[np.ndarray] = [np.empty(0)] * (n_hidden + 1)

    w_out = params.weights[-1]
    g_jac_t = np.ascontiguousarray(g_jac.transpose(0, 2, 1))
    a_last, j_last = cache.activations[-1], cache.jacobians[-1]
    grad_w[-1] = g_out.T @ a_last + _contract(g_jac_t, j_last)
    grad_b[-1] = g_out.sum(axis=0)
    g_a = g_out @ w_out
    g_j = _right_multiply(g_jac_t, w_out)

    for k in range(n_hidden, 0, -1):
        a, slope = cache.activations[k], cache.slopes[k - 1]
        pre = cache.pre_jacobians[k - 1]
        g_pre = slope[:, None, :] * g_j
        g_slope = np.sum(g_j * pre, axis=1)
        # d(1 - a^2)/dz = -2 a (1 - a^2)
        g_z = g_a * slope - 2.0 * g_slope * a * slope
        _raise_if_bad(g_z, f"layer {k}")
        w = params.weights[k - 1]
        grad_w[k - 1] = g_z.T @ cache.activations[k - 1] + _contract(
            g_pre, cache.jacobians[k - 1]
        )
        grad_b[k - 1] = g_z.sum(axis=0)
        if k > 1:
            g_a = g_z @ w
            g_j = _right_multiply(g_pre, w)

    gradient = NetworkGradient(tuple(grad_w), tuple(grad_b))
    if not np.all(np.isfinite(gradient.flatten())):
        raise NumericalError("non-finite parameter gradient after batch reduction")
    return float(value), gradient
