"""
Tests for the decomposition network

Validates the forward pass with input Jacobian, the reverse pass through the
Jacobian recursion, and the checkpoint container.
"""

import struct

import numpy as np
import pytest

from large_deviation_prefactors.models.architecture import Architecture
from large_deviation_prefactors.network import (
    NetworkParams,
    forward,
    forward_with_input_jacobian,
    init_network,
    load_checkpoint,
    parameter_gradient,
    read_checkpoint,
    save_checkpoint,
)
from large_deviation_prefactors.network.checkpoint import MAGIC
from large_deviation_prefactors.utils.errors import CheckpointError, NumericalError, UsageError


def _small_params(seed: int = 3) -> NetworkParams:
    return init_network(Architecture(input_dim=2, hidden_widths=[5, 4]), seed)


class _QuadraticLoss:
    """sum(c * outputs) + 1/2 sum(jacobians^2), with analytic partials."""

    def __init__(self, m: int):
        self.c = np.linspace(0.5, 1.5, m)

    def __call__(self, outputs, jacobians):
        value = float(np.sum(outputs * self.c) + 0.5 * np.sum(jacobians**2))
        return value, np.broadcast_to(self.c, outputs.shape).copy(), jacobians.copy()


class TestForward:
    """Test forward evaluation."""

    def test_init_is_deterministic(self):
        """Test the same seed gives identical weights."""
        a, b = _small_params(7), _small_params(7)
        np.testing.assert_array_equal(a.flatten(), b.flatten())
        assert not np.array_equal(a.flatten(), _small_params(8).flatten())

    def test_biases_start_at_zero(self):
        """Test initial biases."""
        params = _small_params()
        assert all(np.all(c == 0.0) for c in params.biases)

    def test_weights_within_glorot_bound(self):
        """Test each weight matrix is bounded by sqrt(6 / (fan_in + fan_out)) and spans it."""
        params = init_network(Architecture(input_dim=2, hidden_widths=[20, 20]), 5)
        for w in params.weights:
            fan_out, fan_in = w.shape
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            assert np.max(np.abs(w)) <= bound
            assert np.max(np.abs(w)) > 0.5 * bound

    def test_without_hidden_layers_jacobian_is_weight(self):
        """Test an affine network returns its weight matrix as the input Jacobian."""
        params = init_network(Architecture(input_dim=2, hidden_widths=[]), 1)
        x = np.array([[0.2, -0.7], [1.5, 0.4]])
        result = forward_with_input_jacobian(params, x)
        for row in result.input_jacobian:
            np.testing.assert_array_equal(row, params.weights[0])
        np.testing.assert_allclose(result.outputs, x @ params.weights[0].T)

    def test_single_point_and_batch_agree(self):
        """Test a single point is evaluated like a batch row."""
        params = _small_params()
        batch = np.array([[0.1, -0.2], [0.4, 0.3]])
        np.testing.assert_allclose(forward(params, batch[1]), forward(params, batch)[1])

    def test_input_jacobian_matches_finite_differences(self):
        """Test the propagated Jacobian against central differences."""
        params = _small_params()
        x = np.array([0.3, -0.6])
        h = 1e-6
        fd = np.column_stack(
            [(forward(params, x + h * e) - forward(params, x - h * e)) / (2 * h) for e in np.eye(2)]
        )
        result = forward_with_input_jacobian(params, x)
        assert result.input_jacobian.shape == (3, 2)
        np.testing.assert_allclose(result.input_jacobian, fd, atol=1e-8)
        np.testing.assert_allclose(result.outputs, forward(params, x))

    def test_wrong_input_shape(self):
        """Test a 3-vector is refused by a 2-input network."""
        with pytest.raises(UsageError):
            forward(_small_params(), [0.0, 0.0, 0.0])

    def test_nan_input_names_layer(self):
        """Test a NaN is reported with the layer where it appeared."""
        with pytest.raises(NumericalError, match="layer 1"):
            forward(_small_params(), [np.nan, 0.0])

    def test_flat_round_trip(self):
        """Test flatten / from_flat are inverse."""
        params = _small_params()
        again = NetworkParams.from_flat(params.architecture, params.flatten(), params.seed)
        np.testing.assert_array_equal(again.flatten(), params.flatten())
        with pytest.raises(UsageError):
            NetworkParams.from_flat(params.architecture, params.flatten()[:-1], params.seed)


class TestParameterGradient:
    """Test the reverse pass."""

    def test_gradient_matches_finite_differences(self):
        """Test a loss depending on outputs and Jacobians."""
        params = _small_params()
        batch = np.random.default_rng(0).uniform(-1, 1, size=(6, 2))
        loss = _QuadraticLoss(3)
        _, grad = parameter_gradient(params, batch, loss)
        analytic = grad.flatten()

        flat = params.flatten()
        h = 1e-6
        for k in range(0, flat.size, 3):
            up, down = flat.copy(), flat.copy()
            up[k] += h
            down[k] -= h
            f_up, _, _ = loss(
                *_eval(NetworkParams.from_flat(params.architecture, up, params.seed), batch)
            )
            f_down, _, _ = loss(
                *_eval(NetworkParams.from_flat(params.architecture, down, params.seed), batch)
            )
            assert analytic[k] == pytest.approx((f_up - f_down) / (2 * h), rel=1e-5, abs=1e-7)

    def test_gradient_layout_matches_params(self):
        """Test the gradient has the same shapes as the parameters."""
        params = _small_params()
        _, grad = parameter_gradient(params, np.zeros((2, 2)), _QuadraticLoss(3))
        assert [g.shape for g in grad.weights] == [w.shape for w in params.weights]
        assert [g.shape for g in grad.biases] == [c.shape for c in params.biases]


def _eval(params, batch):
    result = forward_with_input_jacobian(params, batch)
    return result.outputs, result.input_jacobian


class TestCheckpoint:
    """Test the checkpoint container."""

    def test_round_trip_is_bit_exact(self, tmp_path):
        """Test saving and loading preserves every parameter bit."""
        params = _small_params()
        path = save_checkpoint(params, tmp_path / "net.ckpt", {"epoch": 12, "x_bar": [-1, 0]})
        loaded, header = read_checkpoint(path, expected_input_dim=2)
        np.testing.assert_array_equal(loaded.flatten(), params.flatten())
        assert loaded.architecture == params.architecture
        assert header.metadata["epoch"] == 12
        assert loaded.seed == params.seed

    def test_missing_file(self, tmp_path):
        """Test reading a path that does not exist."""
        with pytest.raises(FileNotFoundError):
            load_checkpoint(tmp_path / "absent.ckpt")

    def test_bad_magic(self, tmp_path):
        """Test a foreign file is refused."""
        path = tmp_path / "junk.ckpt"
        path.write_bytes(b"not a checkpoint at all")
        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(path)

    def test_version_mismatch(self, tmp_path):
        """Test a future format version is refused."""
        path = save_checkpoint(_small_params(), tmp_path / "net.ckpt")
        raw = bytearray(path.read_bytes())
        struct.pack_into("<H", raw, len(MAGIC), 99)
        path.write_bytes(bytes(raw))
        with pytest.raises(CheckpointError, match="version"):
            load_checkpoint(path)

    def test_truncated_payload(self, tmp_path):
        """Test a short payload is refused."""
        path = save_checkpoint(_small_params(), tmp_path / "net.ckpt")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(CheckpointError, match="payload"):
            load_checkpoint(path)

    def test_dimension_mismatch(self, tmp_path):
        """Test a 2-input network loaded for a 3-dimensional system."""
        path = save_checkpoint(_small_params(), tmp_path / "net.ckpt")
        with pytest.raises(CheckpointError, match="dimension"):
            load_checkpoint(path, expected_input_dim=3)
