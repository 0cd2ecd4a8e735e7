"""
Potential fields

One evaluation surface over "a quasipotential field", whether it is backed by
a trained network or by an exact benchmark decomposition:

    V, grad V, l, div l          (b = -1/2 grad V + l,  <grad V, l> = 0)

A learned field wraps the network as V = V_hat(x) + |x - x_bar|^2 and reads
grad V and div l from the network's input Jacobian.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Literal

import numpy as np

from large_deviation_prefactors.network.diffnet import (
    NetworkParams,
    forward,
    forward_with_input_jacobian,
)
from large_deviation_prefactors.systems.base import DriftSystem
from large_deviation_prefactors.systems.doublewell import AnalyticBenchmark
from large_deviation_prefactors.utils.errors import NumericalError, UsageError


@dataclass(frozen=True)
class FieldSample:
    """V, grad V, l and div l at one point."""

    V: float
    grad_v: np.ndarray
    l: np.ndarray  # noqa: E741
    div_l: float


@dataclass(frozen=True)
class FieldBatch:
    """Vectorised FieldSample: V (B,), grad_v (B, n), l (B, n), div_l (B,)."""

    V: np.ndarray
    grad_v: np.ndarray
    l: np.ndarray  # noqa: E741
    div_l: np.ndarray


class PotentialField(ABC):
    """A quasipotential with its rotational companion, attached to a drift system."""

    backing: Literal["learned", "analytic"]

    def __init__(self, system: DriftSystem, x_bar: np.ndarray):
        self.system = system
        self.x_bar = system.check_point(x_bar)

    @property
    def dim(self) -> int:
        return self.system.dim

    def _batch(self, x: np.ndarray | list[float]) -> tuple[np.ndarray, bool]:
        arr = self.system.check_point(x)
        if not np.all(np.isfinite(arr)):
            raise UsageError("field evaluation at a non-finite point")
        if arr.ndim == 1:
            return arr[None, :], True
        return arr.reshape(-1, self.dim), False

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> FieldBatch:
        """Evaluate on a (B, n) batch."""

    @abstractmethod
    def quasipotential(self, points: np.ndarray) -> np.ndarray:
        """V only, on a (B, n) batch."""

    def sample(self, x: np.ndarray | list[float]) -> FieldSample:
        batch, _ = self._batch(x)
        out = self.evaluate(batch)
        return FieldSample(
            V=float(out.V[0]), grad_v=out.grad_v[0], l=out.l[0], div_l=float(out.div_l[0])
        )

    def value(self, x: np.ndarray | list[float]) -> float:
        batch, _ = self._batch(x)
        return float(self.quasipotential(batch)[0])

    def mpp_velocity(self, x: np.ndarray) -> np.ndarray:
        """G = b + grad V (= 1/2 grad V + l for an exact decomposition), batched."""
        batch, single = self._batch(x)
        g = self.system.drift(batch) + self.evaluate(batch).grad_v
        return g[0] if single else g


class LearnedField(PotentialField):
    """Field read off a trained decomposition network."""

    backing = "learned"

    def __init__(
        self,
        system: DriftSystem,
        params: NetworkParams,
        x_bar: np.ndarray,
        anchor_tolerance: float | None = None,
    ):
        super().__init__(system, x_bar)
        if params.architecture.input_dim != system.dim:
            raise UsageError(
                f"network input dimension {params.architecture.input_dim} does not match "
                f"system dimension {system.dim}"
            )
        self.params = params
        self.anchor_value = float(forward(params, self.x_bar)[0])
        if anchor_tolerance is not None and abs(self.anchor_value) > anchor_tolerance:
            raise NumericalError(
                f"learned quasipotential at x_bar is {self.anchor_value:.3g}, "
                f"above the declared tolerance {anchor_tolerance:.3g}"
            )

    def evaluate(self, points: np.ndarray) -> FieldBatch:
        ev = forward_with_input_jacobian(self.params, points)
        offset = points - self.x_bar
        jac_l = ev.input_jacobian[:, 1:, :]
        return FieldBatch(
            V=ev.outputs[:, 0] + np.sum(offset * offset, axis=1),
            grad_v=ev.input_jacobian[:, 0, :] + 2.0 * offset,
            l=ev.outputs[:, 1:],
            div_l=np.trace(jac_l, axis1=1, axis2=2),
        )

    def quasipotential(self, points: np.ndarray) -> np.ndarray:
        offset = points - self.x_bar
        return forward(self.params, points)[:, 0] + np.sum(offset * offset, axis=1)


class AnalyticField(PotentialField):
    """Field given by the closed forms of a benchmark."""

    backing = "analytic"

    def __init__(self, bench: AnalyticBenchmark):
        super().__init__(bench.system, bench.x_bar)
        self.bench = bench

    def evaluate(self, points: np.ndarray) -> FieldBatch:
        return FieldBatch(
            V=self.bench.quasipotential(points),
            grad_v=self.bench.grad_quasipotential(points),
            l=self.bench.rotational(points),
            div_l=self.bench.div_rotational(points),
        )

    def quasipotential(self, points: np.ndarray) -> np.ndarray:
        return self.bench.quasipotential(points)


def eval_field(field: PotentialField, x: np.ndarray | list[float]) -> FieldSample:
    """V, grad V, l and div l of `field` at one point."""
    return field.sample(x)
