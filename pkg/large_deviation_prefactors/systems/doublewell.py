"""
Rotational double-well benchmark

Two-dimensional drift with an explicitly known orthogonal decomposition

    V(x1, x2) = v1(x1) + v2(x2),   v1 = x1^4/2 - x1^2,   v2 = alpha * x2^2
    l(x1, x2) = (-beta * x1 * v2'(x2), beta * x1 * v1'(x1))
    b = -1/2 grad V + l

With alpha = 0.5, beta = 3 this is b = (x1 - x1^3 - 3 x1 x2, 6 x1^4 - 6 x1^2 - x2/2),
stable points SN1 = (-1, 0), SN2 = (1, 0) and the saddle US = (0, 0) on the
separatrix x1 = 0. beta = 0 gives a pure gradient system.
"""

from dataclasses import dataclass

import numpy as np

from large_deviation_prefactors.systems.base import DriftSystem

DEFAULT_ALPHA = 0.5
DEFAULT_BETA = 3.0


def _v1(x1: np.ndarray) -> np.ndarray:
    return 0.5 * x1**4 - x1**2


def _dv1(x1: np.ndarray) -> np.ndarray:
    return 2.0 * x1**3 - 2.0 * x1


def _d2v1(x1: np.ndarray) -> np.ndarray:
    return 6.0 * x1**2 - 2.0


class DoubleWellSystem(DriftSystem):
    """Double-well drift with a rotational component of strength beta."""

    def __init__(self, alpha: float = DEFAULT_ALPHA, beta: float = DEFAULT_BETA):
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.name = f"doublewell(alpha={self.alpha:g}, beta={self.beta:g})"
        super().__init__(
            dim=2,
            fixed_point_locations={
                "SN1": np.array([-1.0, 0.0]),
                "SN2": np.array([1.0, 0.0]),
                "US": np.array([0.0, 0.0]),
            },
        )

    def _drift(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        dv2 = 2.0 * self.alpha * x2
        b1 = -0.5 * _dv1(x1) - self.beta * x1 * dv2
        b2 = -0.5 * dv2 + self.beta * x1 * _dv1(x1)
        return np.stack([b1, b2], axis=-1)

    def _jacobian(self, x: np.ndarray) -> np.ndarray:
        x1, x2 = x[..., 0], x[..., 1]
        a, b = self.alpha, self.beta
        j11 = -0.5 * _d2v1(x1) - 2.0 * a * b * x2
        j12 = -2.0 * a * b * x1
        j21 = b * (_dv1(x1) + x1 * _d2v1(x1))
        j22 = np.full_like(x1, -a)
        return np.stack([np.stack([j11, j12], axis=-1), np.stack([j21, j22], axis=-1)], axis=-2)


@dataclass(frozen=True)
class AnalyticBenchmark:
    """
    A drift system together with its exact quasipotential and rotational field.

    The quasipotential is shifted so that it vanishes at the stable point x_bar.
    """

    system: DoubleWellSystem
    x_bar_key: str = "SN1"

    @property
    def alpha(self) -> float:
        return self.system.alpha

    @property
    def beta(self) -> float:
        return self.system.beta

    @property
    def x_bar(self) -> np.ndarray:
        return self.system.fixed_point(self.x_bar_key).location

    def _raw_quasipotential(self, x: np.ndarray) -> np.ndarray:
        return _v1(x[..., 0]) + self.alpha * x[..., 1] ** 2

    def quasipotential(self, x: np.ndarray) -> np.ndarray:
        """V(x) - V(x_bar)."""
        x = self.system.check_point(x)
        return self._raw_quasipotential(x) - self._raw_quasipotential(self.x_bar)

    def grad_quasipotential(self, x: np.ndarray) -> np.ndarray:
        x = self.system.check_point(x)
        return np.stack([_dv1(x[..., 0]), 2.0 * self.alpha * x[..., 1]], axis=-1)

    def hessian_quasipotential(self, x: np.ndarray) -> np.ndarray:
        x = self.system.check_point(x)
        zeros = np.zeros_like(x[..., 0])
        row1 = np.stack([_d2v1(x[..., 0]), zeros], axis=-1)
        row2 = np.stack([zeros, np.full_like(zeros, 2.0 * self.alpha)], axis=-1)
        return np.stack([row1, row2], axis=-2)

    def rotational(self, x: np.ndarray) -> np.ndarray:
        """l(x) = (-beta x1 v2'(x2), beta x1 v1'(x1))."""
        x = self.system.check_point(x)
        x1, x2 = x[..., 0], x[..., 1]
        return np.stack(
            [-self.beta * x1 * 2.0 * self.alpha * x2, self.beta * x1 * _dv1(x1)], axis=-1
        )

    def div_rotational(self, x: np.ndarray) -> np.ndarray:
        """div l = -2 alpha beta x2."""
        x = self.system.check_point(x)
        return -2.0 * self.alpha * self.beta * x[..., 1]


def make_doublewell(alpha: float = DEFAULT_ALPHA, beta: float = DEFAULT_BETA) -> AnalyticBenchmark:
    """Build the double-well benchmark for the given (alpha, beta)."""
    return AnalyticBenchmark(system=DoubleWellSystem(alpha=alpha, beta=beta))


def true_quasipotential(bench: AnalyticBenchmark, x: np.ndarray | list[float]) -> np.ndarray:
    """Exact quasipotential, zero at x_bar."""
    return bench.quasipotential(np.asarray(x, dtype=float))


def true_rotational(bench: AnalyticBenchmark, x: np.ndarray | list[float]) -> np.ndarray:
    """Exact rotational component of the drift."""
    return bench.rotational(np.asarray(x, dtype=float))
