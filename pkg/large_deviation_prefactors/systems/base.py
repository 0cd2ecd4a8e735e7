"""
Drift systems

Base class for the deterministic part b(x) of dx = b(x)dt + sqrt(eps) dB_t,
its Jacobian, and the catalog of classified fixed points.

All evaluations broadcast over leading axes: drift takes (..., dim) and returns
(..., dim); jacobian returns (..., dim, dim).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from large_deviation_prefactors.utils.errors import AssumptionViolation, UsageError


class FixedPointKind(str, Enum):
    """Classification of a fixed point by the spectrum of the drift Jacobian."""

    STABLE = "stable"
    SADDLE = "saddle"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class FixedPoint:
    """A zero of the drift together with the spectrum of its Jacobian."""

    key: str
    location: np.ndarray
    kind: FixedPointKind
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def unstable_direction(self) -> np.ndarray:
        """
        Unit eigenvector of the single eigenvalue with positive real part.

        Raises:
            AssumptionViolation: if the point does not have exactly one such eigenvalue
        """
        positive = np.flatnonzero(self.eigenvalues.real > 0)
        if positive.size != 1:
            raise AssumptionViolation(
                "(B1)",
                f"fixed point {self.key!r} has {positive.size} eigenvalues with positive "
                "real part; a single positive eigenvalue is required",
            )
        vec = np.real(self.eigenvectors[:, positive[0]])
        return vec / np.linalg.norm(vec)


def classify_spectrum(eigenvalues: np.ndarray) -> FixedPointKind:
    """stable: all Re < 0; saddle: exactly one Re > 0; otherwise unstable."""
    real = np.real(eigenvalues)
    if np.all(real < 0):
        return FixedPointKind.STABLE
    if np.count_nonzero(real > 0) == 1:
        return FixedPointKind.SADDLE
    return FixedPointKind.UNSTABLE


class DriftSystem(ABC):
    """
    Deterministic vector field of an SDE with additive isotropic noise.

    Subclasses implement the closed-form drift and Jacobian and list the known
    fixed-point locations by key; classification is derived on construction.
    """

    name: str = "drift"

    def __init__(self, dim: int, fixed_point_locations: dict[str, np.ndarray] | None = None):
        if dim < 1:
            raise UsageError(f"dimension must be positive, got {dim}")
        self.dim = dim
        self._fixed_points: dict[str, FixedPoint] = {}
        for key, loc in (fixed_point_locations or {}).items():
            self._fixed_points[key] = self.classify_point(key, np.asarray(loc, dtype=float))

    @abstractmethod
    def _drift(self, x: np.ndarray) -> np.ndarray:
        """Closed-form drift on an array of shape (..., dim)."""

    @abstractmethod
    def _jacobian(self, x: np.ndarray) -> np.ndarray:
        """Closed-form Jacobian on an array of shape (..., dim); returns (..., dim, dim)."""

    def check_point(self, x: np.ndarray | list[float]) -> np.ndarray:
        """Coerce to a float array and verify the trailing dimension."""
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0 or arr.shape[-1] != self.dim:
            raise UsageError(
                f"{self.name}: expected points of dimension {self.dim}, got shape {arr.shape}"
            )
        return arr

    def drift(self, x: np.ndarray | list[float]) -> np.ndarray:
        """Evaluate b(x)."""
        return self._drift(self.check_point(x))

    def jacobian(self, x: np.ndarray | list[float]) -> np.ndarray:
        """Evaluate the Jacobian matrix of b at x."""
        return self._jacobian(self.check_point(x))

    def classify_point(self, key: str, location: np.ndarray) -> FixedPoint:
        """Build a FixedPoint from a location, reading the spectrum of the Jacobian."""
        eigenvalues, eigenvectors = np.linalg.eig(self.jacobian(location))
        return FixedPoint(
            key=key,
            location=location,
            kind=classify_spectrum(eigenvalues),
            eigenvalues=eigenvalues,
            eigenvectors=eigenvectors,
        )

    @property
    def fixed_points(self) -> list[FixedPoint]:
        """Registered fixed points in registration order."""
        return list(self._fixed_points.values())

    def fixed_point(self, key: str) -> FixedPoint:
        """Look up a registered fixed point by key."""
        if key not in self._fixed_points:
            known = ", ".join(self._fixed_points) or "none"
            raise UsageError(f"{self.name}: unknown fixed point {key!r} (known: {known})")
        return self._fixed_points[key]

    def near_fixed_point(self, x: np.ndarray, radius: float) -> bool:
        """True if x lies within `radius` of any registered fixed point."""
        return any(
            float(np.linalg.norm(x - fp.location)) <= radius for fp in self._fixed_points.values()
        )


def drift(system: DriftSystem, x: np.ndarray | list[float]) -> np.ndarray:
    """Evaluate the drift of `system` at x (dimension-checked)."""
    return system.drift(x)


def drift_jacobian(system: DriftSystem, x: np.ndarray | list[float]) -> np.ndarray:
    """Evaluate the drift Jacobian of `system` at x (dimension-checked)."""
    return system.jacobian(x)
