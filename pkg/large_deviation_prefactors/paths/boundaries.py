"""
Exit boundaries

    - NonCharacteristicBoundary: a parametric curve {curve(s), s in [s_min, s_max]}
      with an exterior unit normal and optionally an interior predicate on
      (k, n) batches; the drift points inward (<b, n> < 0).
    - CharacteristicBoundary: a boundary through a saddle, identified by the saddle.
"""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np

from large_deviation_prefactors.models.run_config import CaseABoundary
from large_deviation_prefactors.systems.base import FixedPoint, FixedPointKind
from large_deviation_prefactors.utils.errors import AssumptionViolation, UsageError

UNIT_TOL = 1e-9


@dataclass(frozen=True)
class NonCharacteristicBoundary:
    """Parametric boundary curve with an exterior normal field."""

    curve: Callable[[np.ndarray], np.ndarray]
    normal: Callable[[np.ndarray], np.ndarray]
    s_min: float
    s_max: float
    interior: Callable[[np.ndarray], np.ndarray] | None = None
    kind: Literal["noncharacteristic"] = "noncharacteristic"

    def __post_init__(self) -> None:
        if self.s_max <= self.s_min:
            raise UsageError(f"empty boundary interval [{self.s_min}, {self.s_max}]")

    def points(self, s: np.ndarray) -> np.ndarray:
        """curve(s) for a (k,) array of parameters, shape (k, n)."""
        return np.asarray(self.curve(np.atleast_1d(np.asarray(s, dtype=float))), dtype=float)

    def point(self, s: float) -> np.ndarray:
        return self.points(np.array([s]))[0]

    def unit_normal(self, y: np.ndarray) -> np.ndarray:
        """Exterior normal at y, checked to have unit norm."""
        n = np.asarray(self.normal(np.asarray(y, dtype=float)), dtype=float)
        if abs(float(np.linalg.norm(n)) - 1.0) > UNIT_TOL:
            raise UsageError(f"boundary normal {n.tolist()} does not have unit norm")
        return n


@dataclass(frozen=True)
class CharacteristicBoundary:
    """Boundary containing a saddle point of the drift."""

    saddle: FixedPoint
    kind: Literal["characteristic"] = "characteristic"

    def __post_init__(self) -> None:
        if self.saddle.kind is not FixedPointKind.SADDLE:
            raise AssumptionViolation(
                "(B1)",
                f"fixed point {self.saddle.key!r} is {self.saddle.kind.value}, not a saddle",
            )


BoundarySpec = NonCharacteristicBoundary | CharacteristicBoundary


def line_boundary(cfg: CaseABoundary) -> NonCharacteristicBoundary:
    """Straight segment origin + s * direction with a constant exterior normal."""
    origin = np.asarray(cfg.origin, dtype=float)
    direction = np.asarray(cfg.direction, dtype=float)
    normal = np.asarray(cfg.normal, dtype=float)
    if abs(float(np.linalg.norm(normal)) - 1.0) > UNIT_TOL:
        raise UsageError(f"boundary normal {cfg.normal} does not have unit norm")
    if abs(float(normal @ direction)) > UNIT_TOL * max(1.0, float(np.linalg.norm(direction))):
        raise UsageError("boundary normal is not orthogonal to the line direction")

    return NonCharacteristicBoundary(
        curve=lambda s: origin + s[:, None] * direction,
        normal=lambda y: normal,
        s_min=cfg.s_min,
        s_max=cfg.s_max,
        interior=lambda x: (np.atleast_2d(x) - origin) @ normal < 0,
    )
