"""
Exit regions

A region is described by a level function g with the trajectory inside the
domain while g(x) < 0; the first step with g >= 0 is the exit, and the crossing
time inside that step is interpolated linearly in g.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from large_deviation_prefactors.models.run_config import CaseABoundary
from large_deviation_prefactors.utils.errors import UsageError


class ExitRegion(ABC):
    """Complement of the domain D."""

    @abstractmethod
    def level(self, x: np.ndarray) -> np.ndarray:
        """g on a (B, n) batch; exit where g >= 0."""

    def exited(self, x: np.ndarray) -> np.ndarray:
        return self.level(np.atleast_2d(np.asarray(x, dtype=float))) >= 0


@dataclass(frozen=True)
class HalfSpaceExit(ExitRegion):
    """Exit once <normal, x> >= offset."""

    normal: np.ndarray
    offset: float

    def level(self, x: np.ndarray) -> np.ndarray:
        return x @ self.normal - self.offset


@dataclass(frozen=True)
class BallExit(ExitRegion):
    """Exit once |x - center| >= radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise UsageError("exit radius must be positive")

    def level(self, x: np.ndarray) -> np.ndarray:
        return np.linalg.norm(x - self.center, axis=1) - self.radius


def half_space_from_boundary(cfg: CaseABoundary) -> HalfSpaceExit:
    """Half-space beyond a straight Case A boundary, on the side its normal points to."""
    normal = np.asarray(cfg.normal, dtype=float)
    return HalfSpaceExit(normal=normal, offset=float(normal @ np.asarray(cfg.origin, dtype=float)))


def beyond_saddle(saddle: np.ndarray, x_bar: np.ndarray) -> HalfSpaceExit:
    """
    Half-space past the saddle, seen from x_bar.

    For the double-well benchmark this is x1 >= 0, the separatrix through the saddle.
    """
    direction = np.asarray(saddle, dtype=float) - np.asarray(x_bar, dtype=float)
    norm = float(np.linalg.norm(direction))
    if norm == 0:
        raise UsageError("saddle coincides with the stable point")
    normal = direction / norm
    return HalfSpaceExit(normal=normal, offset=float(normal @ saddle))
