"""
Fixed-point search and classification

Registered fixed points are classified directly. For user-supplied systems a
grid of seeds is refined with a damped Newton solve (Powell's hybrid method
with the analytic Jacobian); seeds that fail to converge are reported, not raised.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import root

from large_deviation_prefactors.systems.base import DriftSystem, FixedPoint

RESIDUAL_TOL = 1e-10
MAX_ITERATIONS = 100
MERGE_RADIUS = 1e-6


@dataclass(frozen=True)
class SeedFailure:
    """A seed whose Newton refinement did not reach the residual tolerance."""

    seed: np.ndarray
    last_point: np.ndarray
    residual: float
    message: str


@dataclass(frozen=True)
class FixedPointSearch:
    """Outcome of a seeded search: merged, classified points plus per-seed failures."""

    fixed_points: list[FixedPoint] = field(default_factory=list)
    failures: list[SeedFailure] = field(default_factory=list)


def refine_fixed_point(
    system: DriftSystem, seed: np.ndarray
) -> tuple[np.ndarray, float, bool, str]:
    """
    Refine one seed towards a zero of the drift.

    Returns:
        (point, residual norm, converged flag, solver message)
    """
    seed = system.check_point(seed)
    sol = root(
        system.drift,
        seed,
        jac=system.jacobian,
        method="hybr",
        options={"xtol": 1e-14, "maxfev": MAX_ITERATIONS * (system.dim + 1)},
    )
    point = np.asarray(sol.x, dtype=float)
    residual = float(np.linalg.norm(system.drift(point)))
    converged = bool(np.all(np.isfinite(point))) and residual <= RESIDUAL_TOL
    return point, residual, converged, str(sol.message)


def search_fixed_points(system: DriftSystem, seeds: np.ndarray) -> FixedPointSearch:
    """
    Refine every seed, merge duplicates and classify the survivors.

    Args:
        system: Drift system
        seeds: Array of shape (k, dim)

    Returns:
        FixedPointSearch with points keyed "fp0", "fp1", ... in discovery order
    """
    seeds = np.atleast_2d(system.check_point(seeds))
    found: list[FixedPoint] = []
    failures: list[SeedFailure] = []

    for seed in seeds:
        point, residual, converged, message = refine_fixed_point(system, seed)
        if not converged:
            failures.append(
                SeedFailure(seed=seed, last_point=point, residual=residual, message=message)
            )
            continue
        if any(np.linalg.norm(point - fp.location) < MERGE_RADIUS for fp in found):
            continue
        found.append(system.classify_point(f"fp{len(found)}", point))

    return FixedPointSearch(fixed_points=found, failures=failures)


def classify_fixed_points(
    system: DriftSystem, seeds: np.ndarray | None = None
) -> list[FixedPoint]:
    """
    Classified fixed points of `system`.

    Without seeds, the registered catalog is returned. With seeds, the catalog is
    extended by the points found from the seeds (failed seeds are dropped; use
    search_fixed_points to inspect them).
    """
    points = list(system.fixed_points)
    if seeds is None:
        return points
    for fp in search_fixed_points(system, seeds).fixed_points:
        if not any(np.linalg.norm(fp.location - known.location) < MERGE_RADIUS for known in points):
            points.append(fp)
    return points


def eigen_directions(fp: FixedPoint) -> list[tuple[complex, np.ndarray]]:
    """(eigenvalue, unit eigenvector) pairs of the Jacobian at a fixed point."""
    pairs = []
    for k, value in enumerate(fp.eigenvalues):
        vec = fp.eigenvectors[:, k]
        pairs.append((complex(value), vec / np.linalg.norm(vec)))
    return pairs
