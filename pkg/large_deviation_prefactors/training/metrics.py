"""
Approximation errors of a learned decomposition

    e_V = max_x |V_theta(x) - V(x)|^2 / max_x |V(x)|^2
    e_l = max_x |l_theta(x) - l(x)|^2 / max_x |l(x)|^2

The exact V is shifted so that V(x_bar) = 0, the gauge the learned field is
pinned to.
"""

import numpy as np

from large_deviation_prefactors.fields.potential_field import PotentialField
from large_deviation_prefactors.models.run_config import EvaluationGrid
from large_deviation_prefactors.models.train_history import ErrorMetrics
from large_deviation_prefactors.systems.doublewell import AnalyticBenchmark
from large_deviation_prefactors.utils.errors import NumericalError, UsageError


def grid_points(grid: EvaluationGrid) -> np.ndarray:
    """Lattice nodes, first axis outermost, as a (prod(shape), n) array."""
    region = grid.region
    if len(grid.shape) != region.dim:
        raise UsageError(f"grid shape {grid.shape} does not match region dimension {region.dim}")
    axes = [
        np.linspace(lo, hi, count) for lo, hi, count in zip(region.lower, region.upper, grid.shape)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def describe_grid(grid: EvaluationGrid) -> str:
    bounds = " x ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(grid.region.lower, grid.region.upper))
    return f"lattice {'x'.join(str(s) for s in grid.shape)} over {bounds}"


def approximation_errors(
    field: PotentialField,
    bench: AnalyticBenchmark,
    points: np.ndarray,
    description: str,
) -> ErrorMetrics:
    """
    e_V and e_l of `field` against `bench` over `points`.

    Args:
        field: Learned (or any) field
        bench: Exact decomposition
        points: (B, n) evaluation points
        description: Grid descriptor stored in the result

    Raises:
        NumericalError: the exact V vanishes on every point
    """
    points = bench.system.check_point(points)
    if points.ndim != 2 or points.shape[0] == 0:
        raise UsageError("approximation errors need a nonempty (B, n) point set")

    learned = field.evaluate(points)
    v_true = bench.quasipotential(points)
    l_true = bench.rotational(points)

    v_scale = float(np.max(v_true * v_true))
    l_scale = float(np.max(np.sum(l_true * l_true, axis=1)))
    if v_scale == 0.0:
        raise NumericalError("exact quasipotential vanishes on the evaluation set")

    dv = learned.V - v_true
    dl = learned.l - l_true
    l_error = float(np.max(np.sum(dl * dl, axis=1)))
    if l_scale == 0.0:
        # gradient systems: no l to normalise by, report the absolute error
        description = f"{description} (e_l absolute)"
    else:
        l_error /= l_scale
    return ErrorMetrics(
        e_v=float(np.max(dv * dv)) / v_scale,
        e_l=l_error,
        grid=description,
        n_points=int(points.shape[0]),
    )
