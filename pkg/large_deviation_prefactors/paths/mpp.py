"""
Most probable exit paths

The path from x_bar to the exit point x* is traced backwards from x* along the
arc-length flow

    d(phi)/d(sigma) = -(b(phi) + grad V(phi)) / |b(phi)|

with fixed-step RK4 until it enters the delta_2 ball around x_bar. For an exact
decomposition |b + grad V| = |b|, so the flow has unit speed; the ratio
|b + grad V| / |b| along the path is kept as a quality diagnostic.

The divergence line integral

    int_0^L div l(phi_sigma) / |b(phi_sigma)| d(sigma)

is evaluated by the trapezoidal rule on the path nodes.
"""

import dataclasses
from collections.abc import Callable
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from large_deviation_prefactors.fields.potential_field import PotentialField
from large_deviation_prefactors.models.path_summary import PathSummary
from large_deviation_prefactors.paths.boundaries import NonCharacteristicBoundary
from large_deviation_prefactors.systems.base import DriftSystem, FixedPoint
from large_deviation_prefactors.utils.errors import NumericalError, UsageError, require_finite
from large_deviation_prefactors.utils.io_utils import write_csv

SCAN_SAMPLES = 201
PARAMETER_TOL = 1e-8
STALL_SPEED = 1e-12
SINGULARITY_LIMIT = 1e6

PathStatus = Literal["converged", "max_length", "stalled"]


@dataclass(frozen=True)
class BoundaryMinimum:
    """argmin of V along a boundary curve."""

    point: np.ndarray
    parameter: float
    value: float
    warnings: list[str] = dataclasses.field(default_factory=list)


@dataclass(frozen=True)
class PathResult:
    """Polyline from the x_bar neighbourhood to x*, with arc length per node."""

    points: np.ndarray
    sigma: np.ndarray
    status: PathStatus
    start_point: np.ndarray
    speed_ratio: np.ndarray
    div_integral: float | None = None
    stall_location: np.ndarray | None = None
    warnings: list[str] = dataclasses.field(default_factory=list)

    @property
    def length(self) -> float:
        return float(self.sigma[-1]) if self.sigma.size else 0.0

    @property
    def n_nodes(self) -> int:
        return int(self.points.shape[0])


def exit_point_on_boundary(
    field: PotentialField, boundary: NonCharacteristicBoundary
) -> BoundaryMinimum:
    """
    Minimize V along a non-characteristic boundary.

    A scan over 201 evenly spaced parameters picks the bracket (smallest
    parameter on exact ties); a bounded golden-section search refines it to
    1e-8 in the parameter. Constant V on the curve returns the scan midpoint.
    """
    grid = np.linspace(boundary.s_min, boundary.s_max, SCAN_SAMPLES)
    values = field.quasipotential(boundary.points(grid))
    if not np.all(np.isfinite(values)):
        raise NumericalError("non-finite quasipotential on the boundary scan")

    if float(np.max(values) - np.min(values)) == 0.0:
        mid = SCAN_SAMPLES // 2
        s = float(grid[mid])
        return BoundaryMinimum(
            boundary.point(s), s, float(values[mid]), ["V is constant along the boundary"]
        )

    k = int(np.argmin(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, SCAN_SAMPLES - 1)]
    result = minimize_scalar(
        lambda s: float(field.quasipotential(boundary.points(np.array([s])))[0]),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": PARAMETER_TOL},
    )
    s_star, v_star = float(result.x), float(result.fun)
    if v_star > values[k]:
        s_star, v_star = float(grid[k]), float(values[k])

    warnings: list[str] = []
    if k in (0, SCAN_SAMPLES - 1):
        warnings.append(
            f"minimum of V at the boundary interval endpoint s={s_star:.6g}; "
            "the boundary interval may be too short"
        )
    return BoundaryMinimum(boundary.point(s_star), s_star, v_star, warnings)


def saddle_seed(
    system: DriftSystem, saddle: FixedPoint, delta1: float, x_bar: np.ndarray
) -> tuple[np.ndarray, list[str]]:
    """
    Start point x_sad + delta1 * e_u, e_u the unstable eigenvector oriented toward x_bar.

    Raises:
        AssumptionViolation: the saddle does not have a single positive eigenvalue (B1)
    """
    x_bar = system.check_point(x_bar)
    e_u = saddle.unstable_direction()
    if float(e_u @ (x_bar - saddle.location)) < 0:
        e_u = -e_u
    warnings: list[str] = []
    if delta1 == 0:
        warnings.append("delta1 = 0: the path starts at the saddle itself")
    return saddle.location + delta1 * e_u, warnings


def _rhs(field: PotentialField, x: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Flow direction, |b| and |G| at one point."""
    b = field.system.drift(x)
    g = field.mpp_velocity(x)
    speed = float(np.linalg.norm(b))
    if speed < STALL_SPEED:
        return np.zeros_like(x), speed, float(np.linalg.norm(g))
    return -g / speed, speed, float(np.linalg.norm(g))


def integrate_mpp(
    field: PotentialField,
    x_star: np.ndarray | list[float],
    x_bar: np.ndarray | list[float],
    delta2: float,
    sigma_step: float,
    max_length: float,
) -> PathResult:
    """
    RK4 integration of the reversed arc-length flow from x* into the delta_2 ball.

    The returned nodes run from the x_bar end to x*.

    Raises:
        UsageError: x* equals x_bar, or non-positive step / length
    """
    system = field.system
    start = system.check_point(x_star).astype(float)
    target = system.check_point(x_bar)
    if sigma_step <= 0 or max_length <= 0:
        raise UsageError("sigma_step and max_length must be positive")
    if np.array_equal(start, target):
        raise UsageError("exit point coincides with the stable point")

    nodes = [start]
    ratios: list[float] = []
    status: PathStatus = "max_length"
    stall: np.ndarray | None = None
    max_steps = int(np.ceil(max_length / sigma_step))

    x = start
    for _ in range(max_steps + 1):
        k1, speed, g_norm = _rhs(field, x)
        if speed >= STALL_SPEED:
            ratios.append(g_norm / speed)
        if float(np.linalg.norm(x - target)) <= delta2:
            status = "converged"
            break
        if speed < STALL_SPEED:
            status, stall = "stalled", x.copy()
            break
        if len(nodes) > max_steps:
            break
        k2, _, _ = _rhs(field, x + 0.5 * sigma_step * k1)
        k3, _, _ = _rhs(field, x + 0.5 * sigma_step * k2)
        k4, _, _ = _rhs(field, x + sigma_step * k3)
        x = x + sigma_step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NumericalError(f"path integration left the finite range after {len(nodes)} nodes")
        nodes.append(x)

    points = np.array(nodes[::-1])
    sigma = sigma_step * np.arange(points.shape[0], dtype=float)
    warnings: list[str] = []
    if status == "stalled":
        near = system.near_fixed_point(stall, 1e-6) if stall is not None else False
        warnings.append(
            f"|b| vanished at {np.round(stall, 6).tolist()}"
            + (" (a registered fixed point)" if near else " away from registered fixed points")
        )
    elif status == "max_length":
        warnings.append(f"path did not reach the delta2 ball within arc length {max_length:g}")
    return PathResult(
        points=points,
        sigma=sigma,
        status=status,
        start_point=start,
        speed_ratio=np.array(ratios[::-1]),
        stall_location=stall,
        warnings=warnings,
    )


def divergence_integral(
    field: PotentialField,
    path: PathResult,
    subtract_baseline: bool = True,
    saddle: np.ndarray | None = None,
) -> float:
    """
    Trapezoidal integral of div l / |b| over the path's arc length.

    With `subtract_baseline`, div l(x_bar) is subtracted on the half of the
    path nearest x_bar and, when `saddle` is given, div l(saddle) on the half
    nearest the saddle.

    Raises:
        NumericalError: the integrand exceeds 1e6 (path passes too close to a fixed point)
    """
    if path.n_nodes < 2:
        return 0.0
    sample = field.evaluate(path.points)
    speed = np.linalg.norm(field.system.drift(path.points), axis=1)
    div_l = sample.div_l.copy()

    if subtract_baseline:
        near_x_bar = path.sigma <= 0.5 * path.length
        div_l[near_x_bar] -= field.sample(field.x_bar).div_l
        if saddle is not None:
            div_l[~near_x_bar] -= field.sample(saddle).div_l

    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = div_l / speed
    bad = np.flatnonzero(~np.isfinite(integrand) | (np.abs(integrand) > SINGULARITY_LIMIT))
    if bad.size:
        node = path.points[bad[0]]
        raise NumericalError(
            f"divergence integrand {integrand[bad[0]]!r} at {np.round(node, 6).tolist()}: "
            "near-fixed-point singularity (div l does not vanish at the limiting fixed point)"
        )
    return float(np.trapezoid(integrand, path.sigma))


def with_divergence(
    field: PotentialField,
    path: PathResult,
    subtract_baseline: bool = True,
    saddle: np.ndarray | None = None,
) -> PathResult:
    """Copy of `path` carrying its divergence integral."""
    return replace(
        path, div_integral=divergence_integral(field, path, subtract_baseline, saddle)
    )


@dataclass(frozen=True)
class FlowIntegrals:
    """Divergence integrals along the reversed flow from a batch of start points."""

    integrals: np.ndarray
    escaped: np.ndarray
    unfinished: np.ndarray


def _reversed_flow(field: PotentialField, y: np.ndarray, baseline: float) -> np.ndarray:
    batch = field.evaluate(y)
    velocity = -(0.5 * batch.grad_v + batch.l)
    return np.column_stack([velocity, batch.div_l - baseline])


def reversed_flow_integrals(
    field: PotentialField,
    starts: np.ndarray,
    interior: Callable[[np.ndarray], np.ndarray] | None,
    delta2: float,
    time_step: float,
    max_time: float,
    subtract_baseline: bool = True,
) -> FlowIntegrals:
    """
    int_0^T div l(y_t) dt along dy/dt = -(1/2 grad V + l) for every start at once.

    This is the time form of the arc-length integral taken along a most probable
    path. Each start is followed with RK4 until it enters the delta_2 ball around
    x_bar. A start whose flow leaves `interior` is flagged as escaped; one still
    outside the ball after `max_time` is flagged as unfinished.
    """
    if time_step <= 0 or max_time <= 0:
        raise UsageError("time_step and max_time must be positive")
    y = np.array(field.system.check_point(starts), dtype=float, ndmin=2)
    baseline = float(field.sample(field.x_bar).div_l) if subtract_baseline else 0.0
    k = y.shape[0]
    integrals = np.zeros(k)
    escaped = np.zeros(k, dtype=bool)
    active = np.ones(k, dtype=bool)

    h, n = time_step, field.dim
    for _ in range(int(np.ceil(max_time / h))):
        active &= np.linalg.norm(y - field.x_bar, axis=1) > delta2
        if not np.any(active):
            break
        state = np.column_stack([y[active], integrals[active]])
        k1 = _reversed_flow(field, state[:, :n], baseline)
        k2 = _reversed_flow(field, state[:, :n] + 0.5 * h * k1[:, :n], baseline)
        k3 = _reversed_flow(field, state[:, :n] + 0.5 * h * k2[:, :n], baseline)
        k4 = _reversed_flow(field, state[:, :n] + h * k3[:, :n], baseline)
        state = state + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        require_finite(state, "reversed flow from the boundary nodes")
        y[active], integrals[active] = state[:, :n], state[:, n]
        if interior is not None:
            left = active & ~np.asarray(interior(y), dtype=bool)
            escaped |= left
            active &= ~left

    unfinished = active & (np.linalg.norm(y - field.x_bar, axis=1) > delta2)
    return FlowIntegrals(integrals=integrals, escaped=escaped, unfinished=unfinished)


def summarize_path(path: PathResult, case: Literal["A", "B"], backing: str) -> PathSummary:
    ratios = path.speed_ratio if path.speed_ratio.size else np.array([np.nan])
    return PathSummary(
        case=case,
        backing=backing,
        status=path.status,
        start_point=path.start_point.tolist(),
        end_point=path.points[0].tolist(),
        length=path.length,
        nodes=path.n_nodes,
        div_integral=path.div_integral,
        speed_ratio_min=float(np.min(ratios)),
        speed_ratio_max=float(np.max(ratios)),
        stall_location=None if path.stall_location is None else path.stall_location.tolist(),
        warnings=list(path.warnings),
    )


def write_path_csv(field: PotentialField, path: PathResult, filepath: str | Path) -> Path:
    """Columns: sigma, x1..xn, V, divl, |b|."""
    sample = field.evaluate(path.points)
    speed = np.linalg.norm(field.system.drift(path.points), axis=1)
    header = ["sigma", *[f"x{i + 1}" for i in range(field.dim)], "V", "divl", "|b|"]
    rows = [
        (path.sigma[k], *path.points[k], sample.V[k], sample.div_l[k], speed[k])
        for k in range(path.n_nodes)
    ]
    return write_csv(filepath, header, rows)
