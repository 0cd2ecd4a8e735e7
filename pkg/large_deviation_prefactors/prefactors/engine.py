"""
Prefactor engine

Assembles mean-exit-time prefactors from a field, Hessians and a most probable
path. With the quasi-stationary density written through the WKB prefactor

    C(x) = sqrt(det H_bar / (2 pi eps)^n) * exp(-I(x)),   I(x) = int div l / |b| d(sigma)

the two boundary cases read

    Case A (non-characteristic):  L = (1/mu*) sqrt(2 pi eps det h* / det H_bar) exp(+I)
    Case B (characteristic):      L = (pi/lambda*) sqrt(|det H*| / det H_bar) exp(+I)

and the mean exit time is L * exp(V* / eps).

The Case A expression is the second-order expansion of the boundary flux
integral around x*. On a planar system the flux can instead be integrated
along the boundary curve, which keeps the variation of mu and C over the
sqrt(eps) window that the expansion drops.
"""

import math
from collections.abc import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from large_deviation_prefactors.fields.hessian import hessian_fd
from large_deviation_prefactors.fields.matrix_equations import lyapunov_hessian, riccati_newton
from large_deviation_prefactors.fields.potential_field import PotentialField
from large_deviation_prefactors.models.prefactor_report import (
    BoundaryFlux,
    HessianResult,
    PrefactorReport,
    Provenance,
)
from large_deviation_prefactors.models.run_config import CaseABoundary, HessianSettings
from large_deviation_prefactors.paths.boundaries import NonCharacteristicBoundary
from large_deviation_prefactors.paths.mpp import PathResult, reversed_flow_integrals
from large_deviation_prefactors.systems.base import FixedPoint
from large_deviation_prefactors.utils.errors import (
    AssumptionViolation,
    NumericalError,
    UsageError,
    require_finite,
)

EXPONENT_LIMIT = 700.0
UNIT_TOL = 1e-9
TRANSVERSALITY_SAMPLES = 101


def _unit(normal: np.ndarray | list[float]) -> np.ndarray:
    n = np.asarray(normal, dtype=float)
    if abs(float(np.linalg.norm(n)) - 1.0) > UNIT_TOL:
        raise UsageError(f"normal {n.tolist()} does not have unit norm")
    return n


def normal_speed(field: PotentialField, x: np.ndarray, normal: np.ndarray) -> float:
    """<1/2 grad V(x) + l(x), n> without any sign check."""
    n = _unit(normal)
    sample = field.sample(x)
    return float((0.5 * sample.grad_v + sample.l) @ n)


def mu_star(field: PotentialField, x_star: np.ndarray, normal: np.ndarray) -> float:
    """
    Normal speed of the MPP at the exit point.

    Raises:
        AssumptionViolation: mu* <= 0 (A3)
    """
    mu = normal_speed(field, x_star, normal)
    if mu <= 0:
        raise AssumptionViolation(
            "(A3)", f"mu* = {mu:.6g} at {np.round(x_star, 6).tolist()} is not positive"
        )
    return mu


def tangent_basis(normal: np.ndarray) -> np.ndarray:
    """
    Orthonormal basis of the hyperplane orthogonal to `normal`, shape (n, n-1).

    Gram-Schmidt over the coordinate vectors e_1, e_2, ... in order.
    """
    n_vec = _unit(normal)
    dim = n_vec.shape[0]
    basis: list[np.ndarray] = [n_vec]
    for k in range(dim):
        v = np.eye(dim)[k]
        for u in basis:
            v = v - (v @ u) * u
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == dim:
            break
    return np.array(basis[1:]).T.reshape(dim, dim - 1)


def tangential_hessian_det(
    field: PotentialField, x_star: np.ndarray, normal: np.ndarray, step: float = 1e-3
) -> tuple[float, HessianResult]:
    """
    det(B^T grad^2 V(x*) B) over an orthonormal tangent basis B.

    Raises:
        AssumptionViolation: the restricted Hessian is not positive definite (A3)
    """
    hess = hessian_fd(field, x_star, step)
    basis = tangent_basis(normal)
    restricted = basis.T @ hess.array @ basis
    eigenvalues = np.linalg.eigvalsh(restricted) if restricted.size else np.array([])
    if np.any(eigenvalues <= 0):
        raise AssumptionViolation(
            "(A3)",
            "Hessian restricted to the boundary has eigenvalues "
            f"{np.round(eigenvalues, 6).tolist()}",
        )
    return float(np.linalg.det(restricted)), hess


def _relative_discrepancy(a: HessianResult, b: HessianResult) -> float:
    scale = float(np.max(np.abs(b.array)))
    return float(np.max(np.abs(a.array - b.array))) / (scale if scale > 0 else 1.0)


def stable_hessian(
    field: PotentialField, settings: HessianSettings
) -> tuple[HessianResult, HessianResult | None, list[str]]:
    """
    H_bar at x_bar from the configured source, plus the other route as cross-check.

    Raises:
        AssumptionViolation: H_bar is not positive definite
    """
    warnings: list[str] = []
    fd = hessian_fd(field, field.x_bar, settings.fd_step)
    try:
        lyap: HessianResult | None = lyapunov_hessian(-field.system.jacobian(field.x_bar))
    except NumericalError as e:
        lyap = None
        warnings.append(f"Lyapunov cross-check of H_bar unavailable: {e}")

    if settings.hbar_source == "lyapunov":
        if lyap is None:
            raise AssumptionViolation("stable fixed point", "no Lyapunov solution at x_bar")
        primary, crosscheck = lyap, fd
    else:
        primary, crosscheck = fd, lyap

    if min(primary.eigenvalues) <= 0:
        raise AssumptionViolation(
            "stable fixed point",
            f"H_bar has eigenvalues {np.round(primary.eigenvalues, 6).tolist()}",
        )
    if crosscheck is not None:
        gap = _relative_discrepancy(primary, crosscheck)
        if gap > settings.crosscheck_tolerance:
            warnings.append(
                f"H_bar from {primary.method} and {crosscheck.method} differ by {gap:.1%}"
            )
    return primary, crosscheck, warnings


def saddle_hessian(
    field: PotentialField, saddle: FixedPoint, settings: HessianSettings
) -> tuple[HessianResult, HessianResult | None, list[str]]:
    """
    H* at the saddle: finite differences of the field and Riccati-Newton from that seed.

    Raises:
        AssumptionViolation: H* does not have n-1 positive and one negative eigenvalue (B4)
    """
    warnings: list[str] = []
    fd = hessian_fd(field, saddle.location, settings.fd_step)
    try:
        newton: HessianResult | None = riccati_newton(
            -field.system.jacobian(saddle.location), fd.array
        )
    except NumericalError as e:
        newton = None
        warnings.append(f"Riccati cross-check of H* unavailable: {e}")

    if settings.hbar_source == "lyapunov" and newton is not None:
        primary, crosscheck = newton, fd
    else:
        primary, crosscheck = fd, newton

    dim = field.dim
    if primary.signature != (dim - 1, 1):
        raise AssumptionViolation(
            "(B4)",
            f"H* has signature {primary.signature}, expected ({dim - 1}, 1)",
        )
    if crosscheck is not None:
        gap = _relative_discrepancy(primary, crosscheck)
        if gap > settings.crosscheck_tolerance:
            warnings.append(f"H* from {primary.method} and {crosscheck.method} differ by {gap:.1%}")
    return primary, crosscheck, warnings


def _path_integral(path: PathResult) -> float:
    if path.status != "converged":
        raise UsageError(f"prefactor needs a converged path, got status {path.status!r}")
    if path.div_integral is None:
        raise UsageError("path carries no divergence integral")
    return path.div_integral


def _transversality_warnings(
    field: PotentialField, boundary: NonCharacteristicBoundary, x_star: np.ndarray, window: float
) -> list[str]:
    grid = np.linspace(boundary.s_min, boundary.s_max, TRANSVERSALITY_SAMPLES)
    points = boundary.points(grid)
    near = np.linalg.norm(points - x_star, axis=1) <= window
    if not np.any(near):
        return []
    flux = np.array(
        [field.system.drift(y) @ boundary.unit_normal(y) for y in points[near]], dtype=float
    )
    bad = np.flatnonzero(flux >= 0)
    if bad.size == 0:
        return []
    worst = points[near][bad[np.argmax(flux[bad])]]
    return [
        f"(A1) <b, n> >= 0 at {bad.size} of {flux.size} boundary samples within {window:g} "
        f"of x*; worst at {np.round(worst, 4).tolist()}"
    ]


def _curve_parameter(boundary: NonCharacteristicBoundary, x: np.ndarray) -> float:
    result = minimize_scalar(
        lambda s: float(np.sum((boundary.point(s) - x) ** 2)),
        bounds=(boundary.s_min, boundary.s_max),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(result.x)


def boundary_flux(
    field: PotentialField,
    boundary: NonCharacteristicBoundary,
    path: PathResult,
    cfg: CaseABoundary,
    delta2: float,
    subtract_baseline: bool = True,
) -> tuple[BoundaryFlux | None, list[str]]:
    """
    Quadrature of the exit flux mu(y) C(y) exp(-V(y)/eps) along a planar boundary curve.

    C(y) is carried to every node by the reversed flow and tied to the MPP's
    own integral at x*. Nodes with mu <= 0, or whose reversed flow leaves the
    domain before reaching x_bar, receive no density and weigh zero. As eps
    goes to 0 the result tends to the second-order expansion around x*.
    """
    if field.dim != 2:
        return None, [f"boundary flux quadrature needs a planar system, got dimension {field.dim}"]
    x_star = path.start_point
    s_star = _curve_parameter(boundary, x_star)
    s = np.linspace(s_star - cfg.flux_half_width, s_star + cfg.flux_half_width, cfg.flux_nodes)
    nodes = boundary.points(s)

    batch = field.evaluate(nodes)
    normals = np.array([boundary.unit_normal(y) for y in nodes])
    mu = np.sum((0.5 * batch.grad_v + batch.l) * normals, axis=1)
    stretch = np.linalg.norm(np.gradient(nodes, s, axis=0), axis=1)
    trapezoid = np.full(s.size, s[1] - s[0])
    trapezoid[[0, -1]] *= 0.5

    flows = reversed_flow_integrals(
        field,
        np.vstack([x_star, nodes]),
        boundary.interior,
        delta2,
        cfg.flux_time_step,
        cfg.flux_max_time,
        subtract_baseline,
    )
    if flows.escaped[0] or flows.unfinished[0]:
        return None, ["reversed flow from x* does not reach x_bar; boundary flux skipped"]

    relative = flows.integrals[1:] - flows.integrals[0]
    dark = (mu <= 0) | flows.escaped[1:] | flows.unfinished[1:]
    weights = np.where(
        dark, 0.0, mu * np.exp(-_path_integral(path) - relative) * stretch * trapezoid
    )
    require_finite(weights, "boundary flux weights")

    warnings: list[str] = []
    unfinished = int(np.count_nonzero(flows.unfinished[1:]))
    if unfinished:
        warnings.append(
            f"{unfinished} boundary nodes did not reach x_bar within time {cfg.flux_max_time:g}"
        )
    flux = BoundaryFlux(
        parameters=s.tolist(),
        excess=(batch.V - field.value(x_star)).tolist(),
        weights=weights.tolist(),
        dark_nodes=int(np.count_nonzero(dark)),
    )
    return flux, warnings


def prefactor_case_a(
    field: PotentialField,
    boundary: NonCharacteristicBoundary,
    path: PathResult,
    epsilons: Sequence[float],
    settings: HessianSettings | None = None,
    provenance: Provenance | None = None,
    transversality_window: float = 0.25,
    flux: CaseABoundary | None = None,
    delta2: float = 0.01,
) -> PrefactorReport:
    """
    Case A prefactor L = (1/mu*) sqrt(2 pi eps det h* / det H_bar) exp(I), ~ sqrt(eps).

    With `flux` enabled the report also carries the boundary flux quadrature,
    which then provides L(eps) for mean exit times.

    Args:
        field: Quasipotential field
        boundary: Non-characteristic boundary
        path: Converged MPP ending at x*, carrying its divergence integral
        epsilons: Noise levels to tabulate
        settings: Hessian settings (defaults if None)
        provenance: Backing/settings snapshot for the report
        transversality_window: Radius around x* where (A1) is checked
        flux: Boundary settings enabling the flux quadrature (skipped if None)
        delta2: Radius around x_bar ending the reversed flows of the quadrature

    Raises:
        AssumptionViolation: mu* <= 0, or non-positive tangential / stable Hessian
    """
    settings = settings or HessianSettings()
    div_integral = _path_integral(path)
    x_star = path.start_point
    normal = boundary.unit_normal(x_star)

    mu = mu_star(field, x_star, normal)
    det_h_star, _ = tangential_hessian_det(field, x_star, normal, settings.fd_step)
    h_bar, h_bar_check, warnings = stable_hessian(field, settings)
    warnings = list(path.warnings) + warnings
    warnings += _transversality_warnings(field, boundary, x_star, transversality_window)

    def coefficient(det_bar: float) -> float:
        return math.sqrt(2.0 * math.pi * det_h_star / det_bar) / mu * math.exp(div_integral)

    l_coefficient = coefficient(h_bar.determinant)
    halved_coefficient = None
    if settings.riccati_paper_convention:
        halved = lyapunov_hessian(-field.system.jacobian(field.x_bar), paper_convention=True)
        halved_coefficient = coefficient(halved.determinant)

    flux_report = None
    if flux is not None and flux.boundary_flux:
        flux_report, flux_warnings = boundary_flux(field, boundary, path, flux, delta2)
        warnings += flux_warnings

    report = PrefactorReport(
        case="A",
        v_star=field.value(x_star),
        exit_point=x_star.tolist(),
        mu_star=mu,
        det_h_star=det_h_star,
        h_bar=h_bar,
        h_bar_crosscheck=h_bar_check,
        div_integral=div_integral,
        l_coefficient=l_coefficient,
        epsilon_power=0.5,
        epsilons=list(epsilons),
        prefactors=[l_coefficient * math.sqrt(eps) for eps in epsilons],
        boundary_flux=flux_report,
        paper_convention_coefficient=halved_coefficient,
        warnings=warnings,
        provenance=provenance or Provenance(backing=field.backing),
    )
    if flux_report is not None:
        report.flux_prefactors = [report.prefactor(eps) for eps in epsilons]
    return report


def prefactor_case_b(
    field: PotentialField,
    saddle: FixedPoint,
    path: PathResult,
    epsilons: Sequence[float] = (),
    settings: HessianSettings | None = None,
    provenance: Provenance | None = None,
) -> PrefactorReport:
    """
    Case B prefactor L = (pi/lambda*) sqrt(|det H*| / det H_bar) exp(I), independent of eps.

    The path runs from the x_bar neighbourhood to the saddle seed; its
    divergence integral should have been taken with the saddle baseline.

    Raises:
        AssumptionViolation: (B1) more than one unstable direction, or (B4) signature
    """
    settings = settings or HessianSettings()
    div_integral = _path_integral(path)
    saddle.unstable_direction()
    lambda_star = float(np.max(saddle.eigenvalues.real))

    h_bar, h_bar_check, warnings = stable_hessian(field, settings)
    h_star, h_star_check, star_warnings = saddle_hessian(field, saddle, settings)
    warnings = list(path.warnings) + warnings + star_warnings

    def coefficient(det_star: float, det_bar: float) -> float:
        return math.pi / lambda_star * math.sqrt(abs(det_star) / det_bar) * math.exp(div_integral)

    l_coefficient = coefficient(h_star.determinant, h_bar.determinant)
    halved_coefficient = None
    if settings.riccati_paper_convention:
        q_star = -field.system.jacobian(saddle.location)
        halved_star = riccati_newton(q_star, h_star.array, paper_convention=True)
        halved_bar = lyapunov_hessian(-field.system.jacobian(field.x_bar), paper_convention=True)
        halved_coefficient = coefficient(halved_star.determinant, halved_bar.determinant)

    return PrefactorReport(
        case="B",
        v_star=field.value(saddle.location),
        exit_point=saddle.location.tolist(),
        lambda_star=lambda_star,
        h_bar=h_bar,
        h_bar_crosscheck=h_bar_check,
        h_star=h_star,
        h_star_crosscheck=h_star_check,
        div_integral=div_integral,
        l_coefficient=l_coefficient,
        epsilon_power=0.0,
        epsilons=list(epsilons),
        prefactors=[l_coefficient for _ in epsilons],
        paper_convention_coefficient=halved_coefficient,
        warnings=warnings,
        provenance=provenance or Provenance(backing=field.backing),
    )


def wkb_prefactor(
    field: PotentialField,
    path: PathResult | None,
    epsilon: float,
    settings: HessianSettings | None = None,
) -> float:
    """
    C(x) = sqrt(det H_bar / (2 pi eps)^n) exp(-I) at the far end x of `path`.

    A None path (x = x_bar) has I = 0.
    """
    if epsilon <= 0:
        raise UsageError("epsilon must be positive")
    h_bar, _, _ = stable_hessian(field, settings or HessianSettings())
    div_integral = 0.0 if path is None or path.n_nodes < 2 else _path_integral(path)
    scale = (2.0 * math.pi * epsilon) ** field.dim
    return math.sqrt(h_bar.determinant / scale) * math.exp(-div_integral)


def mean_exit_time(report: PrefactorReport, epsilon: float) -> float:
    """
    L(eps) * exp(V* / eps).

    Raises:
        UsageError: eps <= 0
        NumericalError: V* / eps > 700 (double overflow); use a larger eps
    """
    if epsilon <= 0:
        raise UsageError("epsilon must be positive")
    exponent = report.v_star / epsilon
    if exponent > EXPONENT_LIMIT:
        raise NumericalError(
            f"V*/eps = {exponent:.1f} exceeds {EXPONENT_LIMIT:g}; use a larger epsilon"
        )
    return report.prefactor(epsilon) * math.exp(exponent)


MET_HEADER = ["epsilon", "L", "V_star", "met_formula"]


def met_table(report: PrefactorReport, epsilons: Sequence[float]) -> list[tuple[float, ...]]:
    """Rows (epsilon, L, V_star, met_formula)."""
    return [
        (eps, report.prefactor(eps), report.v_star, mean_exit_time(report, eps))
        for eps in epsilons
    ]
