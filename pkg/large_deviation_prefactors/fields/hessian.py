"""Finite-difference Hessian of a field's quasipotential."""

import numpy as np

from large_deviation_prefactors.fields.potential_field import PotentialField
from large_deviation_prefactors.models.prefactor_report import HessianResult
from large_deviation_prefactors.utils.errors import UsageError

DEFAULT_STEP = 1e-3


def _central(field: PotentialField, x: np.ndarray, step: float) -> np.ndarray:
    n = x.shape[0]
    shifts = step * np.eye(n)
    points = np.concatenate([x + shifts, x - shifts], axis=0)
    grad = field.evaluate(points).grad_v
    # column j holds d(grad V)/dx_j
    return ((grad[:n] - grad[n:]) / (2.0 * step)).T


def hessian_fd(
    field: PotentialField,
    x: np.ndarray | list[float],
    step: float = DEFAULT_STEP,
    richardson: bool = True,
) -> HessianResult:
    """
    Symmetrized central differences of grad V at `x`.

    With `richardson`, the h and h/2 estimates are combined as (4 H_{h/2} - H_h) / 3
    and their difference is reported as `richardson_error`.
    """
    if step <= 0:
        raise UsageError("finite-difference step must be positive")
    point = field.system.check_point(x)
    if point.ndim != 1:
        raise UsageError("hessian_fd expects a single point")

    coarse = _central(field, point, step)
    residuals: dict[str, float] = {}
    if richardson:
        fine = _central(field, point, step / 2.0)
        raw = (4.0 * fine - coarse) / 3.0
        residuals["richardson_error"] = float(np.max(np.abs(fine - coarse)))
    else:
        raw = coarse
    residuals["symmetry"] = float(np.max(np.abs(raw - raw.T)))

    h = 0.5 * (raw + raw.T)
    return HessianResult(
        matrix=h.tolist(),
        method="finite_difference",
        residuals=residuals,
        eigenvalues=np.linalg.eigvalsh(h).tolist(),
    )
