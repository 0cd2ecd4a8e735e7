"""
Hessian equations at fixed points

With Q = -grad b(x0) at a fixed point x0, the Hessian H of the
quasipotential satisfies the algebraic Riccati equation

    H^2 = Q^T H + H Q                 (adopted convention)

At a stable point H = Sigma^{-1}, where Sigma solves the Lyapunov equation
Q Sigma + Sigma Q^T = I. At a saddle we refine a seed (usually the finite
difference Hessian of a field) by Newton iteration on the Riccati residual.

The halved convention (reported as "paper") rescales H by 1/2: 2 H^2 = Q^T H + H Q.
"""

import numpy as np
import scipy.linalg as spla

from large_deviation_prefactors.models.prefactor_report import HessianResult
from large_deviation_prefactors.utils.errors import AssumptionViolation, NumericalError

RICCATI_TOL = 1e-10
RICCATI_MAX_ITERATIONS = 50


def _symmetric(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def riccati_residual(h: np.ndarray, q: np.ndarray, paper_convention: bool = False) -> float:
    """Frobenius norm of H^2 - Q^T H - H Q (2H^2 - ... in the halved convention)."""
    h = np.asarray(h, dtype=float)
    q = np.asarray(q, dtype=float)
    scale = 2.0 if paper_convention else 1.0
    return float(np.linalg.norm(scale * h @ h - q.T @ h - h @ q))


def _result(
    h: np.ndarray,
    q: np.ndarray,
    method: str,
    paper_convention: bool,
    iterations: int = 0,
) -> HessianResult:
    if paper_convention:
        h = 0.5 * h
    h = _symmetric(h)
    return HessianResult(
        matrix=h.tolist(),
        method=method,
        residuals={"riccati": riccati_residual(h, q, paper_convention)},
        eigenvalues=np.linalg.eigvalsh(h).tolist(),
        iterations=iterations,
        convention="paper" if paper_convention else "adopted",
    )


def lyapunov_hessian(q: np.ndarray, paper_convention: bool = False) -> HessianResult:
    """
    Hessian at a stable fixed point from the Lyapunov equation.

    Args:
        q: Q = -grad b at the point; every eigenvalue must have positive real part
        paper_convention: Return H/2 instead of H

    Raises:
        AssumptionViolation: Q is not stable (the point is a saddle or unstable)
    """
    q = np.asarray(q, dtype=float)
    eig = np.linalg.eigvals(q)
    if np.any(eig.real <= 0):
        raise AssumptionViolation(
            "stable fixed point",
            f"-grad b has eigenvalues {np.round(eig, 6).tolist()}; "
            "use the Riccati Newton solver at saddles",
        )

    sigma = _symmetric(spla.solve_continuous_lyapunov(q, np.eye(q.shape[0])))
    if np.any(np.linalg.eigvalsh(sigma) <= 0):
        raise NumericalError("Lyapunov solution is not positive definite")

    h = _symmetric(np.linalg.inv(sigma))
    return _result(h, q, "lyapunov", paper_convention)


def riccati_newton(
    q: np.ndarray,
    seed: np.ndarray,
    paper_convention: bool = False,
    tol: float = RICCATI_TOL,
    max_iterations: int = RICCATI_MAX_ITERATIONS,
) -> HessianResult:
    """
    Solve H^2 = Q^T H + H Q by Newton's method from `seed`.

    The seed is given in the adopted convention. Each Newton step solves the
    Sylvester equation (H - Q^T) E + E (H - Q) = -R(H).

    Raises:
        NumericalError: No convergence within `max_iterations`, or a singular step
    """
    q = np.asarray(q, dtype=float)
    h = _symmetric(np.asarray(seed, dtype=float))

    residual = np.inf
    for iteration in range(max_iterations + 1):
        r = h @ h - q.T @ h - h @ q
        residual = float(np.linalg.norm(r))
        if not np.isfinite(residual):
            raise NumericalError(f"Riccati Newton diverged at iteration {iteration}")
        if residual <= tol:
            return _result(h, q, "riccati_newton", paper_convention, iterations=iteration)
        if iteration == max_iterations:
            break

        try:
            step = spla.solve_sylvester(h - q.T, h - q, -r)
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"singular Newton step at iteration {iteration}") from e
        h = _symmetric(h + step)

    raise NumericalError(
        f"Riccati Newton did not converge in {max_iterations} iterations "
        f"(last residual {residual:.3e})"
    )
