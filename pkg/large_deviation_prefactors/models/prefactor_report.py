"""
Prefactor artifacts

HessianResult and PrefactorReport Pydantic models. A report keeps every
intermediate (mu*, determinants, divergence integral, Hessians) so that a
disagreement with Monte Carlo can be traced to one factor.

Schema version: PrefactorReport@1
"""

import math
from typing import Any, ClassVar, Literal

import numpy as np
from pydantic import BaseModel, Field


class HessianResult(BaseModel):
    """A symmetric Hessian of V and how it was obtained."""

    matrix: list[list[float]] = Field(..., description="dim x dim symmetric matrix")
    method: Literal["finite_difference", "lyapunov", "riccati_newton"] = Field(
        ..., description="How the matrix was computed"
    )
    residuals: dict[str, float] = Field(
        default_factory=dict,
        description="riccati / richardson_error / symmetry residuals as applicable",
    )
    eigenvalues: list[float] = Field(default_factory=list, description="Ascending eigenvalues")
    iterations: int = Field(default=0, description="Newton iterations (riccati_newton only)")
    convention: Literal["adopted", "paper"] = Field(
        default="adopted", description="Riccati convention the matrix satisfies"
    )

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float)

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.array))

    @property
    def signature(self) -> tuple[int, int]:
        """(number of positive eigenvalues, number of negative eigenvalues)."""
        eig = np.asarray(self.eigenvalues)
        return int(np.count_nonzero(eig > 0)), int(np.count_nonzero(eig < 0))


class Provenance(BaseModel):
    """Where a report's numbers came from."""

    backing: Literal["learned", "analytic"] = Field(..., description="Field backing")
    system: str = Field(default="", description="Registered system key")
    checkpoint: str | None = Field(default=None, description="Checkpoint path for learned fields")
    tool_version: str = Field(default="", description="Package version")
    settings: dict[str, Any] = Field(default_factory=dict, description="Settings snapshot")


class BoundaryFlux(BaseModel):
    """
    Boundary flux quadrature of a Case A exit rate.

    The exit rate is sum_j w_j exp(-excess_j / eps) times the Gaussian
    normalisation sqrt(det H_bar / (2 pi eps)^n) of the quasi-stationary
    density, so L(eps) follows for any eps without re-integrating paths.
    """

    parameters: list[float] = Field(..., description="Curve parameters of the quadrature nodes")
    excess: list[float] = Field(..., description="V(y_j) - V* at each node")
    weights: list[float] = Field(
        ..., description="mu+(y_j) exp(-I(y_j)) |y'(s_j)| ds_j; zero where no density arrives"
    )
    dark_nodes: int = Field(
        default=0, description="Nodes without inflow or whose reversed flow misses x_bar"
    )

    def prefactor(self, epsilon: float, det_h_bar: float, dim: int) -> float:
        excess = np.asarray(self.excess, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        shift = float(np.min(excess[weights > 0])) if np.any(weights > 0) else 0.0
        rate = float(np.sum(weights * np.exp(-(excess - shift) / epsilon)))
        if rate <= 0:
            return math.inf
        scale = (2.0 * math.pi * epsilon) ** (0.5 * dim) / math.sqrt(det_h_bar)
        return scale / rate * math.exp(shift / epsilon)


class PrefactorReport(BaseModel):
    """
    PrefactorReport@1 schema

    Case A (non-characteristic boundary, prefactor ~ sqrt(eps)) or Case B
    (characteristic boundary through a saddle, prefactor independent of eps).
    The mean exit time is L(eps) * exp(V_star / eps). The leading-order
    prefactor is L_coefficient * eps ** epsilon_power; a Case A report that
    carries a boundary flux quadrature uses it for L(eps) instead.
    """

    schema_version: str = Field(
        default="PrefactorReport@1", description="Schema version identifier", alias="schema"
    )
    case: Literal["A", "B"] = Field(..., description="Boundary case")
    v_star: float = Field(..., description="Quasipotential at the exit point (barrier)")
    exit_point: list[float] = Field(..., description="x* (Case A) or the saddle (Case B)")
    mu_star: float | None = Field(default=None, description="Normal MPP speed at x* (Case A)")
    det_h_star: float | None = Field(
        default=None, description="Determinant of the tangential Hessian at x* (Case A)"
    )
    lambda_star: float | None = Field(
        default=None, description="Positive Jacobian eigenvalue at the saddle (Case B)"
    )
    h_bar: HessianResult = Field(..., description="Hessian of V at x_bar used in the formula")
    h_bar_crosscheck: HessianResult | None = Field(
        default=None, description="Hessian of V at x_bar from the other route"
    )
    h_star: HessianResult | None = Field(
        default=None, description="Hessian of V at the saddle (Case B)"
    )
    h_star_crosscheck: HessianResult | None = Field(
        default=None, description="Riccati-Newton refinement of h_star (Case B)"
    )
    div_integral: float = Field(..., description="Line integral of div l / |b| along the MPP")
    l_coefficient: float = Field(..., description="L(eps) / eps^epsilon_power")
    epsilon_power: float = Field(..., description="1/2 for Case A, 0 for Case B")
    epsilons: list[float] = Field(default_factory=list, description="Noise levels evaluated")
    prefactors: list[float] = Field(
        default_factory=list, description="Leading-order L(eps) per epsilon"
    )
    boundary_flux: BoundaryFlux | None = Field(
        default=None, description="Case A boundary flux quadrature"
    )
    flux_prefactors: list[float] = Field(
        default_factory=list, description="L(eps) per epsilon from the boundary flux"
    )
    paper_convention_coefficient: float | None = Field(
        default=None,
        description="L_coefficient recomputed with the halved (printed) Riccati solution",
    )
    warnings: list[str] = Field(default_factory=list, description="Non-fatal diagnostics")
    provenance: Provenance = Field(..., description="Backing and settings snapshot")

    def leading_prefactor(self, epsilon: float) -> float:
        return self.l_coefficient * epsilon**self.epsilon_power

    def prefactor(self, epsilon: float) -> float:
        """L(eps): the boundary flux quadrature when present, else the leading order."""
        if self.boundary_flux is None:
            return self.leading_prefactor(epsilon)
        return self.boundary_flux.prefactor(epsilon, self.h_bar.determinant, len(self.exit_point))

    class Config:
        """Pydantic config."""

        populate_by_name = True

        json_schema_extra: ClassVar[dict] = {
            "example": {
                "schema": "PrefactorReport@1",
                "case": "B",
                "v_star": 0.5,
                "exit_point": [0.0, 0.0],
                "lambda_star": 1.0,
                "div_integral": -0.7,
                "l_coefficient": 1.1,
                "epsilon_power": 0.0,
            }
        }
