"""
PathSummary Pydantic model

JSON side of a most-probable-path computation; the polyline itself is written
as CSV (sigma, x_1..x_n, V, divl, |b|).

Schema version: PathSummary@1
"""

from typing import Literal

from pydantic import BaseModel, Field


class PathSummary(BaseModel):
    """PathSummary@1 schema"""

    schema_version: str = Field(
        default="PathSummary@1", description="Schema version identifier", alias="schema"
    )
    case: Literal["A", "B"] = Field(..., description="Boundary case")
    backing: Literal["learned", "analytic"] = Field(..., description="Field backing")
    status: Literal["converged", "max_length", "stalled"] = Field(..., description="Termination")
    start_point: list[float] = Field(..., description="x* the reverse integration started from")
    end_point: list[float] = Field(..., description="Last node (near x_bar when converged)")
    length: float = Field(..., description="Total arc length")
    nodes: int = Field(..., description="Number of nodes")
    div_integral: float | None = Field(default=None, description="Divergence line integral")
    speed_ratio_min: float = Field(..., description="min |G|/|b| along the path")
    speed_ratio_max: float = Field(..., description="max |G|/|b| along the path")
    stall_location: list[float] | None = Field(default=None, description="Where |b| vanished")
    warnings: list[str] = Field(default_factory=list, description="Non-fatal diagnostics")

    class Config:
        """Pydantic config."""

        populate_by_name = True
