"""
Monte Carlo artifacts

ExitTimeStats (measured mean exit times) and ComparisonTable (measured vs
formula) Pydantic models.

Schema versions: ExitTimeStats@1, ComparisonTable@1
"""

from typing import ClassVar

from pydantic import BaseModel, Field


class EpsilonStats(BaseModel):
    """Mean first exit time at one noise level."""

    epsilon: float = Field(..., description="Noise intensity")
    mean: float | None = Field(..., description="Mean over uncensored trajectories")
    stderr: float | None = Field(..., description="Sample stdev / sqrt(count); None if count < 2")
    count: int = Field(..., description="Uncensored trajectories")
    censored: int = Field(..., description="Trajectories that hit max_steps")


class ExitTimeStats(BaseModel):
    """
    ExitTimeStats@1 schema

    Per-epsilon exit-time statistics of one Monte Carlo setup.
    """

    schema_version: str = Field(
        default="ExitTimeStats@1", description="Schema version identifier", alias="schema"
    )
    case: str = Field(default="", description="Boundary case label")
    system: str = Field(default="", description="System name")
    dt: float = Field(..., description="Euler-Maruyama step")
    trajectories: int = Field(..., description="Trajectories per epsilon")
    max_steps: int = Field(..., description="Step cap per trajectory")
    seed: int = Field(..., description="Root seed")
    records: list[EpsilonStats] = Field(default_factory=list, description="One row per epsilon")

    class Config:
        """Pydantic config."""

        populate_by_name = True

        json_schema_extra: ClassVar[dict] = {
            "example": {
                "schema": "ExitTimeStats@1",
                "case": "A",
                "dt": 0.001,
                "trajectories": 2000,
                "max_steps": 500000,
                "seed": 2024,
                "records": [
                    {"epsilon": 0.1, "mean": 11.4, "stderr": 0.25, "count": 2000, "censored": 0}
                ],
            }
        }


class ComparisonRow(BaseModel):
    """Monte Carlo against the asymptotic formula at one epsilon."""

    epsilon: float
    met_mc: float | None
    stderr: float | None
    n_effective: int
    censored: int
    met_formula: float
    rel_err: float | None = Field(..., description="(MC - formula) / formula")
    z_score: float | None = Field(..., description="(MC - formula) / stderr")
    arrhenius: float | None = Field(..., description="eps * ln(MC mean), compare with V*")


class ComparisonTable(BaseModel):
    """
    ComparisonTable@1 schema

    Formula-versus-simulation table for one boundary case.
    """

    schema_version: str = Field(
        default="ComparisonTable@1", description="Schema version identifier", alias="schema"
    )
    case: str = Field(..., description="Boundary case")
    v_star: float = Field(..., description="Barrier used by the formula")
    l_coefficient: float = Field(..., description="Prefactor coefficient used by the formula")
    epsilon_power: float = Field(..., description="Prefactor power of epsilon")
    rows: list[ComparisonRow] = Field(default_factory=list)
    max_abs_rel_err: float | None = Field(default=None, description="Worst |rel_err|")

    class Config:
        """Pydantic config."""

        populate_by_name = True
