"""
Training artifacts

TrainHistory and ErrorMetrics Pydantic models.

Schema versions: TrainHistory@1, ErrorMetrics@1
"""

from typing import ClassVar

from pydantic import BaseModel, Field


class EpochRecord(BaseModel):
    """Loss components of one full-batch epoch, evaluated before the update."""

    epoch: int = Field(..., description="1-based epoch number (continues across resumes)")
    l_dyn: float = Field(..., description="Decomposition residual loss")
    l_orth: float = Field(..., description="Orthogonality loss (unweighted)")
    l_zero: float = Field(..., description="Anchor loss V(x_bar)^2 (unweighted)")
    total: float = Field(..., description="l_dyn + gamma1 l_orth + gamma2 l_zero")


class ErrorMetrics(BaseModel):
    """
    ErrorMetrics@1 schema

    Max-ratio approximation errors of a learned field against the exact one:
    e_V = max|V_theta - V|^2 / max|V|^2, e_l = max|l_theta - l|^2 / max|l|^2.
    """

    schema_version: str = Field(
        default="ErrorMetrics@1", description="Schema version identifier", alias="schema"
    )
    e_v: float = Field(..., ge=0.0, description="Quasipotential error ratio")
    e_l: float = Field(..., ge=0.0, description="Rotational-field error ratio")
    grid: str = Field(..., description="Description of the evaluation point set")
    n_points: int = Field(..., ge=1, description="Number of evaluation points")

    class Config:
        """Pydantic config."""

        populate_by_name = True

        json_schema_extra: ClassVar[dict] = {
            "example": {
                "schema": "ErrorMetrics@1",
                "e_v": 0.0012,
                "e_l": 0.0007,
                "grid": "lattice 101x81 over [-1.5, 0] x [-0.8, 0.8]",
                "n_points": 8181,
            }
        }


class TrainHistory(BaseModel):
    """
    TrainHistory@1 schema

    Per-epoch loss records of one training call and the final metrics.
    """

    schema_version: str = Field(
        default="TrainHistory@1", description="Schema version identifier", alias="schema"
    )
    records: list[EpochRecord] = Field(default_factory=list, description="One row per epoch")
    start_epoch: int = Field(default=0, description="Epoch counter before this call")
    wall_time_s: float = Field(default=0.0, description="Wall-clock seconds spent training")
    grid_metrics: ErrorMetrics | None = Field(default=None, description="e_V, e_l on the grid")
    train_metrics: ErrorMetrics | None = Field(
        default=None, description="e_V, e_l on the training points"
    )

    @property
    def final_epoch(self) -> int:
        return self.records[-1].epoch if self.records else self.start_epoch

    class Config:
        """Pydantic config."""

        populate_by_name = True

        json_schema_extra: ClassVar[dict] = {
            "example": {
                "schema": "TrainHistory@1",
                "records": [
                    {"epoch": 1, "l_dyn": 3.1, "l_orth": 0.2, "l_zero": 0.01, "total": 3.301}
                ],
                "start_epoch": 0,
                "wall_time_s": 12.5,
            }
        }
