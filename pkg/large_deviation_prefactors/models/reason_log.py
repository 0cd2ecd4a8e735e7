"""
ReasonLog Pydantic model

Structured decision log entry written by a pipeline stage (Trainer, Field,
PathIntegrator, Prefactor, MonteCarlo, Pipeline). Entries record what was
decided, why, and with which numbers, so a run can be audited after the fact.

Schema version: ReasonLog@1
"""

from datetime import datetime, timezone
from typing import Any, ClassVar

import numpy as np
from pydantic import BaseModel, Field, field_validator


class ReasonLog(BaseModel):
    """
    ReasonLog@1 schema

    One decision made during a run. For training, `iteration` is the epoch at
    which the decision was taken; other stages use 0.
    """

    schema_version: str = Field(
        default="ReasonLog@1", description="Schema version identifier", alias="schema"
    )
    timestamp: str = Field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(),
        description="ISO 8601 timestamp of decision",
    )
    run_id: str = Field(..., description="Unique run identifier")
    iteration: int = Field(..., description="Epoch or step at which the decision was made")
    agent: str = Field(
        ...,
        description="Stage name: Trainer|Field|PathIntegrator|Prefactor|MonteCarlo|Pipeline",
    )
    decision: str = Field(..., description="Brief description of the decision made")
    reasoning: str = Field(..., description="Explanation of why this decision was made")
    parameters: dict[str, Any] = Field(
        default_factory=dict, description="Numbers that influenced the decision"
    )
    outcome: str | None = Field(default=None, description="Outcome of the decision")
    metadata: dict[str, Any] = Field(default_factory=dict, description="Additional context")

    @field_validator("parameters", mode="before")
    @classmethod
    def _plain_numbers(cls, parameters: dict[str, Any]) -> dict[str, Any]:
        """Unwrap NumPy scalars and arrays so entries serialise as JSON."""
        return {
            key: value.tolist() if isinstance(value, np.ndarray | np.generic) else value
            for key, value in parameters.items()
        }

    class Config:
        """Pydantic config."""

        populate_by_name = True

        json_schema_extra: ClassVar[dict] = {
            "example": {
                "schema": "ReasonLog@1",
                "timestamp": "2026-01-15T10:30:00.000000+00:00",
                "run_id": "doublewell-rot",
                "iteration": 5000,
                "agent": "Trainer",
                "decision": "Wrote checkpoint",
                "reasoning": "Checkpoint cadence reached",
                "parameters": {"total_loss": 1.2e-4},
                "outcome": "checkpoints/epoch_005000.ckpt",
            }
        }
