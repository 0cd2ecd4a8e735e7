"""
Architecture Pydantic model

Shape of the (V_hat, l) network: input x in R^n, tanh hidden layers, identity
output of width n + 1 (one quasipotential channel, n rotational channels).

Schema version: Architecture@1
"""

from typing import ClassVar, Literal

from pydantic import BaseModel, Field, field_validator


class Architecture(BaseModel):
    """
    Architecture@1 schema

    Layer widths of the decomposition network.
    """

    schema_version: str = Field(
        default="Architecture@1", description="Schema version identifier", alias="schema"
    )
    input_dim: int = Field(default=2, ge=1, description="State dimension n")
    hidden_widths: list[int] = Field(
        default_factory=lambda: [20] * 6, description="Neuron count of each hidden layer"
    )
    hidden_activation: Literal["tanh"] = Field(default="tanh", description="Hidden activation")
    output_activation: Literal["identity"] = Field(
        default="identity", description="Output activation"
    )

    @field_validator("hidden_widths")
    @classmethod
    def _positive_widths(cls, widths: list[int]) -> list[int]:
        if any(w < 1 for w in widths):
            raise ValueError(f"hidden widths must be >= 1, got {widths}")
        return widths

    @property
    def output_dim(self) -> int:
        return self.input_dim + 1

    @property
    def layer_sizes(self) -> list[int]:
        """[n, n_1, ..., n_{L-1}, n + 1]."""
        return [self.input_dim, *self.hidden_widths, self.output_dim]

    @classmethod
    def uniform(cls, input_dim: int, hidden_layers: int, width: int) -> "Architecture":
        """Architecture with `hidden_layers` layers of equal width."""
        return cls(input_dim=input_dim, hidden_widths=[width] * hidden_layers)

    class Config:
        """Pydantic config."""

        populate_by_name = True

        json_schema_extra: ClassVar[dict] = {
            "example": {
                "schema": "Architecture@1",
                "input_dim": 2,
                "hidden_widths": [20, 20, 20, 20, 20, 20],
                "hidden_activation": "tanh",
                "output_activation": "identity",
            }
        }
