"""
RunConfig Pydantic model

Complete configuration of one run: system, network, training, boundaries,
path integration, Hessian conventions and Monte Carlo. Every default mirrors
the rotated double-well benchmark.

Schema version: RunConfig@1
"""

from typing import ClassVar

from pydantic import BaseModel, Field, field_validator, model_validator

from large_deviation_prefactors.models.architecture import Architecture


class Region(BaseModel):
    """Axis-aligned box [lower_i, upper_i]."""

    lower: list[float] = Field(default_factory=lambda: [-1.5, -0.8], description="Lower corner")
    upper: list[float] = Field(default_factory=lambda: [0.0, 0.8], description="Upper corner")

    @model_validator(mode="after")
    def _non_degenerate(self) -> "Region":
        if len(self.lower) != len(self.upper):
            raise ValueError("region corners differ in dimension")
        if any(hi <= lo for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"degenerate region {self.lower} .. {self.upper}")
        return self

    @property
    def dim(self) -> int:
        return len(self.lower)


class EvaluationGrid(BaseModel):
    """Uniform lattice over a region, used for e_V / e_l and surface dumps."""

    region: Region = Field(default_factory=Region, description="Lattice extent")
    shape: list[int] = Field(default_factory=lambda: [101, 81], description="Nodes per axis")

    @field_validator("shape")
    @classmethod
    def _at_least_two(cls, shape: list[int]) -> list[int]:
        if any(s < 2 for s in shape):
            raise ValueError(f"grid needs at least 2 nodes per axis, got {shape}")
        return shape


class TrainConfig(BaseModel):
    """Loss weights, sampling and optimizer settings of the decomposition training."""

    region: Region = Field(default_factory=Region, description="Sampling box")
    n_samples: int = Field(default=1000, ge=1, description="Training set size N")
    gamma1: float = Field(default=1.0, ge=0.0, description="Weight of the orthogonality loss")
    gamma2: float = Field(default=0.1, ge=0.0, description="Weight of the anchor loss")
    delta: float = Field(default=0.001, gt=0.0, description="Orthogonality denominator guard")
    learning_rate: float = Field(default=0.002, gt=0.0, description="Adam step size")
    final_learning_rate: float | None = Field(
        default=1e-4,
        gt=0.0,
        description="Step size reached by geometric decay at the last epoch; None keeps lr",
    )
    epochs: int = Field(default=100000, ge=0, description="Full-batch epochs")
    seed: int = Field(default=137, description="Seed for sampling and initialisation")
    x_bar: list[float] = Field(
        default_factory=lambda: [-1.0, 0.0], description="Stable point the network is pinned to"
    )
    checkpoint_every: int = Field(default=5000, ge=1, description="Checkpoint cadence in epochs")
    divergence_threshold: float = Field(default=1e6, gt=0.0, description="Loss abort threshold")


class CaseABoundary(BaseModel):
    """Straight non-characteristic boundary {origin + s * direction, s in [s_min, s_max]}."""

    origin: list[float] = Field(default_factory=lambda: [-0.5, 0.0], description="Line anchor")
    direction: list[float] = Field(default_factory=lambda: [0.0, 1.0], description="Line direction")
    s_min: float = Field(default=-0.8, description="Lower curve parameter")
    s_max: float = Field(default=0.8, description="Upper curve parameter")
    normal: list[float] = Field(
        default_factory=lambda: [1.0, 0.0], description="Exterior unit normal"
    )
    transversality_window: float = Field(
        default=0.25, gt=0.0, description="Half-width around x* where <b, n> < 0 is checked"
    )
    boundary_flux: bool = Field(
        default=True, description="Integrate the exit flux along the boundary for L(eps)"
    )
    flux_half_width: float = Field(
        default=1.2, gt=0.0, description="Quadrature half-width around x* in the curve parameter"
    )
    flux_nodes: int = Field(default=241, ge=3, description="Quadrature nodes on the boundary")
    flux_time_step: float = Field(
        default=5e-3, gt=0.0, description="Time step of the reversed flow from each node"
    )
    flux_max_time: float = Field(
        default=20.0, gt=0.0, description="Time cap of the reversed flow from each node"
    )

    @model_validator(mode="after")
    def _consistent(self) -> "CaseABoundary":
        if not (len(self.origin) == len(self.direction) == len(self.normal)):
            raise ValueError("boundary vectors differ in dimension")
        if self.s_max <= self.s_min:
            raise ValueError("boundary parameter interval is empty")
        return self


class PathSettings(BaseModel):
    """Most-probable-path integration settings."""

    delta1: float = Field(default=0.05, ge=0.0, description="Offset from the saddle")
    delta2: float = Field(default=0.01, gt=0.0, description="Stopping radius around x_bar")
    sigma_step: float = Field(default=1e-3, gt=0.0, description="Arc-length step")
    max_length: float = Field(default=10.0, gt=0.0, description="Arc-length cap")
    subtract_baseline: bool = Field(
        default=True, description="Subtract div l at the limiting fixed points"
    )


class HessianSettings(BaseModel):
    """Hessian and Riccati conventions."""

    fd_step: float = Field(default=1e-3, gt=0.0, description="Finite-difference step")
    hbar_source: str = Field(
        default="field", description="'field' (finite differences) or 'lyapunov'"
    )
    riccati_paper_convention: bool = Field(
        default=False, description="Solve 2H^2 = Q^T H + H Q instead of H^2 = Q^T H + H Q"
    )
    crosscheck_tolerance: float = Field(
        default=0.2, gt=0.0, description="Relative discrepancy that triggers a warning"
    )

    @field_validator("hbar_source")
    @classmethod
    def _known_source(cls, value: str) -> str:
        if value not in {"field", "lyapunov"}:
            raise ValueError(f"hbar_source must be 'field' or 'lyapunov', got {value!r}")
        return value


class McSettings(BaseModel):
    """Euler-Maruyama exit-time simulation settings."""

    dt: float = Field(default=1e-3, gt=0.0, description="Time step")
    trajectories: int = Field(default=2000, ge=1, description="Trajectories per epsilon (M)")
    max_steps: int | None = Field(
        default=None, ge=1, description="Step cap per trajectory; None means 10^9 / M"
    )
    seed: int = Field(default=2024, description="Root seed of the per-trajectory streams")
    noise_substeps: int = Field(
        default=1, ge=1, description="Normals summed per step; dt and dt / 2 runs share paths at 2"
    )
    workers: int | None = Field(default=None, ge=1, description="Worker processes")
    epsilons_case_a: list[float] = Field(
        default_factory=lambda: [0.08, 0.1, 0.14, 0.2], description="Case A noise grid"
    )
    epsilons_case_b: list[float] = Field(
        default_factory=lambda: [0.1, 0.12, 0.15, 0.2], description="Case B noise grid"
    )

    def resolved_max_steps(self) -> int:
        if self.max_steps is not None:
            return self.max_steps
        return max(10**4, 10**9 // self.trajectories)


class RunConfig(BaseModel):
    """
    RunConfig@1 schema

    Everything one run of the pipeline needs.
    """

    schema_version: str = Field(
        default="RunConfig@1", description="Schema version identifier", alias="schema"
    )
    run_id: str = Field(default="doublewell-rot", description="Run directory name")
    system: str = Field(default="doublewell-rot", description="Registered system key")
    x_bar_key: str = Field(default="SN1", description="Key of the stable fixed point")
    saddle_key: str = Field(default="US", description="Key of the Case B saddle")
    anchor_tolerance: float | None = Field(
        default=0.05,
        ge=0.0,
        description="Largest |V_theta(x_bar)| accepted from a checkpoint; None disables the check",
    )
    architecture: Architecture = Field(default_factory=Architecture)
    train: TrainConfig = Field(default_factory=TrainConfig)
    evaluation_grid: EvaluationGrid = Field(default_factory=EvaluationGrid)
    case_a: CaseABoundary = Field(default_factory=CaseABoundary)
    path: PathSettings = Field(default_factory=PathSettings)
    hessian: HessianSettings = Field(default_factory=HessianSettings)
    montecarlo: McSettings = Field(default_factory=McSettings)
    output_dir: str | None = Field(
        default=None, description="Output root; falls back to LDP_OUTPUT_ROOT"
    )

    class Config:
        """Pydantic config."""

        populate_by_name = True

        json_schema_extra: ClassVar[dict] = {
            "example": {
                "schema": "RunConfig@1",
                "run_id": "doublewell-rot",
                "system": "doublewell-rot",
                "train": {"n_samples": 1000, "epochs": 20000, "gamma1": 1.0, "gamma2": 0.1},
                "path": {"delta1": 0.05, "delta2": 0.01},
                "montecarlo": {"trajectories": 2000, "dt": 0.001},
            }
        }
