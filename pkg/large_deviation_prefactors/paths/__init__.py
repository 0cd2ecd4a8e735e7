"""Exit boundaries, most probable paths and divergence line integrals."""

from large_deviation_prefactors.paths.boundaries import (
    BoundarySpec,
    CharacteristicBoundary,
    NonCharacteristicBoundary,
    line_boundary,
)
from large_deviation_prefactors.paths.mpp import (
    BoundaryMinimum,
    FlowIntegrals,
    PathResult,
    divergence_integral,
    exit_point_on_boundary,
    integrate_mpp,
    reversed_flow_integrals,
    saddle_seed,
    summarize_path,
    with_divergence,
    write_path_csv,
)

__all__ = [
    "BoundaryMinimum",
    "BoundarySpec",
    "CharacteristicBoundary",
    "FlowIntegrals",
    "NonCharacteristicBoundary",
    "PathResult",
    "divergence_integral",
    "exit_point_on_boundary",
    "integrate_mpp",
    "line_boundary",
    "reversed_flow_integrals",
    "saddle_seed",
    "summarize_path",
    "with_divergence",
    "write_path_csv",
]
