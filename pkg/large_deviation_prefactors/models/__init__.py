"""
Data models package

Pydantic schemas for configuration and artifacts, all carrying a schema version.

Models:
    - Architecture: Layer widths of the decomposition network
    - RunConfig: Complete run configuration
    - TrainHistory / ErrorMetrics: Training records and e_V, e_l
    - HessianResult / PrefactorReport / BoundaryFlux: Prefactor assembly with every intermediate
    - PathSummary: Most probable path diagnostics
    - ExitTimeStats / ComparisonTable: Monte Carlo results and formula comparison
    - ReasonLog: Structured decision log entry
"""

from large_deviation_prefactors.models.architecture import Architecture
from large_deviation_prefactors.models.exit_stats import (
    ComparisonRow,
    ComparisonTable,
    EpsilonStats,
    ExitTimeStats,
)
from large_deviation_prefactors.models.path_summary import PathSummary
from large_deviation_prefactors.models.prefactor_report import (
    BoundaryFlux,
    HessianResult,
    PrefactorReport,
    Provenance,
)
from large_deviation_prefactors.models.reason_log import ReasonLog
from large_deviation_prefactors.models.run_config import RunConfig
from large_deviation_prefactors.models.train_history import EpochRecord, ErrorMetrics, TrainHistory

__all__ = [
    "Architecture",
    "BoundaryFlux",
    "ComparisonRow",
    "ComparisonTable",
    "EpochRecord",
    "EpsilonStats",
    "ErrorMetrics",
    "ExitTimeStats",
    "HessianResult",
    "PathSummary",
    "PrefactorReport",
    "Provenance",
    "ReasonLog",
    "RunConfig",
    "TrainHistory",
]
