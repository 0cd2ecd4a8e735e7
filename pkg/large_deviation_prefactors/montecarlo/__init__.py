"""Euler-Maruyama exit-time simulation and comparison against the formula."""

from large_deviation_prefactors.montecarlo.exit_mc import (
    COMPARISON_HEADER,
    McSetup,
    compare_with_formula,
    comparison_rows,
    exit_time_stats,
    simulate_batch,
    simulate_exit,
)
from large_deviation_prefactors.montecarlo.regions import (
    BallExit,
    ExitRegion,
    HalfSpaceExit,
    beyond_saddle,
    half_space_from_boundary,
)
from large_deviation_prefactors.montecarlo.streams import trajectory_stream

__all__ = [
    "COMPARISON_HEADER",
    "BallExit",
    "ExitRegion",
    "HalfSpaceExit",
    "McSetup",
    "beyond_saddle",
    "compare_with_formula",
    "comparison_rows",
    "exit_time_stats",
    "half_space_from_boundary",
    "simulate_batch",
    "simulate_exit",
    "trajectory_stream",
]
