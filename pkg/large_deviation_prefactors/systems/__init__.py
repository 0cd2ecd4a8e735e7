"""
Drift systems package

    - base: DriftSystem, FixedPoint, classification
    - doublewell: rotational double-well benchmark with exact decomposition
    - free_diffusion: zero-drift oracle system
    - fixed_points: seeded Newton search
    - registry: key -> system lookup used by the CLI
"""

from large_deviation_prefactors.systems.base import (
    DriftSystem,
    FixedPoint,
    FixedPointKind,
    drift,
    drift_jacobian,
)
from large_deviation_prefactors.systems.doublewell import (
    AnalyticBenchmark,
    DoubleWellSystem,
    make_doublewell,
    true_quasipotential,
    true_rotational,
)
from large_deviation_prefactors.systems.fixed_points import (
    classify_fixed_points,
    eigen_directions,
    search_fixed_points,
)
from large_deviation_prefactors.systems.free_diffusion import FreeDiffusion
from large_deviation_prefactors.systems.registry import get_benchmark, get_system, register_system

__all__ = [
    "AnalyticBenchmark",
    "DoubleWellSystem",
    "DriftSystem",
    "FixedPoint",
    "FixedPointKind",
    "FreeDiffusion",
    "classify_fixed_points",
    "drift",
    "drift_jacobian",
    "eigen_directions",
    "get_benchmark",
    "get_system",
    "make_doublewell",
    "register_system",
    "search_fixed_points",
    "true_quasipotential",
    "true_rotational",
]
