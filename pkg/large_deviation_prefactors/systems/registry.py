"""
System registry

Maps CLI/config keys to drift-system factories. Built in:

    - "doublewell-rot": the rotational double-well benchmark (alpha=0.5, beta=3)
    - "doublewell-grad": the same well without rotation (beta=0)
    - "free-diffusion": zero drift in one dimension

User systems are added with register_system at import time of their module.
"""

from collections.abc import Callable

from large_deviation_prefactors.systems.base import DriftSystem
from large_deviation_prefactors.systems.doublewell import AnalyticBenchmark, make_doublewell
from large_deviation_prefactors.systems.free_diffusion import FreeDiffusion
from large_deviation_prefactors.utils.errors import UsageError

SystemFactory = Callable[[], DriftSystem]
BenchmarkFactory = Callable[[], AnalyticBenchmark]

_systems: dict[str, SystemFactory] = {}
_benchmarks: dict[str, BenchmarkFactory] = {}


def register_system(key: str, factory: SystemFactory) -> None:
    """Register a drift system without a known decomposition."""
    _systems[key] = factory


def register_benchmark(key: str, factory: BenchmarkFactory) -> None:
    """Register a system whose quasipotential and rotational field are known exactly."""
    _benchmarks[key] = factory
    _systems[key] = lambda: factory().system


def available_systems() -> list[str]:
    return sorted(_systems)


def get_system(key: str) -> DriftSystem:
    """
    Build the drift system registered under `key`.

    Raises:
        UsageError: if the key is unknown
    """
    if key not in _systems:
        raise UsageError(f"unknown system {key!r} (known: {', '.join(available_systems())})")
    return _systems[key]()


def get_benchmark(key: str) -> AnalyticBenchmark | None:
    """Analytic benchmark registered under `key`, or None if the system has none."""
    factory = _benchmarks.get(key)
    return factory() if factory is not None else None


register_benchmark("doublewell-rot", lambda: make_doublewell())
register_benchmark("doublewell-grad", lambda: make_doublewell(beta=0.0))
register_system("free-diffusion", lambda: FreeDiffusion(dim=1))
