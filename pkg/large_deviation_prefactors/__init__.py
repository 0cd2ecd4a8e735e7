"""
Large Deviation Prefactors

Learns the orthogonal decomposition b = -1/2 grad V + l of a drift field with a
small network, traces most probable exit paths, and assembles the prefactor of
the mean exit time E[tau] ~ L(eps) exp(V*/eps) of dx = b(x) dt + sqrt(eps) dB,
validated against direct Monte Carlo.

Core Architecture:
    Drift system -> Train (V, l) -> Field -> MPP + div integral -> Prefactor -> MC comparison

Main Components:
    - models: Pydantic schemas for configs and artifacts
    - systems: Drift systems, fixed points, benchmark registry
    - network: Value + input-Jacobian network and checkpoints
    - training: Decomposition loss, Adam, trainer, error metrics
    - fields: Learned/analytic fields, Hessians, Lyapunov/Riccati solvers
    - paths: Exit boundaries, most probable paths, divergence integrals
    - prefactors: Case A / Case B prefactors, WKB prefactor, mean exit times
    - montecarlo: Euler-Maruyama exit-time simulation
    - orchestrators: Pipeline steps and the ldp CLI
    - utils: Errors, settings, I/O, decision logging
"""

__version__ = "0.1.0"

from large_deviation_prefactors.models import (
    PrefactorReport,
    RunConfig,
    TrainHistory,
)

__all__ = [
    "PrefactorReport",
    "RunConfig",
    "TrainHistory",
    "__version__",
]
