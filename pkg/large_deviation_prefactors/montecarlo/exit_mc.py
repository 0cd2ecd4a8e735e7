"""
Exit-time Monte Carlo

Euler-Maruyama simulation of dx = b(x) dt + sqrt(eps) dB from the stable
point until the first exit from the domain:

    x_{k+1} = x_k + b(x_k) dt + sqrt(eps dt) xi_k

With noise_substeps = s, each xi_k is the scaled sum of s standard normals, so a
run at dt with s = 2 sees the same Brownian path as a run at dt / 2 with s = 1.

Trajectories are grouped in fixed shards of SHARD_SIZE that step together as one
array; shards run on joblib workers and are reduced in shard order. Each
trajectory draws its noise from its own stream, so results are bit-identical
for any worker count.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from large_deviation_prefactors.models.exit_stats import (
    ComparisonRow,
    ComparisonTable,
    EpsilonStats,
    ExitTimeStats,
)
from large_deviation_prefactors.models.prefactor_report import PrefactorReport
from large_deviation_prefactors.montecarlo.regions import ExitRegion
from large_deviation_prefactors.montecarlo.streams import trajectory_stream
from large_deviation_prefactors.prefactors.engine import mean_exit_time
from large_deviation_prefactors.systems.base import DriftSystem
from large_deviation_prefactors.utils.errors import NumericalError, UsageError

SHARD_SIZE = 250
NOISE_BLOCK = 1024
MAX_CENSORED_FRACTION = 0.5

COMPARISON_HEADER = [
    "epsilon",
    "met_mc",
    "stderr",
    "n_effective",
    "censored",
    "met_formula",
    "rel_err",
    "z_score",
    "arrhenius",
]


@dataclass(frozen=True)
class McSetup:
    """Everything a batch of exit-time simulations needs."""

    system: DriftSystem
    start: np.ndarray
    exit_region: ExitRegion
    dt: float
    max_steps: int
    epsilons: tuple[float, ...]
    trajectories: int
    seed: int
    case: str = ""
    noise_substeps: int = 1

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise UsageError("dt must be positive")
        if self.trajectories < 1:
            raise UsageError("at least one trajectory is required")
        if self.max_steps < 1:
            raise UsageError("max_steps must be positive")
        if self.noise_substeps < 1:
            raise UsageError("noise_substeps must be positive")
        if any(eps < 0 for eps in self.epsilons):
            raise UsageError("noise intensities must be non-negative")
        start = self.system.check_point(self.start)
        if start.ndim != 1:
            raise UsageError("start must be a single point")
        if bool(self.exit_region.exited(start)[0]):
            raise UsageError("start point already lies outside the domain")


def simulate_batch(
    setup: McSetup, epsilon: float, eps_index: int, trajectory_indices: Sequence[int]
) -> list[float | None]:
    """
    Exit times of the given trajectories; None marks a censored run.

    The crossing step is interpolated linearly in the exit level function.
    """
    indices = list(trajectory_indices)
    count = len(indices)
    dim = setup.system.dim
    streams = [trajectory_stream(setup.seed, eps_index, i) for i in indices]
    substeps = setup.noise_substeps
    noise_scale = math.sqrt(epsilon * setup.dt / substeps)

    x = np.tile(np.asarray(setup.start, dtype=float), (count, 1))
    exit_times = np.full(count, np.nan)
    active = np.ones(count, dtype=bool)
    step = 0

    while step < setup.max_steps and np.any(active):
        n_block = min(NOISE_BLOCK, setup.max_steps - step)
        noise = np.zeros((count, n_block, dim))
        for i in np.flatnonzero(active):
            noise[i] = streams[i].standard_normal((n_block, substeps, dim)).sum(axis=1)

        for k in range(n_block):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            current = x[idx]
            nxt = current + setup.system.drift(current) * setup.dt + noise_scale * noise[idx, k]
            if not np.all(np.isfinite(nxt)):
                bad = idx[np.flatnonzero(~np.all(np.isfinite(nxt), axis=1))[0]]
                raise NumericalError(
                    f"trajectory {indices[bad]} left the finite range at step {step + k + 1}"
                )
            g_old = setup.exit_region.level(current)
            g_new = setup.exit_region.level(nxt)
            crossed = g_new >= 0
            if np.any(crossed):
                frac = g_old[crossed] / (g_old[crossed] - g_new[crossed])
                exit_times[idx[crossed]] = (step + k + frac) * setup.dt
                active[idx[crossed]] = False
            x[idx] = nxt
        step += n_block

    return [None if math.isnan(t) else float(t) for t in exit_times]


def simulate_exit(
    setup: McSetup, epsilon: float, trajectory_index: int, eps_index: int = 0
) -> float | None:
    """Exit time of one trajectory, or None if it hit max_steps."""
    return simulate_batch(setup, epsilon, eps_index, [trajectory_index])[0]


def _run_shard(task: tuple[McSetup, float, int, int, int]) -> list[float | None]:
    setup, epsilon, eps_index, first, last = task
    return simulate_batch(setup, epsilon, eps_index, range(first, last))


def _summarize(epsilon: float, times: list[float | None]) -> EpsilonStats:
    samples = np.array([t for t in times if t is not None], dtype=float)
    censored = len(times) - samples.size
    mean = float(np.mean(samples)) if samples.size else None
    stderr = (
        float(np.std(samples, ddof=1) / math.sqrt(samples.size)) if samples.size >= 2 else None
    )
    return EpsilonStats(
        epsilon=epsilon, mean=mean, stderr=stderr, count=int(samples.size), censored=censored
    )


def exit_time_stats(setup: McSetup, workers: int | None = None) -> ExitTimeStats:
    """
    Mean exit time, standard error and censoring count per epsilon.

    Args:
        setup: Simulation setup
        workers: Worker processes (None or 1 runs in-process)

    Raises:
        NumericalError: more than half of the runs at some epsilon were censored
    """
    tasks = [
        (setup, eps, eps_index, first, min(first + SHARD_SIZE, setup.trajectories))
        for eps_index, eps in enumerate(setup.epsilons)
        for first in range(0, setup.trajectories, SHARD_SIZE)
    ]
    if workers is not None and workers > 1 and len(tasks) > 1:
        shard_results = Parallel(n_jobs=workers)(delayed(_run_shard)(task) for task in tasks)
    else:
        shard_results = [_run_shard(task) for task in tasks]

    per_epsilon: list[list[float | None]] = [[] for _ in setup.epsilons]
    for task, result in zip(tasks, shard_results):
        per_epsilon[task[2]].extend(result)

    records = [_summarize(eps, times) for eps, times in zip(setup.epsilons, per_epsilon)]
    for rec in records:
        if rec.censored > MAX_CENSORED_FRACTION * setup.trajectories:
            raise NumericalError(
                f"{rec.censored} of {setup.trajectories} runs censored at eps={rec.epsilon:g}; "
                f"raise max_steps (now {setup.max_steps}) or eps"
            )

    return ExitTimeStats(
        case=setup.case,
        system=getattr(setup.system, "name", type(setup.system).__name__),
        dt=setup.dt,
        trajectories=setup.trajectories,
        max_steps=setup.max_steps,
        seed=setup.seed,
        records=records,
    )


def compare_with_formula(stats: ExitTimeStats, report: PrefactorReport) -> ComparisonTable:
    """
    Monte Carlo means against L(eps) exp(V*/eps) at every simulated epsilon.

    The report's own epsilon list, when present, must match the simulated grid.

    Raises:
        UsageError: mismatched epsilon grids
    """
    simulated = [rec.epsilon for rec in stats.records]
    if report.epsilons and (
        len(report.epsilons) != len(simulated)
        or not np.allclose(report.epsilons, simulated, rtol=1e-12, atol=0.0)
    ):
        raise UsageError(f"epsilon grids differ: report {report.epsilons}, simulation {simulated}")

    rows: list[ComparisonRow] = []
    for rec in stats.records:
        formula = mean_exit_time(report, rec.epsilon)
        rel_err = z_score = arrhenius = None
        if rec.mean is not None:
            rel_err = (rec.mean - formula) / formula
            if rec.stderr:
                z_score = (rec.mean - formula) / rec.stderr
            if rec.mean > 0:
                arrhenius = rec.epsilon * math.log(rec.mean)
        rows.append(
            ComparisonRow(
                epsilon=rec.epsilon,
                met_mc=rec.mean,
                stderr=rec.stderr,
                n_effective=rec.count,
                censored=rec.censored,
                met_formula=formula,
                rel_err=rel_err,
                z_score=z_score,
                arrhenius=arrhenius,
            )
        )

    errors = [abs(r.rel_err) for r in rows if r.rel_err is not None]
    return ComparisonTable(
        case=report.case,
        v_star=report.v_star,
        l_coefficient=report.l_coefficient,
        epsilon_power=report.epsilon_power,
        rows=rows,
        max_abs_rel_err=max(errors) if errors else None,
    )


def comparison_rows(table: ComparisonTable) -> list[tuple[float | int | None, ...]]:
    """CSV rows in COMPARISON_HEADER order."""
    return [
        (
            r.epsilon,
            r.met_mc,
            r.stderr,
            r.n_effective,
            r.censored,
            r.met_formula,
            r.rel_err,
            r.z_score,
            r.arrhenius,
        )
        for r in table.rows
    ]
