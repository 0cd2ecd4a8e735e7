"""
Pipeline steps

One function per CLI subcommand. Each step works inside the run directory
{output_root}/{run_id}/ and writes a provenance snapshot (command, tool version,
full config) next to its artifacts.

Workflow:
    1. train      -> train/checkpoints/final.ckpt, train/history.csv, train/metrics.json
    2. surface    -> reports/surface.csv
    3. mpp        -> paths/case_{A,B}.csv, paths/case_{A,B}.json
    4. prefactor  -> reports/prefactor_{A,B}.json (and reports/wkb_{A,B}.csv)
    5. met        -> reports/met_{A,B}.csv
    6. mc         -> montecarlo/exit_times_{A,B}.json
    7. report     -> reports/comparison_{A,B}.csv, reports/comparison_{A,B}.json
"""

import json
from dataclasses import replace
from pathlib import Path
from typing import Any, Literal, cast

import numpy as np

from large_deviation_prefactors import __version__
from large_deviation_prefactors.fields.potential_field import (
    AnalyticField,
    LearnedField,
    PotentialField,
)
from large_deviation_prefactors.models.exit_stats import ComparisonTable, ExitTimeStats
from large_deviation_prefactors.models.path_summary import PathSummary
from large_deviation_prefactors.models.prefactor_report import PrefactorReport, Provenance
from large_deviation_prefactors.models.run_config import EvaluationGrid, RunConfig
from large_deviation_prefactors.models.train_history import TrainHistory
from large_deviation_prefactors.montecarlo.exit_mc import (
    COMPARISON_HEADER,
    McSetup,
    compare_with_formula,
    comparison_rows,
    exit_time_stats,
)
from large_deviation_prefactors.montecarlo.regions import beyond_saddle, half_space_from_boundary
from large_deviation_prefactors.network.checkpoint import read_checkpoint
from large_deviation_prefactors.network.diffnet import NetworkParams
from large_deviation_prefactors.paths.boundaries import line_boundary
from large_deviation_prefactors.paths.mpp import (
    PathResult,
    exit_point_on_boundary,
    integrate_mpp,
    saddle_seed,
    summarize_path,
    with_divergence,
    write_path_csv,
)
from large_deviation_prefactors.prefactors.engine import (
    MET_HEADER,
    met_table,
    prefactor_case_a,
    prefactor_case_b,
    wkb_prefactor,
)
from large_deviation_prefactors.systems.base import DriftSystem
from large_deviation_prefactors.systems.registry import get_benchmark, get_system
from large_deviation_prefactors.training.metrics import grid_points
from large_deviation_prefactors.training.trainer import train
from large_deviation_prefactors.utils.decision_logger import log_decision
from large_deviation_prefactors.utils.errors import NumericalError, UsageError
from large_deviation_prefactors.utils.io_utils import (
    create_run_structure,
    load_json,
    save_json,
    write_csv,
)
from large_deviation_prefactors.utils.settings import get_settings

Case = Literal["A", "B"]


def parse_case(case: str) -> Case:
    """Normalize a case label ('A', 'b', ...)."""
    label = case.strip().upper()
    if label not in ("A", "B"):
        raise UsageError(f"unknown case {case!r}; expected 'A' or 'B'")
    return cast(Case, label)


def load_run_config(path: str | Path | None) -> RunConfig:
    """RunConfig from a JSON file, or the built-in defaults when path is None."""
    if path is None:
        return RunConfig()
    return load_json(path, RunConfig)


def output_root(config: RunConfig) -> str:
    return config.output_dir or get_settings().output_root


def run_paths(config: RunConfig) -> dict[str, Path]:
    return create_run_structure(output_root(config), config.run_id)


def write_provenance(config: RunConfig, command: str, extra: dict[str, Any] | None = None) -> Path:
    """Snapshot of the command, tool version and full config in the run directory."""
    paths = run_paths(config)
    snapshot = {
        "command": command,
        "tool_version": __version__,
        "config": config.model_dump(mode="json", by_alias=True),
        **(extra or {}),
    }
    target = paths["root"] / f"provenance_{command}.json"
    target.write_text(json.dumps(snapshot, indent=2), encoding="utf-8")
    return target


def _log(config: RunConfig, agent: str, decision: str, reasoning: str, **parameters: Any) -> None:
    log_decision(
        run_id=config.run_id,
        iteration=0,
        agent=agent,
        decision=decision,
        reasoning=reasoning,
        parameters=parameters,
        output_dir=output_root(config),
    )


def _system(config: RunConfig) -> DriftSystem:
    system = get_system(config.system)
    system.fixed_point(config.x_bar_key)
    return system


def _x_bar(config: RunConfig, system: DriftSystem) -> np.ndarray:
    return system.fixed_point(config.x_bar_key).location


def build_field(config: RunConfig, checkpoint: str | None = None) -> PotentialField:
    """
    Learned field from a checkpoint, or the system's analytic decomposition.

    Raises:
        NumericalError: the checkpoint's V_theta(x_bar) exceeds `anchor_tolerance`
        UsageError: no checkpoint and no analytic decomposition registered
    """
    system = _system(config)
    if checkpoint is not None:
        params, header = read_checkpoint(checkpoint, expected_input_dim=system.dim)
        x_bar = header.metadata.get("x_bar", _x_bar(config, system).tolist())
        return LearnedField(
            system, params, np.asarray(x_bar, dtype=float), config.anchor_tolerance
        )
    bench = get_benchmark(config.system)
    if bench is None:
        raise UsageError(f"system {config.system!r} has no analytic field; pass a checkpoint")
    return AnalyticField(bench)


def _provenance(config: RunConfig, field: PotentialField, checkpoint: str | None) -> Provenance:
    return Provenance(
        backing=field.backing,
        system=config.system,
        checkpoint=checkpoint,
        tool_version=__version__,
        settings=config.model_dump(mode="json", by_alias=True),
    )


def run_train(
    config: RunConfig, resume_from: str | None = None
) -> tuple[NetworkParams, TrainHistory, Path]:
    """Train the decomposition network; returns params, history and the train directory."""
    paths = run_paths(config)
    write_provenance(config, "train", {"resume_from": resume_from})
    system = _system(config)
    params, history = train(
        system,
        config.architecture,
        config.train,
        run_id=config.run_id,
        output_dir=output_root(config),
        resume_from=resume_from,
        bench=get_benchmark(config.system),
        grid=config.evaluation_grid,
    )
    metrics = {
        "final_epoch": history.final_epoch,
        "wall_time_s": history.wall_time_s,
        "grid": history.grid_metrics.model_dump(by_alias=True) if history.grid_metrics else None,
        "train": history.train_metrics.model_dump(by_alias=True)
        if history.train_metrics
        else None,
    }
    (paths["train"] / "metrics.json").write_text(json.dumps(metrics, indent=2), encoding="utf-8")
    return params, history, paths["train"]


def run_surface(
    config: RunConfig, checkpoint: str | None = None, grid: EvaluationGrid | None = None
) -> Path:
    """
    Learned and exact V, l on a lattice as CSV.

    Columns: x_i, then V_theta and l_theta components (with a checkpoint), then
    V_true and l_true components (when the system has an analytic decomposition).
    """
    paths = run_paths(config)
    write_provenance(config, "surface", {"checkpoint": checkpoint})
    grid = grid or config.evaluation_grid
    system = _system(config)
    points = grid_points(grid)
    dim = system.dim

    header = [f"x{i + 1}" for i in range(dim)]
    columns: list[np.ndarray] = [points]
    if checkpoint is not None:
        learned = build_field(config, checkpoint).evaluate(points)
        header += ["V_theta", *[f"l{i + 1}_theta" for i in range(dim)]]
        columns += [learned.V[:, None], learned.l]
    bench = get_benchmark(config.system)
    if bench is not None:
        exact = AnalyticField(bench).evaluate(points)
        header += ["V_true", *[f"l{i + 1}_true" for i in range(dim)]]
        columns += [exact.V[:, None], exact.l]
    if len(columns) == 1:
        raise UsageError(f"system {config.system!r} has no analytic field; pass a checkpoint")

    table = np.hstack(columns)
    return write_csv(paths["reports"] / "surface.csv", header, table.tolist())


def run_mpp(
    config: RunConfig, case: str, checkpoint: str | None = None
) -> tuple[PathResult, PathSummary]:
    """Most probable path for one case, with its divergence integral when converged."""
    label = parse_case(case)
    paths = run_paths(config)
    write_provenance(config, "mpp", {"case": label, "checkpoint": checkpoint})
    field = build_field(config, checkpoint)
    settings = config.path
    saddle_location = None

    if label == "A":
        minimum = exit_point_on_boundary(field, line_boundary(config.case_a))
        start, warnings = minimum.point, minimum.warnings
    else:
        saddle = field.system.fixed_point(config.saddle_key)
        start, warnings = saddle_seed(field.system, saddle, settings.delta1, field.x_bar)
        saddle_location = saddle.location

    path = integrate_mpp(
        field, start, field.x_bar, settings.delta2, settings.sigma_step, settings.max_length
    )
    path = replace(path, warnings=list(warnings) + path.warnings)
    if path.status == "converged":
        path = with_divergence(
            field,
            path,
            settings.subtract_baseline,
            saddle_location if settings.subtract_baseline else None,
        )

    summary = summarize_path(path, label, field.backing)
    write_path_csv(field, path, paths["paths"] / f"case_{label}.csv")
    save_json(summary, paths["paths"] / f"case_{label}.json")
    _log(
        config,
        "PathIntegrator",
        f"Case {label} path {path.status}",
        f"Reverse RK4 from {np.round(start, 6).tolist()} toward x_bar",
        length=path.length,
        nodes=path.n_nodes,
        div_integral=path.div_integral,
        warnings=path.warnings,
    )
    return path, summary


def run_prefactor(
    config: RunConfig, case: str, checkpoint: str | None = None, wkb: bool = False
) -> PrefactorReport:
    """
    Prefactor report for one case.

    Raises:
        NumericalError: the MPP did not converge
    """
    label = parse_case(case)
    paths = run_paths(config)
    path, _ = run_mpp(config, label, checkpoint)
    if path.status != "converged":
        raise NumericalError(f"case {label} path {path.status}: {'; '.join(path.warnings)}")
    write_provenance(config, "prefactor", {"case": label, "checkpoint": checkpoint, "wkb": wkb})
    field = build_field(config, checkpoint)
    provenance = _provenance(config, field, checkpoint)

    if label == "A":
        report = prefactor_case_a(
            field,
            line_boundary(config.case_a),
            path,
            config.montecarlo.epsilons_case_a,
            config.hessian,
            provenance,
            config.case_a.transversality_window,
            flux=config.case_a,
            delta2=config.path.delta2,
        )
    else:
        report = prefactor_case_b(
            field,
            field.system.fixed_point(config.saddle_key),
            path,
            config.montecarlo.epsilons_case_b,
            config.hessian,
            provenance,
        )

    save_json(report, paths["reports"] / f"prefactor_{label}.json")
    if wkb:
        rows = [(eps, wkb_prefactor(field, path, eps, config.hessian)) for eps in report.epsilons]
        write_csv(paths["reports"] / f"wkb_{label}.csv", ["epsilon", "C"], rows)
    _log(
        config,
        "Prefactor",
        f"Case {label} L coefficient {report.l_coefficient:.6g}",
        "Assembled from the MPP divergence integral and field Hessians",
        v_star=report.v_star,
        l_coefficient=report.l_coefficient,
        div_integral=report.div_integral,
        warnings=report.warnings,
    )
    return report


def _report_path(config: RunConfig, label: Case) -> Path:
    return Path(output_root(config)) / config.run_id / "reports" / f"prefactor_{label}.json"


def _case_epsilons(config: RunConfig, label: Case) -> list[float]:
    mc = config.montecarlo
    return list(mc.epsilons_case_a if label == "A" else mc.epsilons_case_b)


def run_met(config: RunConfig, case: str, epsilons: list[float] | None = None) -> Path:
    """Tabulate L(eps) exp(V*/eps) from a saved prefactor report."""
    label = parse_case(case)
    paths = run_paths(config)
    write_provenance(config, "met", {"case": label})
    report = load_json(_report_path(config, label), PrefactorReport)
    rows = met_table(report, epsilons or _case_epsilons(config, label))
    return write_csv(paths["reports"] / f"met_{label}.csv", MET_HEADER, rows)


def mc_setup(config: RunConfig, case: str) -> McSetup:
    """Monte Carlo setup of one case: start at x_bar, exit past the case's boundary."""
    label = parse_case(case)
    system = _system(config)
    x_bar = _x_bar(config, system)
    if label == "A":
        region = half_space_from_boundary(config.case_a)
    else:
        region = beyond_saddle(system.fixed_point(config.saddle_key).location, x_bar)
    mc = config.montecarlo
    return McSetup(
        system=system,
        start=x_bar,
        exit_region=region,
        dt=mc.dt,
        max_steps=mc.resolved_max_steps(),
        epsilons=tuple(_case_epsilons(config, label)),
        trajectories=mc.trajectories,
        seed=mc.seed,
        case=label,
        noise_substeps=mc.noise_substeps,
    )


def run_mc(config: RunConfig, case: str) -> ExitTimeStats:
    """Simulate exit times for one case."""
    label = parse_case(case)
    paths = run_paths(config)
    write_provenance(config, "mc", {"case": label})
    workers = config.montecarlo.workers or get_settings().workers
    stats = exit_time_stats(mc_setup(config, label), workers=workers)
    save_json(stats, paths["montecarlo"] / f"exit_times_{label}.json")
    _log(
        config,
        "MonteCarlo",
        f"Case {label} exit times over {len(stats.records)} noise levels",
        f"Euler-Maruyama with dt={stats.dt:g}, {stats.trajectories} trajectories each",
        means=[rec.mean for rec in stats.records],
        censored=[rec.censored for rec in stats.records],
        workers=workers,
    )
    return stats


def run_report(config: RunConfig, case: str) -> ComparisonTable:
    """Bundle the saved prefactor report and Monte Carlo statistics into a comparison."""
    label = parse_case(case)
    paths = run_paths(config)
    write_provenance(config, "report", {"case": label})
    report = load_json(_report_path(config, label), PrefactorReport)
    stats = load_json(paths["montecarlo"] / f"exit_times_{label}.json", ExitTimeStats)
    table = compare_with_formula(stats, report)
    write_csv(
        paths["reports"] / f"comparison_{label}.csv", COMPARISON_HEADER, comparison_rows(table)
    )
    save_json(table, paths["reports"] / f"comparison_{label}.json")
    _log(
        config,
        "Pipeline",
        f"Case {label} comparison",
        "Monte Carlo means against L(eps) exp(V*/eps)",
        max_abs_rel_err=table.max_abs_rel_err,
    )
    return table
