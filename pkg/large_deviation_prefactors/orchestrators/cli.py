"""
Command-line interface

    ldp train      [--config F] [--n N] [--epochs E] [--seed S] [--lr LR]
                   [--gamma1 G1] [--gamma2 G2] [--delta D] [--resume CKPT]
    ldp surface    [--config F] [--checkpoint CKPT] [--shape N1 N2 ...]
    ldp mpp        [--config F] --case {A,B} [--checkpoint CKPT]
    ldp prefactor  [--config F] --case {A,B} [--checkpoint CKPT] [--wkb]
    ldp met        [--config F] --case {A,B} [--epsilons ...]
    ldp mc         [--config F] --case {A,B} [--workers W] [--trajectories M] [--dt DT]
                   [--epsilons ...] [--seed S] [--max-steps K]
    ldp report     [--config F] --case {A,B}

Flags override the matching config keys. Exit codes: 0 success, 2 numerical
failure, 64 usage error.
"""

import argparse
import json
import sys
from collections.abc import Sequence
from typing import Any, NoReturn

from pydantic import ValidationError

from large_deviation_prefactors.models.run_config import EvaluationGrid, RunConfig
from large_deviation_prefactors.orchestrators import pipeline
from large_deviation_prefactors.utils.errors import CheckpointError, NumericalError, UsageError

EXIT_OK = 0
EXIT_NUMERICAL = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code instead of 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="RunConfig JSON file (defaults to the built-in config)")
    parser.add_argument("--output-dir", help="Output root (overrides config and LDP_OUTPUT_ROOT)")
    parser.add_argument("--run-id", help="Run directory name")


def _case(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--case", required=True, help="Boundary case: A or B")


def _checkpoint(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--checkpoint", help="Trained network checkpoint (analytic field if omitted)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ldp", description="Large-deviation prefactors of mean exit times")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="Train the decomposition network")
    _common(p)
    p.add_argument("--n", type=int, help="Training set size")
    p.add_argument("--epochs", type=int, help="Full-batch epochs")
    p.add_argument("--seed", type=int, help="Sampling and initialisation seed")
    p.add_argument("--lr", type=float, help="Adam learning rate")
    p.add_argument("--gamma1", type=float, help="Orthogonality loss weight")
    p.add_argument("--gamma2", type=float, help="Anchor loss weight")
    p.add_argument("--delta", type=float, help="Orthogonality denominator guard")
    p.add_argument("--resume", help="Checkpoint to continue from")

    p = sub.add_parser("surface", help="Dump learned/exact V and l on a lattice")
    _common(p)
    _checkpoint(p)
    p.add_argument("--shape", type=int, nargs="+", help="Lattice nodes per axis")

    p = sub.add_parser("mpp", help="Integrate the most probable exit path")
    _common(p)
    _case(p)
    _checkpoint(p)

    p = sub.add_parser("prefactor", help="Compute the prefactor report")
    _common(p)
    _case(p)
    _checkpoint(p)
    p.add_argument("--wkb", action="store_true", help="Also tabulate the WKB prefactor at x*")

    p = sub.add_parser("met", help="Tabulate mean exit times from a saved report")
    _common(p)
    _case(p)
    p.add_argument("--epsilons", type=float, nargs="+", help="Noise levels")

    p = sub.add_parser("mc", help="Monte Carlo exit times")
    _common(p)
    _case(p)
    p.add_argument("--workers", type=int, help="Worker processes")
    p.add_argument("--trajectories", type=int, help="Trajectories per noise level")
    p.add_argument("--dt", type=float, help="Euler-Maruyama step")
    p.add_argument("--epsilons", type=float, nargs="+", help="Noise levels")
    p.add_argument("--seed", type=int, help="Root seed")
    p.add_argument("--max-steps", type=int, help="Step cap per trajectory")

    p = sub.add_parser("report", help="Compare Monte Carlo with the formula")
    _common(p)
    _case(p)
    return parser


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Return a validated copy of `config` with every given flag applied."""
    data = config.model_dump(by_alias=True)

    def put(section: str | None, key: str, value: Any) -> None:
        if value is None:
            return
        (data if section is None else data[section])[key] = value

    put(None, "output_dir", getattr(args, "output_dir", None))
    put(None, "run_id", getattr(args, "run_id", None))
    if args.command == "train":
        put("train", "n_samples", args.n)
        put("train", "epochs", args.epochs)
        put("train", "seed", args.seed)
        put("train", "learning_rate", args.lr)
        put("train", "gamma1", args.gamma1)
        put("train", "gamma2", args.gamma2)
        put("train", "delta", args.delta)
    if args.command == "mc":
        put("montecarlo", "workers", args.workers)
        put("montecarlo", "trajectories", args.trajectories)
        put("montecarlo", "dt", args.dt)
        put("montecarlo", "seed", args.seed)
        put("montecarlo", "max_steps", args.max_steps)
    if getattr(args, "epsilons", None) is not None:
        case = pipeline.parse_case(args.case)
        put("montecarlo", f"epsilons_case_{case.lower()}", args.epsilons)
    return RunConfig.model_validate(data)


def _dispatch(config: RunConfig, args: argparse.Namespace) -> dict[str, Any]:
    command = args.command
    if command == "train":
        _, history, train_dir = pipeline.run_train(config, resume_from=args.resume)
        return {
            "train_dir": str(train_dir),
            "final_epoch": history.final_epoch,
            "final_loss": history.records[-1].total if history.records else None,
            "e_v": history.grid_metrics.e_v if history.grid_metrics else None,
            "e_l": history.grid_metrics.e_l if history.grid_metrics else None,
        }
    if command == "surface":
        grid = None
        if args.shape is not None:
            grid = EvaluationGrid(region=config.evaluation_grid.region, shape=args.shape)
        return {"surface": str(pipeline.run_surface(config, args.checkpoint, grid))}
    if command == "mpp":
        path, summary = pipeline.run_mpp(config, args.case, args.checkpoint)
        if path.status != "converged":
            raise NumericalError(f"path {path.status}: {'; '.join(path.warnings)}")
        return summary.model_dump(by_alias=True)
    if command == "prefactor":
        report = pipeline.run_prefactor(config, args.case, args.checkpoint, wkb=args.wkb)
        return {
            "case": report.case,
            "v_star": report.v_star,
            "l_coefficient": report.l_coefficient,
            "epsilon_power": report.epsilon_power,
            "div_integral": report.div_integral,
            "warnings": report.warnings,
        }
    if command == "met":
        return {"met": str(pipeline.run_met(config, args.case, args.epsilons))}
    if command == "mc":
        stats = pipeline.run_mc(config, args.case)
        return stats.model_dump(by_alias=True)
    table = pipeline.run_report(config, args.case)
    return {"case": table.case, "max_abs_rel_err": table.max_abs_rel_err}


def main(argv: Sequence[str] | None = None) -> int:
    """
    CLI entry point.

    Returns:
        Process exit code (0, 2 or 64)
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = apply_overrides(pipeline.load_run_config(args.config), args)
        result = _dispatch(config, args)
    except NumericalError as e:
        sys.stderr.write(f"ldp {args.command}: numerical failure: {e}\n")
        return EXIT_NUMERICAL
    except (UsageError, CheckpointError, ValidationError, FileNotFoundError) as e:
        sys.stderr.write(f"ldp {args.command}: {e}\n")
        return EXIT_USAGE

    sys.stdout.write(f"{json.dumps(result, indent=2)}\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
