"""
Tests for the ldp command-line interface

Runs the subcommands end to end on the analytic double well with small
settings, and checks the exit-code mapping.
"""

import json
from dataclasses import replace

import numpy as np
import pytest

from large_deviation_prefactors.models.architecture import Architecture
from large_deviation_prefactors.models.run_config import RunConfig
from large_deviation_prefactors.network import forward, init_network, save_checkpoint
from large_deviation_prefactors.orchestrators.cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    apply_overrides,
    build_parser,
    main,
)
from large_deviation_prefactors.orchestrators.pipeline import build_field, parse_case
from large_deviation_prefactors.utils.decision_logger import load_decision_logs
from large_deviation_prefactors.utils.errors import NumericalError, UsageError
from large_deviation_prefactors.utils.io_utils import read_csv


@pytest.fixture
def small_config(tmp_path):
    """Config file with a quick Case B Monte Carlo at eps = 0.5."""
    config = RunConfig.model_validate(
        {
            "run_id": "cli",
            "anchor_tolerance": None,
            "train": {"n_samples": 16, "epochs": 2, "checkpoint_every": 1},
            "architecture": {"hidden_widths": [6, 6]},
            "evaluation_grid": {"shape": [5, 4]},
            "montecarlo": {
                "trajectories": 20,
                "dt": 0.001,
                "max_steps": 200000,
                "epsilons_case_b": [0.5],
            },
        }
    )
    path = tmp_path / "config.json"
    path.write_text(config.model_dump_json(by_alias=True), encoding="utf-8")
    return path


def _anchored_checkpoint(path, anchor):
    """Checkpoint whose V_hat(x_bar) equals `anchor`."""
    params = init_network(Architecture(input_dim=2, hidden_widths=[6]), seed=3)
    current = float(forward(params, np.array([-1.0, 0.0]))[0])
    last = params.biases[-1].copy()
    last[0] += anchor - current
    params = replace(params, biases=(*params.biases[:-1], last))
    return save_checkpoint(params, path, {"x_bar": [-1.0, 0.0]})


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if code == EXIT_OK else None


class TestParsing:
    """Test argument parsing and overrides."""

    def test_case_labels(self):
        """Test case labels are normalised."""
        assert parse_case(" b ") == "B"
        with pytest.raises(UsageError):
            parse_case("C")

    def test_overrides_reach_config(self):
        """Test training flags land in the train section."""
        args = build_parser().parse_args(["train", "--n", "10", "--epochs", "0", "--lr", "0.01"])
        config = apply_overrides(RunConfig(), args)
        assert config.train.n_samples == 10
        assert config.train.epochs == 0
        assert config.train.learning_rate == 0.01
        assert config.train.gamma1 == 1.0

    def test_epsilons_override_per_case(self):
        """Test --epsilons replaces the grid of the selected case only."""
        args = build_parser().parse_args(["mc", "--case", "a", "--epsilons", "0.3", "0.4"])
        config = apply_overrides(RunConfig(), args)
        assert config.montecarlo.epsilons_case_a == [0.3, 0.4]
        assert config.montecarlo.epsilons_case_b == [0.1, 0.12, 0.15, 0.2]

    def test_missing_case_is_usage_error(self):
        """Test argparse errors exit with 64."""
        with pytest.raises(SystemExit) as excinfo:
            main(["mpp"])
        assert excinfo.value.code == EXIT_USAGE


class TestExitCodes:
    """Test error-to-exit-code mapping."""

    def test_missing_config(self, tmp_path):
        """Test a config path that does not exist."""
        assert main(["mpp", "--case", "A", "--config", str(tmp_path / "none.json")]) == EXIT_USAGE

    def test_unknown_case(self, tmp_path):
        """Test --case C."""
        assert main(["mpp", "--case", "C", "--output-dir", str(tmp_path)]) == EXIT_USAGE

    def test_invalid_override(self, tmp_path):
        """Test a flag value rejected by the config schema."""
        code = main(["train", "--gamma1", "-1", "--output-dir", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_met_without_report(self, tmp_path):
        """Test tabulating before a prefactor report exists."""
        assert main(["met", "--case", "A", "--output-dir", str(tmp_path)]) == EXIT_USAGE

    def test_unconverged_path(self, tmp_path, capsys):
        """Test a path cut by the length cap is a numerical failure."""
        config = RunConfig.model_validate({"path": {"max_length": 0.01}})
        path = tmp_path / "short.json"
        path.write_text(config.model_dump_json(by_alias=True), encoding="utf-8")
        code = main(["mpp", "--case", "A", "--config", str(path), "--output-dir", str(tmp_path)])
        assert code == EXIT_NUMERICAL


class TestCommands:
    """Test subcommands end to end."""

    def test_mpp_case_a(self, tmp_path, capsys):
        """Test the Case A path files and summary."""
        code, result = _run(capsys, "mpp", "--case", "A", "--output-dir", str(tmp_path))
        assert code == EXIT_OK
        assert result["status"] == "converged"
        assert result["backing"] == "analytic"
        run_dir = tmp_path / "doublewell-rot"
        assert (run_dir / "paths" / "case_A.csv").exists()
        assert (run_dir / "paths" / "case_A.json").exists()
        assert (run_dir / "provenance_mpp.json").exists()
        logs = load_decision_logs(
            "doublewell-rot", agent="PathIntegrator", output_dir=str(tmp_path)
        )
        assert len(logs) == 1

    def test_prefactor_then_met(self, tmp_path, capsys):
        """Test the Case A report feeds the MET table."""
        code, result = _run(
            capsys, "prefactor", "--case", "A", "--wkb", "--output-dir", str(tmp_path)
        )
        assert code == EXIT_OK
        assert result["epsilon_power"] == 0.5
        reports = tmp_path / "doublewell-rot" / "reports"
        assert (reports / "prefactor_A.json").exists()
        assert (reports / "wkb_A.csv").exists()

        code, _ = _run(capsys, "met", "--case", "A", "--output-dir", str(tmp_path))
        assert code == EXIT_OK
        header, rows = read_csv(reports / "met_A.csv")
        assert header == ["epsilon", "L", "V_star", "met_formula"]
        assert [float(r[0]) for r in rows] == [0.08, 0.1, 0.14, 0.2]

    def test_surface(self, tmp_path, capsys):
        """Test the exact surface on a small lattice."""
        code, _ = _run(capsys, "surface", "--shape", "3", "4", "--output-dir", str(tmp_path))
        assert code == EXIT_OK
        header, rows = read_csv(tmp_path / "doublewell-rot" / "reports" / "surface.csv")
        assert header == ["x1", "x2", "V_true", "l1_true", "l2_true"]
        assert len(rows) == 12

    def test_train_then_learned_surface(self, tmp_path, capsys, small_config):
        """Test a short training run and the learned surface from its checkpoint."""
        out = str(tmp_path / "out")
        code, result = _run(capsys, "train", "--config", str(small_config), "--output-dir", out)
        assert code == EXIT_OK
        assert result["final_epoch"] == 2
        assert result["e_v"] is not None
        train_dir = tmp_path / "out" / "cli" / "train"
        checkpoint = train_dir / "checkpoints" / "final.ckpt"
        assert checkpoint.exists()
        assert (train_dir / "metrics.json").exists()

        code, _ = _run(
            capsys,
            "surface",
            "--config",
            str(small_config),
            "--output-dir",
            out,
            "--checkpoint",
            str(checkpoint),
        )
        assert code == EXIT_OK
        header, _ = read_csv(tmp_path / "out" / "cli" / "reports" / "surface.csv")
        assert header[:5] == ["x1", "x2", "V_theta", "l1_theta", "l2_theta"]

    def test_mc_and_report_case_b(self, tmp_path, capsys, small_config):
        """Test Monte Carlo, prefactor and the comparison report, rerun byte-identical."""
        out = str(tmp_path / "out")
        common = ["--case", "B", "--config", str(small_config), "--output-dir", out]
        code, stats = _run(capsys, "mc", *common)
        assert code == EXIT_OK
        assert stats["records"][0]["epsilon"] == 0.5
        assert stats["records"][0]["count"] + stats["records"][0]["censored"] == 20

        assert _run(capsys, "prefactor", *common)[0] == EXIT_OK
        code, result = _run(capsys, "report", *common)
        assert code == EXIT_OK
        assert result["case"] == "B"

        comparison = tmp_path / "out" / "cli" / "reports" / "comparison_B.csv"
        first = comparison.read_bytes()
        assert _run(capsys, "report", *common)[0] == EXIT_OK
        assert comparison.read_bytes() == first


class TestCheckpointAnchor:
    """Test the anchor check applied to checkpoints loaded downstream."""

    def test_shifted_anchor_rejected(self, tmp_path):
        """Test V_hat(x_bar) = 0.3 is refused under the default tolerance."""
        checkpoint = _anchored_checkpoint(tmp_path / "shifted.ckpt", 0.3)
        with pytest.raises(NumericalError):
            build_field(RunConfig(), str(checkpoint))

    def test_pinned_anchor_accepted(self, tmp_path):
        """Test a checkpoint with V_hat(x_bar) = 0 loads, as does any anchor without a check."""
        pinned = _anchored_checkpoint(tmp_path / "pinned.ckpt", 0.0)
        assert abs(build_field(RunConfig(), str(pinned)).value([-1.0, 0.0])) < 1e-12
        shifted = _anchored_checkpoint(tmp_path / "shifted.ckpt", 0.3)
        config = RunConfig.model_validate({"anchor_tolerance": None})
        assert build_field(config, str(shifted)).value([-1.0, 0.0]) == pytest.approx(0.3)

    def test_shifted_anchor_exit_code(self, tmp_path):
        """Test the CLI reports a shifted checkpoint as a numerical failure."""
        checkpoint = _anchored_checkpoint(tmp_path / "shifted.ckpt", 0.3)
        code = main(
            ["surface", "--checkpoint", str(checkpoint), "--output-dir", str(tmp_path / "out")]
        )
        assert code == EXIT_NUMERICAL
