"""
Tests for ReasonLog model and decision logger

Validates the ReasonLog schema and how pipeline stages record their decisions.
"""

import json
import shutil
import tempfile
from pathlib import Path

import numpy as np

from large_deviation_prefactors.models.reason_log import ReasonLog
from large_deviation_prefactors.utils.decision_logger import load_decision_logs, log_decision


class TestReasonLog:
    """Test ReasonLog model."""

    def test_create_minimal_reason_log(self):
        """Test creating ReasonLog with minimal required fields."""
        log = ReasonLog(
            run_id="run_001",
            iteration=0,
            agent="PathIntegrator",
            decision="Path converged",
            reasoning="Entered the stopping ball",
        )
        assert log.schema_version == "ReasonLog@1"
        assert log.agent == "PathIntegrator"
        assert log.parameters == {}
        assert log.outcome is None

    def test_serialization_uses_schema_alias(self):
        """Test the schema version is dumped under its alias."""
        log = ReasonLog(
            run_id="r", iteration=5000, agent="Trainer", decision="d", reasoning="r"
        )
        data = log.model_dump(by_alias=True)
        assert data["schema"] == "ReasonLog@1"
        restored = ReasonLog(**data)
        assert restored.iteration == 5000

    def test_numpy_parameters_become_plain(self):
        """Test NumPy scalars and vectors in parameters are unwrapped."""
        log = ReasonLog(
            run_id="r",
            iteration=0,
            agent="Prefactor",
            decision="d",
            reasoning="r",
            parameters={"mu_star": np.float64(0.375), "x_star": np.array([-0.5, 0.0]), "n": 3},
        )
        assert log.parameters == {"mu_star": 0.375, "x_star": [-0.5, 0.0], "n": 3}
        assert type(log.parameters["mu_star"]) is float
        json.dumps(log.model_dump(by_alias=True))


class TestDecisionLogger:
    """Test log_decision and load_decision_logs."""

    def setup_method(self):
        """Create temporary directory for logs."""
        self.test_dir = tempfile.mkdtemp()

    def teardown_method(self):
        """Clean up temporary directory."""
        shutil.rmtree(self.test_dir)

    def test_log_decision_writes_file(self):
        """Test a decision lands under iter_<n>/reason_logs."""
        log_decision(
            run_id="run",
            iteration=0,
            agent="Prefactor",
            decision="Assembled Case B prefactor",
            reasoning="All assumptions hold",
            parameters={"lambda_star": 1.0, "div_integral": -0.7},
            output_dir=self.test_dir,
        )
        log_dir = Path(self.test_dir) / "run" / "iter_0" / "reason_logs"
        files = list(log_dir.glob("Prefactor_*.json"))
        assert len(files) == 1
        with open(files[0]) as f:
            data = json.load(f)
        assert data["parameters"]["lambda_star"] == 1.0

    def test_same_tick_decisions_do_not_overwrite(self):
        """Test several decisions of one stage are all kept."""
        for k in range(4):
            log_decision(
                run_id="run",
                iteration=0,
                agent="MonteCarlo",
                decision=f"Shard {k} done",
                reasoning="Shard finished",
                output_dir=self.test_dir,
            )
        logs = load_decision_logs("run", agent="MonteCarlo", output_dir=self.test_dir)
        assert len(logs) == 4

    def test_load_filters_by_iteration_and_agent(self):
        """Test loading logs filtered by epoch and stage."""
        log_decision("run", 0, "Trainer", "Start", "Fresh weights", output_dir=self.test_dir)
        log_decision("run", 5000, "Trainer", "Checkpoint", "Cadence", output_dir=self.test_dir)
        log_decision("run", 0, "Pipeline", "Train", "CLI", output_dir=self.test_dir)

        assert len(load_decision_logs("run", output_dir=self.test_dir)) == 3
        at_5000 = load_decision_logs("run", iteration=5000, output_dir=self.test_dir)
        assert [log.decision for log in at_5000] == ["Checkpoint"]
        trainer = load_decision_logs("run", agent="Trainer", output_dir=self.test_dir)
        assert len(trainer) == 2

    def test_iterations_are_loaded_in_numeric_order(self):
        """Test iter_10 sorts after iter_9."""
        log_decision("run", 10, "Trainer", "late", "r", output_dir=self.test_dir)
        log_decision("run", 9, "Trainer", "early", "r", output_dir=self.test_dir)
        logs = load_decision_logs("run", output_dir=self.test_dir)
        assert [log.iteration for log in logs] == [9, 10]

    def test_load_missing_run_returns_empty(self):
        """Test loading a run that was never logged."""
        assert load_decision_logs("absent", output_dir=self.test_dir) == []
