"""
Tests for exit-time Monte Carlo

Validates exit regions, per-trajectory streams, the Euler-Maruyama exit-time
estimator against Brownian motion, censoring, reproducibility across worker
counts, and the formula comparison table.
"""

import dataclasses
import math

import numpy as np
import pytest

from large_deviation_prefactors.models.exit_stats import EpsilonStats, ExitTimeStats
from large_deviation_prefactors.models.prefactor_report import (
    HessianResult,
    PrefactorReport,
    Provenance,
)
from large_deviation_prefactors.models.run_config import CaseABoundary
from large_deviation_prefactors.montecarlo import (
    COMPARISON_HEADER,
    BallExit,
    McSetup,
    beyond_saddle,
    compare_with_formula,
    comparison_rows,
    exit_time_stats,
    half_space_from_boundary,
    simulate_batch,
    simulate_exit,
    trajectory_stream,
)
from large_deviation_prefactors.systems import DoubleWellSystem, FreeDiffusion
from large_deviation_prefactors.utils.errors import NumericalError, UsageError


def _brownian(epsilons=(1.0,), trajectories=300, dt=1e-3, radius=0.5, max_steps=10**6):
    return McSetup(
        system=FreeDiffusion(dim=1),
        start=np.zeros(1),
        exit_region=BallExit(center=np.zeros(1), radius=radius),
        dt=dt,
        max_steps=max_steps,
        epsilons=tuple(epsilons),
        trajectories=trajectories,
        seed=99,
    )


def _report(epsilons=()) -> PrefactorReport:
    return PrefactorReport(
        case="B",
        v_star=0.5,
        exit_point=[0.0, 0.0],
        h_bar=HessianResult(matrix=[[4.0, 0.0], [0.0, 1.0]], method="lyapunov"),
        div_integral=0.0,
        l_coefficient=1.1,
        epsilon_power=0.0,
        epsilons=list(epsilons),
        provenance=Provenance(backing="analytic"),
    )


class TestRegions:
    """Test exit regions."""

    def test_case_a_half_space(self):
        """Test exit at x1 >= -0.5."""
        region = half_space_from_boundary(CaseABoundary())
        np.testing.assert_array_equal(
            region.exited(np.array([[-0.6, 0.0], [-0.5, 0.3], [0.0, 0.0]])), [False, True, True]
        )

    def test_beyond_saddle(self):
        """Test exit at x1 >= 0 past the saddle."""
        region = beyond_saddle(np.zeros(2), np.array([-1.0, 0.0]))
        np.testing.assert_allclose(region.normal, [1.0, 0.0])
        assert region.offset == 0.0

    def test_ball_radius(self):
        """Test a non-positive radius."""
        with pytest.raises(UsageError):
            BallExit(center=np.zeros(2), radius=0.0)


class TestStreams:
    """Test per-trajectory random streams."""

    def test_stream_is_keyed(self):
        """Test the same key repeats and another key differs."""
        a = trajectory_stream(1, 0, 5).standard_normal(4)
        b = trajectory_stream(1, 0, 5).standard_normal(4)
        c = trajectory_stream(1, 1, 5).standard_normal(4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)


class TestSetup:
    """Test McSetup validation."""

    def test_start_outside_domain(self):
        """Test a start point that already exited."""
        with pytest.raises(UsageError):
            McSetup(
                system=DoubleWellSystem(),
                start=np.array([0.5, 0.0]),
                exit_region=beyond_saddle(np.zeros(2), np.array([-1.0, 0.0])),
                dt=1e-3,
                max_steps=10,
                epsilons=(0.1,),
                trajectories=1,
                seed=0,
            )

    def test_bad_substeps(self):
        """Test a step must draw at least one normal."""
        with pytest.raises(UsageError):
            dataclasses.replace(_brownian(), noise_substeps=0)

    def test_bad_dt(self):
        """Test a non-positive time step."""
        with pytest.raises(UsageError):
            _brownian(dt=0.0)


class TestSimulation:
    """Test exit-time simulation."""

    def test_single_trajectory_matches_batch(self):
        """Test a trajectory's exit time does not depend on its batch."""
        setup = _brownian()
        batch = simulate_batch(setup, 1.0, 0, range(10))
        assert simulate_exit(setup, 1.0, 7) == batch[7]
        assert all(t is not None and t > 0 for t in batch)

    def test_zero_noise_is_censored(self):
        """Test eps = 0 never leaves the stable point."""
        setup = McSetup(
            system=DoubleWellSystem(),
            start=np.array([-1.0, 0.0]),
            exit_region=beyond_saddle(np.zeros(2), np.array([-1.0, 0.0])),
            dt=1e-3,
            max_steps=100,
            epsilons=(0.0,),
            trajectories=3,
            seed=0,
        )
        assert simulate_exit(setup, 0.0, 0) is None
        with pytest.raises(NumericalError, match="censored"):
            exit_time_stats(setup)

    def test_single_trajectory_has_no_stderr(self):
        """Test M = 1 reports no standard error."""
        stats = exit_time_stats(_brownian(trajectories=1))
        assert stats.records[0].count == 1
        assert stats.records[0].stderr is None

    def test_brownian_exit_time(self):
        """Test E[tau] = a^2 / eps for Brownian exit from (-a, a)."""
        stats = exit_time_stats(_brownian(trajectories=1000, dt=1e-4))
        record = stats.records[0]
        assert record.censored == 0
        assert record.mean == pytest.approx(0.25, rel=0.1)

    def test_halving_dt_within_one_stderr(self):
        """Test runs at dt and dt / 2 on a shared Brownian path agree within one standard error."""
        coarse = dataclasses.replace(_brownian(trajectories=1000, dt=2e-4), noise_substeps=2)
        fine = _brownian(trajectories=1000, dt=1e-4)
        coarse_record = exit_time_stats(coarse).records[0]
        fine_record = exit_time_stats(fine).records[0]
        assert abs(coarse_record.mean - fine_record.mean) < fine_record.stderr

    def test_substeps_keep_exit_time_scale(self):
        """Test summing normals per step leaves the Brownian exit time unchanged."""
        setup = dataclasses.replace(_brownian(trajectories=1000, dt=1e-4), noise_substeps=4)
        stats = exit_time_stats(setup)
        assert stats.records[0].mean == pytest.approx(0.25, rel=0.1)

    def test_exit_time_decreases_with_noise(self):
        """Test a larger eps exits sooner."""
        stats = exit_time_stats(_brownian(epsilons=(1.0, 2.0), trajectories=400))
        slow, fast = stats.records
        assert fast.mean < slow.mean

    def test_reproducible_across_worker_counts(self):
        """Test one and two workers give identical statistics."""
        setup = _brownian(trajectories=300)
        serial = exit_time_stats(setup, workers=1)
        parallel = exit_time_stats(setup, workers=2)
        assert serial.records == parallel.records


class TestComparison:
    """Test the formula comparison table."""

    def test_exact_agreement(self):
        """Test MC equal to the formula gives zero relative error."""
        formula = 1.1 * math.exp(0.5 / 0.2)
        stats = ExitTimeStats(
            dt=1e-3,
            trajectories=10,
            max_steps=100,
            seed=0,
            records=[EpsilonStats(epsilon=0.2, mean=formula, stderr=0.5, count=10, censored=0)],
        )
        table = compare_with_formula(stats, _report([0.2]))
        row = table.rows[0]
        assert row.rel_err == pytest.approx(0.0, abs=1e-15)
        assert row.z_score == pytest.approx(0.0, abs=1e-12)
        assert row.arrhenius == pytest.approx(0.2 * math.log(formula))
        assert table.max_abs_rel_err == pytest.approx(0.0, abs=1e-15)
        assert len(comparison_rows(table)[0]) == len(COMPARISON_HEADER)

    def test_all_censored_epsilon_has_no_error(self):
        """Test a record without a mean is carried without errors."""
        stats = ExitTimeStats(
            dt=1e-3,
            trajectories=10,
            max_steps=100,
            seed=0,
            records=[EpsilonStats(epsilon=0.2, mean=None, stderr=None, count=0, censored=10)],
        )
        table = compare_with_formula(stats, _report())
        assert table.rows[0].rel_err is None
        assert table.max_abs_rel_err is None

    def test_mismatched_grids(self):
        """Test report and simulation at different eps."""
        stats = ExitTimeStats(
            dt=1e-3,
            trajectories=10,
            max_steps=100,
            seed=0,
            records=[EpsilonStats(epsilon=0.2, mean=1.0, stderr=0.1, count=10, censored=0)],
        )
        with pytest.raises(UsageError):
            compare_with_formula(stats, _report([0.1]))
