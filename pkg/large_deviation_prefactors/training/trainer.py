"""
Decomposition trainer

Full-batch Adam on the decomposition loss over a fixed random training set.

Features:
    - Training points sampled once from the region (deterministic given seed)
    - Per-epoch loss records (evaluated before each update)
    - Geometric step-size decay from learning_rate to final_learning_rate
    - Checkpoints of the starting weights, at a fixed epoch cadence, and at the end
    - Divergence guard: loss above threshold or non-finite aborts with the
      last good checkpoint
    - Resume from a checkpoint, continuing the epoch counter with a fresh Adam state
    - Optional e_V / e_l metrics on the evaluation grid and the training points

Each stage boundary is logged via log_decision() when an output directory is set.
"""

import time
from pathlib import Path

import numpy as np

from large_deviation_prefactors.fields.potential_field import LearnedField
from large_deviation_prefactors.models.architecture import Architecture
from large_deviation_prefactors.models.run_config import EvaluationGrid, TrainConfig
from large_deviation_prefactors.models.train_history import EpochRecord, TrainHistory
from large_deviation_prefactors.network.checkpoint import read_checkpoint, save_checkpoint
from large_deviation_prefactors.network.diffnet import (
    NetworkParams,
    init_network,
    parameter_gradient,
)
from large_deviation_prefactors.systems.base import DriftSystem
from large_deviation_prefactors.systems.doublewell import AnalyticBenchmark
from large_deviation_prefactors.training.adam import (
    adam_init,
    adam_step,
    decayed_learning_rate,
)
from large_deviation_prefactors.training.losses import make_loss
from large_deviation_prefactors.training.metrics import (
    approximation_errors,
    describe_grid,
    grid_points,
)
from large_deviation_prefactors.utils.decision_logger import log_decision
from large_deviation_prefactors.utils.errors import (
    NumericalError,
    TrainingDiverged,
    UsageError,
    require_finite,
)
from large_deviation_prefactors.utils.io_utils import write_csv

HISTORY_HEADER = ["epoch", "L_dyn", "L_orth", "L0", "total"]


def sample_training_set(cfg: TrainConfig) -> np.ndarray:
    """N i.i.d. uniform points in cfg.region, shape (N, n)."""
    rng = np.random.default_rng([cfg.seed, 0])
    lower = np.asarray(cfg.region.lower, dtype=float)
    upper = np.asarray(cfg.region.upper, dtype=float)
    return rng.uniform(lower, upper, size=(cfg.n_samples, cfg.region.dim))


def write_history_csv(history: TrainHistory, filepath: str | Path) -> Path:
    rows = [(r.epoch, r.l_dyn, r.l_orth, r.l_zero, r.total) for r in history.records]
    return write_csv(filepath, HISTORY_HEADER, rows)


class DecompositionTrainer:
    """
    Trains the (V_hat, l) network of one drift system.
    """

    def __init__(
        self,
        system: DriftSystem,
        arch: Architecture,
        cfg: TrainConfig,
        run_id: str = "train",
        output_dir: str | None = None,
    ):
        """
        Initialize the trainer.

        Args:
            system: Drift system to decompose
            arch: Network architecture
            cfg: Loss weights, sampling and optimizer settings
            run_id: Run identifier for checkpoints and decision logs
            output_dir: Output root; None keeps everything in memory
        """
        if arch.input_dim != system.dim or cfg.region.dim != system.dim:
            raise UsageError(
                f"architecture input {arch.input_dim} / region dimension {cfg.region.dim} "
                f"do not match system dimension {system.dim}"
            )
        self.system = system
        self.arch = arch
        self.cfg = cfg
        self.run_id = run_id
        self.output_dir = output_dir
        self.x_bar = system.check_point(cfg.x_bar)
        self.points = sample_training_set(cfg)
        self.loss = make_loss(system, self.points, cfg)

    @property
    def checkpoint_dir(self) -> Path | None:
        if self.output_dir is None:
            return None
        return Path(self.output_dir) / self.run_id / "train" / "checkpoints"

    def _log(self, epoch: int, decision: str, reasoning: str, **parameters: object) -> None:
        if self.output_dir is None:
            return
        log_decision(
            run_id=self.run_id,
            iteration=epoch,
            agent="Trainer",
            decision=decision,
            reasoning=reasoning,
            parameters=dict(parameters),
            output_dir=self.output_dir,
        )

    def _save(
        self, params: NetworkParams, epoch: int, total: float | None, name: str
    ) -> str | None:
        ckpt_dir = self.checkpoint_dir
        if ckpt_dir is None:
            return None
        path = save_checkpoint(
            params,
            ckpt_dir / name,
            metadata={
                "epoch": epoch,
                "total_loss": total,
                "x_bar": self.x_bar.tolist(),
                "system": getattr(self.system, "name", type(self.system).__name__),
                "train": self.cfg.model_dump(),
            },
        )
        return str(path)

    def _initial(self, resume_from: str | Path | None) -> tuple[NetworkParams, int]:
        if resume_from is None:
            return init_network(self.arch, self.cfg.seed), 0
        params, header = read_checkpoint(resume_from, expected_input_dim=self.system.dim)
        if header.architecture.layer_sizes != self.arch.layer_sizes:
            raise UsageError(
                f"checkpoint layers {header.architecture.layer_sizes} differ from "
                f"configured {self.arch.layer_sizes}"
            )
        start = int(header.metadata.get("epoch", 0))
        self._log(
            start,
            "Resume training",
            "Continuing from checkpoint with a fresh Adam state",
            checkpoint=str(resume_from),
            start_epoch=start,
        )
        return params, start

    def run(
        self,
        resume_from: str | Path | None = None,
        bench: AnalyticBenchmark | None = None,
        grid: EvaluationGrid | None = None,
    ) -> tuple[NetworkParams, TrainHistory]:
        """
        Train for cfg.epochs full-batch epochs.

        Args:
            resume_from: Optional checkpoint to continue from
            bench: Exact decomposition; when given, e_V / e_l are computed
            grid: Evaluation lattice for the grid metrics (default lattice if None)

        Returns:
            (final parameters, history)

        Raises:
            TrainingDiverged: loss above cfg.divergence_threshold or non-finite
        """
        cfg = self.cfg
        params, start = self._initial(resume_from)
        arch, seed = params.architecture, params.seed
        batch = self.loss.batch
        state = adam_init(params.flatten())
        records: list[EpochRecord] = []
        last_checkpoint: str | None = str(resume_from) if resume_from is not None else None
        if resume_from is None:
            last_checkpoint = self._save(params, start, None, f"epoch_{start:06d}.ckpt")
        t0 = time.perf_counter()

        self._log(
            start,
            "Start training",
            f"Full-batch Adam for {cfg.epochs} epochs on {cfg.n_samples} points",
            epochs=cfg.epochs,
            n_samples=cfg.n_samples,
            learning_rate=cfg.learning_rate,
            final_learning_rate=cfg.final_learning_rate,
            gamma1=cfg.gamma1,
            gamma2=cfg.gamma2,
            delta=cfg.delta,
            seed=cfg.seed,
        )

        for epoch in range(start + 1, start + cfg.epochs + 1):
            current = NetworkParams.from_flat(arch, state.params, seed)
            value = float("nan")
            try:
                value, gradient = parameter_gradient(current, batch, self.loss)
                require_finite(value, "total loss")
            except NumericalError:
                gradient = None

            if gradient is None or not np.isfinite(value) or value > cfg.divergence_threshold:
                self._log(
                    epoch,
                    "Abort training",
                    f"Loss {value!r} exceeded the divergence guard {cfg.divergence_threshold:g}",
                    loss=value if np.isfinite(value) else str(value),
                    last_checkpoint=last_checkpoint,
                )
                raise TrainingDiverged(epoch, value, last_checkpoint)

            terms = self.loss.last
            assert terms is not None
            records.append(
                EpochRecord(
                    epoch=epoch,
                    l_dyn=terms.l_dyn,
                    l_orth=terms.l_orth,
                    l_zero=terms.l_zero,
                    total=terms.total,
                )
            )
            lr = decayed_learning_rate(
                cfg.learning_rate, cfg.final_learning_rate, epoch - start - 1, cfg.epochs
            )
            state = adam_step(state, gradient.flatten(), lr)

            if epoch % cfg.checkpoint_every == 0:
                updated = NetworkParams.from_flat(arch, state.params, seed)
                saved = self._save(updated, epoch, terms.total, f"epoch_{epoch:06d}.ckpt")
                if saved is not None:
                    last_checkpoint = saved
                    self._log(
                        epoch,
                        "Checkpoint",
                        f"Total loss {terms.total:.3e}",
                        path=saved,
                        total=terms.total,
                    )

        final = NetworkParams.from_flat(arch, state.params, seed)
        history = TrainHistory(
            records=records,
            start_epoch=start,
            wall_time_s=time.perf_counter() - t0,
        )
        if bench is not None:
            field = LearnedField(self.system, final, self.x_bar)
            grid = grid or EvaluationGrid(region=cfg.region)
            history.grid_metrics = approximation_errors(
                field, bench, grid_points(grid), describe_grid(grid)
            )
            history.train_metrics = approximation_errors(
                field, bench, self.points, f"{cfg.n_samples} training points"
            )

        final_total = records[-1].total if records else None
        final_path = self._save(final, history.final_epoch, final_total, "final.ckpt")
        if self.output_dir is not None:
            train_dir = Path(self.output_dir) / self.run_id / "train"
            write_history_csv(history, train_dir / "history.csv")
            self._log(
                history.final_epoch,
                "Finish training",
                f"{len(records)} epochs in {history.wall_time_s:.1f}s",
                final_loss=final_total,
                checkpoint=final_path,
                e_v=history.grid_metrics.e_v if history.grid_metrics else None,
                e_l=history.grid_metrics.e_l if history.grid_metrics else None,
            )
        return final, history


def train(
    system: DriftSystem,
    arch: Architecture,
    cfg: TrainConfig,
    *,
    run_id: str = "train",
    output_dir: str | None = None,
    resume_from: str | Path | None = None,
    bench: AnalyticBenchmark | None = None,
    grid: EvaluationGrid | None = None,
) -> tuple[NetworkParams, TrainHistory]:
    """Train the decomposition network; see DecompositionTrainer.run."""
    trainer = DecompositionTrainer(system, arch, cfg, run_id=run_id, output_dir=output_dir)
    return trainer.run(resume_from=resume_from, bench=bench, grid=grid)
