"""Decomposition training: loss, optimizer, trainer and error metrics."""

from large_deviation_prefactors.training.adam import (
    AdamState,
    adam_init,
    adam_step,
    decayed_learning_rate,
)
from large_deviation_prefactors.training.losses import (
    DecompositionLoss,
    LossComponents,
    decomposition_terms,
    loss_components,
)
from large_deviation_prefactors.training.metrics import (
    approximation_errors,
    describe_grid,
    grid_points,
)
from large_deviation_prefactors.training.trainer import (
    DecompositionTrainer,
    sample_training_set,
    train,
)

__all__ = [
    "AdamState",
    "DecompositionLoss",
    "DecompositionTrainer",
    "LossComponents",
    "adam_init",
    "adam_step",
    "approximation_errors",
    "decayed_learning_rate",
    "decomposition_terms",
    "describe_grid",
    "grid_points",
    "loss_components",
    "sample_training_set",
    "train",
]
