"""
Error hierarchy

Every failure raised by the package falls in one of two families, which the CLI
maps onto exit codes:

    - UsageError (exit 64): bad arguments, dimension mismatches, unknown keys
    - NumericalError (exit 2): non-finite values, divergence, non-convergence,
      violated large-deviation assumptions
"""

import numpy as np


class UsageError(ValueError):
    """Caller passed arguments that cannot be honoured."""


class CheckpointError(ValueError):
    """Checkpoint file is corrupt, of another format version, or of the wrong shape."""


class NumericalError(RuntimeError):
    """A computation produced a non-finite or otherwise unusable result."""


class AssumptionViolation(NumericalError):
    """A named large-deviation assumption does not hold for the inputs."""

    def __init__(self, assumption: str, detail: str):
        self.assumption = assumption
        self.detail = detail
        super().__init__(f"assumption {assumption} violated: {detail}")


class TrainingDiverged(NumericalError):
    """Training loss exceeded the divergence guard."""

    def __init__(self, epoch: int, loss: float, last_checkpoint: str | None):
        self.epoch = epoch
        self.loss = loss
        self.last_checkpoint = last_checkpoint
        where = f"; last good checkpoint: {last_checkpoint}" if last_checkpoint else ""
        super().__init__(f"training diverged at epoch {epoch} (loss={loss!r}){where}")


def require_finite(values: object, what: str) -> None:
    """Raise NumericalError naming `what` if any entry of `values` is not finite."""
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite value in {what}")
