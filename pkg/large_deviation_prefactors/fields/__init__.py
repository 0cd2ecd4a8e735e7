"""Quasipotential fields and their Hessians."""

from large_deviation_prefactors.fields.hessian import hessian_fd
from large_deviation_prefactors.fields.matrix_equations import (
    lyapunov_hessian,
    riccati_newton,
    riccati_residual,
)
from large_deviation_prefactors.fields.potential_field import (
    AnalyticField,
    FieldBatch,
    FieldSample,
    LearnedField,
    PotentialField,
    eval_field,
)

__all__ = [
    "AnalyticField",
    "FieldBatch",
    "FieldSample",
    "LearnedField",
    "PotentialField",
    "eval_field",
    "hessian_fd",
    "lyapunov_hessian",
    "riccati_newton",
    "riccati_residual",
]
