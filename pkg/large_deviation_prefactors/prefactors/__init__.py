"""Case A / Case B prefactors, boundary flux quadrature, WKB prefactor, mean exit times."""

from large_deviation_prefactors.prefactors.engine import (
    MET_HEADER,
    boundary_flux,
    mean_exit_time,
    met_table,
    mu_star,
    normal_speed,
    prefactor_case_a,
    prefactor_case_b,
    saddle_hessian,
    stable_hessian,
    tangent_basis,
    tangential_hessian_det,
    wkb_prefactor,
)

__all__ = [
    "MET_HEADER",
    "boundary_flux",
    "mean_exit_time",
    "met_table",
    "mu_star",
    "normal_speed",
    "prefactor_case_a",
    "prefactor_case_b",
    "saddle_hessian",
    "stable_hessian",
    "tangent_basis",
    "tangential_hessian_det",
    "wkb_prefactor",
]
