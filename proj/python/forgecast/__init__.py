"""Time-series prediction under distribution shift via learned forgetting.

Thin wrapper over the C++ extension: synthetic generators, weighted ridge
solves, implicit bilevel gradients for the forgetting parameters, and the
experiment harness entry point.
"""

from ._forgecast import (
    fit_forgetting,
    generate,
    kalman_predict,
    mse,
    run_config,
    solve_ridge,
    to_supervised,
    upper_gradient,
    weight_jacobian,
    weight_vector,
    wilcoxon_signed_rank,
)

__all__ = [
    "fit_forgetting",
    "generate",
    "kalman_predict",
    "mse",
    "run_config",
    "solve_ridge",
    "to_supervised",
    "upper_gradient",
    "weight_jacobian",
    "weight_vector",
    "wilcoxon_signed_rank",
]
