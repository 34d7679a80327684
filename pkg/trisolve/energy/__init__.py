"""Energy functionals, residuals and the saddle functional Φ."""

from trisolve.energy.functional import (
    ENERGIES,
    JACOBIANS,
    RESIDUALS,
    ProblemConfig,
    energy,
    energy_aux8,
    gradient_check,
    jacobian,
    jacobian_aux8,
    make_problem,
    residual,
    residual_aux8,
    saddle_gradients,
    saddle_phi,
)

__all__ = [
    "ProblemConfig",
    "make_problem",
    "energy",
    "residual",
    "jacobian",
    "energy_aux8",
    "residual_aux8",
    "jacobian_aux8",
    "saddle_phi",
    "saddle_gradients",
    "gradient_check",
    "ENERGIES",
    "RESIDUALS",
    "JACOBIANS",
]
