"""Nonlinearity catalog, primitives and hypothesis checks."""

from trisolve.nonlinearity.catalog import (
    Nonlinearity,
    NonlinearityKind,
    constant,
    load_table,
    make_builtin,
    plus_power,
    scale,
    scale_f_corollary2,
    table,
)
from trisolve.nonlinearity.quadrature import QuadraturePrimitive, adaptive_simpson
from trisolve.nonlinearity.thresholds import (
    Condition16Report,
    GrowthReport,
    ThresholdReport,
    check_condition16,
    gamma_corollary2,
    growth_report,
    lambda_interval,
    rho_sigma,
    threshold_report,
)

__all__ = [
    "Nonlinearity",
    "NonlinearityKind",
    "make_builtin",
    "plus_power",
    "constant",
    "table",
    "load_table",
    "scale",
    "scale_f_corollary2",
    "adaptive_simpson",
    "QuadraturePrimitive",
    "ThresholdReport",
    "Condition16Report",
    "GrowthReport",
    "rho_sigma",
    "gamma_corollary2",
    "lambda_interval",
    "threshold_report",
    "check_condition16",
    "growth_report",
]
