"""Damped and deflated Newton, multistart search and stability checks."""

from trisolve.solvers.deflation import DeflatedSystem, deflated_residual
from trisolve.solvers.multistart import (
    MinimaPair,
    SolutionRecord,
    SolutionSet,
    Start,
    build_starts,
    minima_pair,
    multistart_find,
)
from trisolve.solvers.newton import NewtonResult, NonlinearSystem, newton_solve
from trisolve.solvers.options import SolverOptions
from trisolve.solvers.stability import hessian_min_eigenvalue, is_local_min

__all__ = [
    "SolverOptions",
    "NonlinearSystem",
    "NewtonResult",
    "newton_solve",
    "DeflatedSystem",
    "deflated_residual",
    "Start",
    "SolutionRecord",
    "SolutionSet",
    "MinimaPair",
    "build_starts",
    "multistart_find",
    "minima_pair",
    "hessian_min_eigenvalue",
    "is_local_min",
]
