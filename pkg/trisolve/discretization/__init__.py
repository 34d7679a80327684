"""Meshes, discrete H¹₀/L² structures, SPD solves and the first Dirichlet eigenpair."""

from trisolve.discretization.eigen import (
    Eigenpair,
    first_eigenpair,
    lowest_eigenvalue,
    smallest_eigenpair,
)
from trisolve.discretization.fields import (
    Field,
    as_values,
    constant_field,
    read_field_csv,
    write_field_csv,
)
from trisolve.discretization.linalg import CGSolution, cg_solve, conjugate_gradient
from trisolve.discretization.mesh import Mesh, build_mesh
from trisolve.discretization.operators import (
    LinearOperator,
    OperatorKind,
    dual_norm,
    l2_norm,
    mass,
    stiffness,
)

__all__ = [
    "Mesh",
    "build_mesh",
    "LinearOperator",
    "OperatorKind",
    "stiffness",
    "mass",
    "l2_norm",
    "dual_norm",
    "Field",
    "as_values",
    "constant_field",
    "read_field_csv",
    "write_field_csv",
    "CGSolution",
    "cg_solve",
    "conjugate_gradient",
    "Eigenpair",
    "smallest_eigenpair",
    "first_eigenpair",
    "lowest_eigenvalue",
]
