"""Discrete H¹₀ and L² structures: stiffness and lumped mass."""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from trisolve.discretization.mesh import Mesh


class OperatorKind(str, Enum):
    stiffness = "stiffness"
    mass = "mass"


@dataclass(frozen=True, eq=False)
class LinearOperator:
    kind: OperatorKind
    mesh: Mesh
    matrix: sp.csr_matrix | None = field(default=None, repr=False)
    diagonal: np.ndarray | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.mesh.interior_count

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.kind is OperatorKind.mass:
            return self.diagonal * v
        return self.matrix @ v

    def quadratic(self, v: np.ndarray) -> float:
        """vᵀ·op·v."""
        v = np.asarray(v, dtype=float)
        return float(v @ self.apply(v))


def _second_difference(k: int) -> sp.csr_matrix:
    """tridiag(-1, 2, -1) of size k."""
    ones = np.ones(k)
    return sp.diags([-ones[:-1], 2.0 * ones, -ones[:-1]], [-1, 0, 1], format="csr")


@lru_cache(maxsize=32)
def stiffness(mesh: Mesh) -> LinearOperator:
    """vᵀAv is the exact Dirichlet energy ∫|∇v|² of the piecewise-linear
    interpolant (right-triangle split of each cell in 2D).

    1D: (1/h)·tridiag(-1, 2, -1). 2D: 5-point stencil with per-axis weights
    h_y/h_x and h_x/h_y (unit weights on square cells).
    """
    k = mesh.cells_per_side - 1
    if mesh.dim == 1:
        matrix = _second_difference(k) / mesh.h[0]
    else:
        hx, hy = mesh.h
        t = _second_difference(k)
        eye = sp.identity(k, format="csr")
        matrix = (hy / hx) * sp.kron(t, eye) + (hx / hy) * sp.kron(eye, t)
    matrix = sp.csr_matrix(matrix)
    return LinearOperator(kind=OperatorKind.stiffness, mesh=mesh, matrix=matrix)


@lru_cache(maxsize=32)
def mass(mesh: Mesh) -> LinearOperator:
    """Lumped mass: every interior node carries a full cell volume."""
    diagonal = np.full(mesh.interior_count, mesh.cell_volume)
    diagonal.setflags(write=False)
    return LinearOperator(kind=OperatorKind.mass, mesh=mesh, diagonal=diagonal)


def l2_norm(v: np.ndarray, m: np.ndarray) -> float:
    """‖v‖_Y with lumped quadrature."""
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(np.sum(m * v * v)))


def dual_norm(r: np.ndarray, m: np.ndarray) -> float:
    """L² norm of the Riesz representer M⁻¹r of a residual vector r."""
    r = np.asarray(r, dtype=float)
    return float(np.sqrt(np.sum(r * r / m)))
