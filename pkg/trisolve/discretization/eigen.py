"""Smallest generalized eigenpairs by inverse power iteration."""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from trisolve.discretization.fields import Field
from trisolve.discretization.linalg import conjugate_gradient
from trisolve.discretization.mesh import Mesh
from trisolve.discretization.operators import LinearOperator, mass, stiffness
from trisolve.exceptions import ConvergenceError, EigenSolveError

logger = logging.getLogger(__name__)

# relative; tighter targets sit below the round-off floor of fine 1D meshes
INNER_CG_TOL = 1e-10


@dataclass(frozen=True)
class Eigenpair:
    value: float
    vector: Field
    iterations: int
    residual_norm: float


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Largest-magnitude entry positive."""
    k = int(np.argmax(np.abs(v)))
    return v if v[k] >= 0 else -v


def smallest_eigenpair(
    A: LinearOperator,
    M: LinearOperator,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> Eigenpair:
    """Av = λMv with λ minimal, ‖v‖_Y = 1, residual ‖Av − λMv‖₂ ≤ tol.

    Inverse iteration; each step is a CG solve warm-started from the previous
    iterate scaled by the current Rayleigh quotient.
    """
    m = M.diagonal
    x = np.ones(A.dimension)
    x /= np.sqrt(np.sum(m * x * x))
    rayleigh = A.quadratic(x)
    residual = np.inf

    for k in range(1, max_iter + 1):
        try:
            y, _, _ = conjugate_gradient(A.apply, m * x, tol=INNER_CG_TOL, x0=x / rayleigh)
        except ConvergenceError as exc:
            raise EigenSolveError(
                f"inner CG failed at inverse iteration {k}: {exc}",
                iterate=x,
                residual_norm=residual,
                iterations=k,
            ) from exc
        x = y / np.sqrt(np.sum(m * y * y))
        previous, rayleigh = rayleigh, A.quadratic(x)
        residual = float(np.linalg.norm(A.apply(x) - rayleigh * m * x))
        if abs(rayleigh - previous) < tol * abs(rayleigh) and residual <= tol:
            x = _fix_sign(x)
            logger.info("smallest_eigenpair: λ₁=%.12g after %d iterations (residual %.2e)",
                        rayleigh, k, residual)
            return Eigenpair(value=float(rayleigh), vector=Field(x, A.mesh),
                             iterations=k, residual_norm=residual)

    raise EigenSolveError(
        f"inverse iteration did not converge in {max_iter} steps (residual {residual:.3e})",
        iterate=_fix_sign(x),
        residual_norm=residual,
        iterations=max_iter,
    )


@lru_cache(maxsize=16)
def first_eigenpair(mesh: Mesh) -> Eigenpair:
    """Cached λ₁, v₁ of the mesh's Dirichlet Laplacian."""
    return smallest_eigenpair(stiffness(mesh), mass(mesh))


def gershgorin_lower_bound(H: sp.spmatrix, m: np.ndarray) -> float:
    """Lower bound on the spectrum of M⁻¹H for diagonal positive M."""
    H = sp.csr_matrix(H)
    diag = H.diagonal()
    off = np.asarray(abs(H).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.min((diag - off) / m))


def lowest_eigenvalue(
    H: sp.spmatrix,
    m: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> tuple[float, np.ndarray, int]:
    """Smallest μ with Hv = μMv for symmetric, possibly indefinite H.

    Shifted inverse iteration below the Gershgorin bound, so H − σM is SPD and
    the dominant mode of its inverse is the lowest one.
    """
    lower = gershgorin_lower_bound(H, m)
    shift = lower - max(1.0, 1e-3 * abs(lower))
    lu = splu(sp.csc_matrix(H - shift * sp.diags(m)))

    x = np.ones(H.shape[0])
    x /= np.sqrt(np.sum(m * x * x))
    mu = float(x @ (H @ x))
    for k in range(1, max_iter + 1):
        y = lu.solve(m * x)
        x = y / np.sqrt(np.sum(m * y * y))
        previous, mu = mu, float(x @ (H @ x))
        if abs(mu - previous) <= tol * max(1.0, abs(mu)):
            return mu, _fix_sign(x), k
    logger.warning("lowest_eigenvalue: no convergence in %d steps (last change %.2e)",
                   max_iter, abs(mu - previous))
    return mu, _fix_sign(x), max_iter
