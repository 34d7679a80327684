"""Conjugate gradients for the SPD systems of the discretization."""

import logging
from dataclasses import dataclass

import numpy as np

from trisolve.discretization.fields import Field, as_values
from trisolve.discretization.operators import LinearOperator
from trisolve.exceptions import ConvergenceError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CGSolution:
    field: Field
    iterations: int
    residual_norm: float


def conjugate_gradient(
    matvec,
    b: np.ndarray,
    tol: float = 1e-12,
    max_iter: int | None = None,
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, int, float]:
    """Plain CG on raw arrays. Stops once ‖Ax − b‖₂ ≤ tol·‖b‖₂.

    When the recursive residual is below target but the true one is not, CG
    restarts from the current iterate. A true residual that fails to halve
    between two such checks has hit round-off and is accepted.

    Returns (x, iterations, residual_norm); raises ConvergenceError with the
    best iterate when max_iter is exhausted.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    max_iter = max_iter if max_iter is not None else 10 * n
    b_norm = float(np.linalg.norm(b))

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    if b_norm == 0.0:
        return np.zeros(n), 0, 0.0

    r = b - matvec(x)
    d = r.copy()
    rr = float(r @ r)
    target = tol * b_norm
    best_x, best_res = x.copy(), np.sqrt(rr)
    last_true = np.inf

    for k in range(max_iter + 1):
        res = np.sqrt(rr)
        if res < best_res:
            best_x, best_res = x.copy(), res
        if res <= target:
            # recursive residual can drift; confirm with the true one
            r = b - matvec(x)
            true_res = float(np.linalg.norm(r))
            if true_res <= target:
                return x, k, true_res
            if true_res > 0.5 * last_true:
                logger.debug("CG stalled at true residual %.3e (target %.3e)", true_res, target)
                return x, k, true_res
            last_true = true_res
            d = r.copy()
            rr = float(r @ r)
            continue
        if k == max_iter:
            break
        ad = matvec(d)
        alpha = rr / float(d @ ad)
        x = x + alpha * d
        r = r - alpha * ad
        rr_next = float(r @ r)
        d = r + (rr_next / rr) * d
        rr = rr_next

    true_best = float(np.linalg.norm(b - matvec(best_x)))
    raise ConvergenceError(
        f"CG did not reach tol={tol:g} in {max_iter} iterations (true residual {true_best:.3e})",
        iterate=best_x,
        residual_norm=true_best,
        iterations=max_iter,
    )


def cg_solve(A: LinearOperator, b, tol: float = 1e-12, max_iter: int | None = None) -> CGSolution:
    """Solve A u = b for SPD A; ‖Au − b‖₂ ≤ tol·‖b‖₂ on return."""
    x, iterations, residual_norm = conjugate_gradient(A.apply, as_values(b), tol=tol, max_iter=max_iter)
    logger.debug("cg_solve: %d iterations, residual %.3e", iterations, residual_norm)
    return CGSolution(field=Field(x, A.mesh), iterations=iterations, residual_norm=residual_norm)
