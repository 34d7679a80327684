"""Damped Newton with Armijo backtracking and a Sobolev-gradient fallback."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from trisolve.energy import ENERGIES, JACOBIANS, RESIDUALS, ProblemConfig
from trisolve.exceptions import DeflationError, NewtonFailure
from trisolve.models import ProblemKind
from trisolve.solvers.options import SolverOptions

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NonlinearSystem:
    residual_fn: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Callable[[np.ndarray], sp.spmatrix]
    m: np.ndarray
    A: sp.csr_matrix
    energy_fn: Callable[[np.ndarray], float] | None = None

    @classmethod
    def for_problem(cls, cfg: ProblemConfig, which: ProblemKind = ProblemKind.main) -> "NonlinearSystem":
        residual_fn, jacobian_fn, energy_fn = RESIDUALS[which], JACOBIANS[which], ENERGIES[which]
        return cls(
            residual_fn=lambda u: residual_fn(u, cfg),
            jacobian_fn=lambda u: jacobian_fn(u, cfg),
            m=cfg.m,
            A=cfg.A,
            energy_fn=lambda u: energy_fn(u, cfg),
        )

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.residual_fn(u)

    def base_residual(self, u: np.ndarray) -> np.ndarray:
        return self.residual_fn(u)

    def jvp(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.jacobian_fn(u) @ x

    def newton_direction(self, u: np.ndarray) -> np.ndarray:
        """δ with J(u)δ = −r(u)."""
        return np.atleast_1d(spsolve(sp.csc_matrix(self.jacobian_fn(u)), -self.residual_fn(u)))

    def merit(self, u: np.ndarray) -> float:
        r = self.residual(u)
        return 0.5 * float(np.sum(r * r / self.m))

    def true_residual(self, u: np.ndarray) -> float:
        """L² norm of the Riesz representer of the undeflated residual."""
        r = self.base_residual(u)
        return float(np.sqrt(np.sum(r * r / self.m)))


@dataclass(frozen=True)
class NewtonResult:
    values: np.ndarray = field(repr=False)
    iterations: int
    residual_norm: float
    history: tuple[float, ...] = field(default=(), repr=False)
    gradient_steps: int = 0


def _armijo(phi: Callable[[np.ndarray], float], u: np.ndarray, direction: np.ndarray,
            phi0: float, slope: float, opts: SolverOptions) -> tuple[np.ndarray, float] | None:
    """First step length t = backtrack^k with φ(u + tδ) ≤ φ(u) + c·t·slope."""
    t = 1.0
    for _ in range(opts.max_halvings):
        trial = u + t * direction
        try:
            value = phi(trial)
        except DeflationError:
            value = np.inf
        if np.isfinite(value) and value <= phi0 + opts.armijo_c * t * slope:
            return trial, t
        t *= opts.backtrack
    return None


def _sobolev_gradient(system: NonlinearSystem, u: np.ndarray) -> np.ndarray:
    """−A⁻¹∇J: steepest descent of the energy in the H¹₀ inner product."""
    return -np.atleast_1d(spsolve(sp.csc_matrix(system.A), system.base_residual(u)))


def newton_solve(system: NonlinearSystem, u0: np.ndarray, opts: SolverOptions | None = None) -> NewtonResult:
    """Drive ‖r(u)‖ below opts.newton_tol.

    Newton steps are globalized by backtracking on the merit ½‖r‖²_{M⁻¹}.
    When the Newton direction is unusable (singular Jacobian, not a descent
    direction) a Sobolev-gradient step on the energy is taken instead.
    """
    opts = opts or SolverOptions()
    u = np.array(u0, dtype=float)
    history: list[float] = []
    gradient_steps = 0

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for k in range(opts.max_newton + 1):
            try:
                res = system.true_residual(u)
            except DeflationError as exc:
                raise NewtonFailure(str(exc), iterate=u, iterations=k) from exc
            history.append(res)
            if not np.isfinite(res):
                raise NewtonFailure("iterate diverged", iterate=u, residual_norm=res, iterations=k)
            if res <= opts.newton_tol:
                logger.debug("newton_solve: converged in %d iterations (residual %.2e)", k, res)
                return NewtonResult(values=u, iterations=k, residual_norm=res,
                                    history=tuple(history), gradient_steps=gradient_steps)
            if k == opts.max_newton:
                break

            phi0 = system.merit(u)
            direction = system.newton_direction(u)
            slope = np.nan
            if np.all(np.isfinite(direction)):
                slope = float(system.residual(u) @ (system.jvp(u, direction) / system.m))
            step = None
            if np.isfinite(slope) and slope < 0:
                step = _armijo(system.merit, u, direction, phi0, slope, opts)

            if step is None and system.energy_fn is not None:
                direction = _sobolev_gradient(system, u)
                slope = float(system.base_residual(u) @ direction)
                if np.all(np.isfinite(direction)) and slope < 0:
                    step = _armijo(system.energy_fn, u, direction, system.energy_fn(u), slope, opts)
                    gradient_steps += step is not None

            if step is None:
                raise NewtonFailure(
                    f"line search failed at iteration {k} (residual {res:.3e})",
                    iterate=u, residual_norm=res, iterations=k,
                )
            u = step[0]

    raise NewtonFailure(
        f"no convergence in {opts.max_newton} iterations (residual {history[-1]:.3e})",
        iterate=u, residual_norm=history[-1], iterations=opts.max_newton,
    )
