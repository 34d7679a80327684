"""Shifted deflation: η(u)·r(u) with η singular at known roots."""

import logging
from collections.abc import Sequence

import numpy as np

from trisolve.discretization import as_values
from trisolve.exceptions import DeflationError
from trisolve.solvers.newton import NonlinearSystem
from trisolve.solvers.options import SolverOptions

logger = logging.getLogger(__name__)


class DeflatedSystem:
    """Wraps a NonlinearSystem; r̃(u) = ∏ⱼ(1/‖u − uⱼ‖_M^p + shift)·r(u).

    Newton directions come from the undeflated Jacobian plus a
    Sherman–Morrison rescaling, so no dense rank-one update is formed.
    """

    def __init__(self, base: NonlinearSystem, roots: Sequence, power: float = 2.0, shift: float = 1.0):
        self.base = base
        self.roots = [as_values(r).copy() for r in roots]
        self.power = power
        self.shift = shift
        self.m = base.m
        self.A = base.A
        self.energy_fn = base.energy_fn

    def _terms(self, u: np.ndarray):
        for root in self.roots:
            diff = u - root
            dist = float(np.sqrt(np.sum(self.m * diff * diff)))
            if dist == 0.0:
                raise DeflationError("deflated residual evaluated at a deflated root")
            yield diff, dist

    def factor(self, u) -> float:
        u = as_values(u)
        eta = 1.0
        for _, dist in self._terms(u):
            eta *= dist ** (-self.power) + self.shift
        return eta

    def factor_gradient(self, u) -> tuple[float, np.ndarray]:
        """(η, ∇η)."""
        u = as_values(u)
        eta = 1.0
        log_grad = np.zeros_like(u)
        for diff, dist in self._terms(u):
            term = dist ** (-self.power) + self.shift
            eta *= term
            log_grad += -self.power * dist ** (-self.power - 2.0) * (self.m * diff) / term
        return eta, eta * log_grad

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.factor(u) * self.base.residual(u)

    __call__ = residual

    def base_residual(self, u: np.ndarray) -> np.ndarray:
        return self.base.residual(u)

    def jvp(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        eta, grad = self.factor_gradient(u)
        return eta * self.base.jvp(u, x) + self.base.residual(u) * float(grad @ x)

    def newton_direction(self, u: np.ndarray) -> np.ndarray:
        delta = self.base.newton_direction(u)
        if not self.roots:
            return delta
        eta, grad = self.factor_gradient(u)
        denom = 1.0 - float(grad @ delta) / eta
        if abs(denom) < 1e-14:
            return np.full_like(delta, np.nan)
        return delta / denom

    def merit(self, u: np.ndarray) -> float:
        r = self.residual(u)
        return 0.5 * float(np.sum(r * r / self.m))

    def true_residual(self, u: np.ndarray) -> float:
        r = self.base.residual(u)
        return float(np.sqrt(np.sum(r * r / self.m)))


def deflated_residual(system: NonlinearSystem, roots: Sequence, opts: SolverOptions | None = None) -> DeflatedSystem:
    """Deflate system at roots using opts.deflation_power and opts.deflation_shift."""
    opts = opts or SolverOptions()
    return DeflatedSystem(system, roots, power=opts.deflation_power, shift=opts.deflation_shift)
