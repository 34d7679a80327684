"""Discrete energies, residuals, Hessians and the saddle functional.

Nonlinear terms use the lumped quadrature of the mass matrix, so each
residual is the exact gradient of its energy with respect to nodal values.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from trisolve.discretization import Field, Mesh, as_values, constant_field, mass, stiffness
from trisolve.models import ProblemKind
from trisolve.nonlinearity import Nonlinearity

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProblemConfig:
    mesh: Mesh
    f: Nonlinearity
    g: Nonlinearity
    lam: float
    alpha: Field

    def __post_init__(self):
        if self.alpha.mesh != self.mesh:
            raise ValueError("alpha lives on a different mesh")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")

    @property
    def A(self) -> sp.csr_matrix:
        return stiffness(self.mesh).matrix

    @property
    def m(self) -> np.ndarray:
        return mass(self.mesh).diagonal

    def with_alpha(self, alpha: Field | np.ndarray) -> "ProblemConfig":
        if not isinstance(alpha, Field):
            alpha = Field(alpha, self.mesh)
        return replace(self, alpha=alpha)


def make_problem(mesh: Mesh, f: Nonlinearity, g: Nonlinearity, lam: float,
                 alpha: Field | np.ndarray | float = 0.0) -> ProblemConfig:
    if isinstance(alpha, (int, float)):
        alpha = constant_field(mesh, alpha)
    elif not isinstance(alpha, Field):
        alpha = Field(alpha, mesh)
    return ProblemConfig(mesh=mesh, f=f, g=g, lam=float(lam), alpha=alpha)


# --- Main problem: -Δu = α f(u) + λ g(u) ---

def energy(u, cfg: ProblemConfig) -> float:
    """J(u) = ½uᵀAu − Σ mᵢαᵢF(uᵢ) − λΣ mᵢG(uᵢ)."""
    u = as_values(u)
    m, a = cfg.m, cfg.alpha.values
    return float(0.5 * u @ (cfg.A @ u) - np.sum(m * a * cfg.f.F(u)) - cfg.lam * np.sum(m * cfg.g.F(u)))


def residual(u, cfg: ProblemConfig) -> np.ndarray:
    """r(u) = Au − M(α⊙f(u)) − λM g(u)."""
    u = as_values(u)
    m, a = cfg.m, cfg.alpha.values
    return cfg.A @ u - m * (a * cfg.f(u)) - cfg.lam * m * cfg.g(u)


def jacobian(u, cfg: ProblemConfig) -> sp.csr_matrix:
    """Energy Hessian A − M·diag(α⊙f′(u) + λg′(u))."""
    u = as_values(u)
    c = cfg.alpha.values * cfg.f.prime(u) + cfg.lam * cfg.g.prime(u)
    return sp.csr_matrix(cfg.A - sp.diags(cfg.m * c))


# --- Auxiliary problem: -Δu = -F(u) f(u) + λ g(u) ---

def energy_aux8(u, cfg: ProblemConfig) -> float:
    """½uᵀAu + ½Σ mᵢF(uᵢ)² − λΣ mᵢG(uᵢ)."""
    u = as_values(u)
    F = cfg.f.F(u)
    return float(0.5 * u @ (cfg.A @ u) + 0.5 * np.sum(cfg.m * F * F) - cfg.lam * np.sum(cfg.m * cfg.g.F(u)))


def residual_aux8(u, cfg: ProblemConfig) -> np.ndarray:
    """r₈(u) = Au + M(F(u)⊙f(u)) − λM g(u)."""
    u = as_values(u)
    return cfg.A @ u + cfg.m * (cfg.f.F(u) * cfg.f(u)) - cfg.lam * cfg.m * cfg.g(u)


def jacobian_aux8(u, cfg: ProblemConfig) -> sp.csr_matrix:
    u = as_values(u)
    fu = cfg.f(u)
    c = fu * fu + cfg.f.F(u) * cfg.f.prime(u) - cfg.lam * cfg.g.prime(u)
    return sp.csr_matrix(cfg.A + sp.diags(cfg.m * c))


ENERGIES = {ProblemKind.main: energy, ProblemKind.aux8: energy_aux8}
RESIDUALS = {ProblemKind.main: residual, ProblemKind.aux8: residual_aux8}
JACOBIANS = {ProblemKind.main: jacobian, ProblemKind.aux8: jacobian_aux8}


# --- Saddle functional ---

def saddle_phi(u, y, cfg: ProblemConfig) -> float:
    """Φ(u, y) = ½uᵀAu − ½yᵀMy − Σ mᵢyᵢF(uᵢ) − λΣ mᵢG(uᵢ)."""
    u, y = as_values(u), as_values(y)
    m = cfg.m
    return float(
        0.5 * u @ (cfg.A @ u)
        - 0.5 * np.sum(m * y * y)
        - np.sum(m * y * cfg.f.F(u))
        - cfg.lam * np.sum(m * cfg.g.F(u))
    )


def saddle_gradients(u, y, cfg: ProblemConfig) -> tuple[np.ndarray, np.ndarray]:
    """(∂Φ/∂u, ∂Φ/∂y) = (Au − M(y⊙f(u)) − λM g(u), −M(y + F(u)))."""
    u, y = as_values(u), as_values(y)
    m = cfg.m
    phi_u = cfg.A @ u - m * (y * cfg.f(u)) - cfg.lam * m * cfg.g(u)
    phi_y = -m * (y + cfg.f.F(u))
    return phi_u, phi_y


# --- Consistency ---

def gradient_check(u, v, cfg: ProblemConfig, eps: float = 1e-5,
                   which: ProblemKind = ProblemKind.main) -> float:
    """|(J(u+εv) − J(u−εv))/(2ε) − vᵀr(u)|."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    u, v = as_values(u), as_values(v)
    J, r = ENERGIES[which], RESIDUALS[which]
    central = (J(u + eps * v, cfg) - J(u - eps * v, cfg)) / (2.0 * eps)
    return float(abs(central - v @ r(u, cfg)))
