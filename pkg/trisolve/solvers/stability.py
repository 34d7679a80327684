"""Local minimality through the lowest Hessian eigenvalue."""

import numpy as np
import scipy.sparse as sp

from trisolve.discretization import lowest_eigenvalue
from trisolve.energy import JACOBIANS, ProblemConfig
from trisolve.models import ProblemKind


def stiffness_norm_estimate(cfg: ProblemConfig) -> float:
    """Gershgorin bound on ‖M⁻¹A‖."""
    row_sums = np.asarray(abs(sp.csr_matrix(cfg.A)).sum(axis=1)).ravel()
    return float(np.max(row_sums / cfg.m))


def hessian_min_eigenvalue(u, cfg: ProblemConfig, which: ProblemKind = ProblemKind.main) -> float:
    """Smallest μ with H(u)v = μMv, H the energy Hessian."""
    mu, _, _ = lowest_eigenvalue(JACOBIANS[which](u, cfg), cfg.m)
    return mu


def is_local_min(mu: float, cfg: ProblemConfig) -> bool:
    return mu >= -1e-8 * stiffness_norm_estimate(cfg)
