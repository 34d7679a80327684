"""Estimators for θ* and θ̃, the infimum and far-field behaviour of I/ψ.

I(u) = ½‖u‖²_X and ψ(u) = Σ mᵢG(uᵢ). On a sphere ‖u‖_X = R the ratio is
½R²/ψ, so each probe maximizes ψ on its sphere by projected H¹₀-gradient
ascent with radial retraction. Steps that do not increase ψ are rejected,
which keeps every iterate inside {ψ > 0}.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import splu

from trisolve.discretization import first_eigenpair
from trisolve.energy import ProblemConfig
from trisolve.exceptions import SearchFailure

logger = logging.getLogger(__name__)

THETA_STAR_SCALES = tuple(np.logspace(-4, 0, 9))
CHECKERBOARD_HEIGHT = 0.5


@dataclass(frozen=True)
class ThetaStarEstimate:
    value: float
    best_scale: float
    probes: list[tuple[float, float | None]] = field(default_factory=list)
    upper_bound: bool = True


@dataclass(frozen=True)
class ThetaTildeTrend:
    radii: tuple[float, ...]
    values: tuple[float, ...]
    heuristic: bool = True

    @property
    def trend(self) -> str:
        v = np.asarray(self.values, dtype=float)
        if v.size < 2:
            return "flat"
        if np.all(v == v[0]):
            return "flat"
        if np.isfinite(v).all() and np.ptp(v) <= 1e-6 * np.max(np.abs(v)):
            return "flat"
        with np.errstate(invalid="ignore"):
            d = np.diff(v)
        if np.all((d > 0) | (np.isinf(v[1:]) & np.isfinite(v[:-1]))):
            return "increasing"
        if np.all(d < 0):
            return "decreasing"
        return "mixed"


@dataclass(frozen=True)
class RatioBounds:
    """ψ/‖u‖²_X near 0 and on large spheres, next to σ/λ₁ and max{ρ,0}/λ₁."""

    near_zero_ratio: float
    near_zero_bound: float
    near_zero_consistent: bool
    far_ratios: tuple[float, ...]
    far_bound: float
    far_consistent: bool


class _SphereAscent:
    def __init__(self, cfg: ProblemConfig, max_iter: int = 200, tol: float = 1e-10):
        self.cfg = cfg
        self.A = cfg.A
        self.m = cfg.m
        self.lu = splu(self.A.tocsc())
        self.max_iter = max_iter
        self.tol = tol

    def psi(self, u: np.ndarray) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            value = float(np.sum(self.m * self.cfg.g.F(u)))
        return value if np.isfinite(value) else -math.inf

    def norm_sq(self, u: np.ndarray) -> float:
        return float(u @ (self.A @ u))

    def maximize(self, u0: np.ndarray) -> tuple[np.ndarray, float]:
        u = np.array(u0, dtype=float)
        r2 = self.norm_sq(u)
        psi = self.psi(u)
        tau = 1.0
        for _ in range(self.max_iter):
            grad = self.lu.solve(self.m * self.cfg.g(u))
            tangent = grad - (grad @ (self.A @ u)) / r2 * u
            if math.sqrt(max(self.norm_sq(tangent), 0.0)) <= self.tol * math.sqrt(r2):
                break
            previous = psi
            while tau > 1e-14:
                trial = u + tau * tangent
                trial *= math.sqrt(r2 / self.norm_sq(trial))
                value = self.psi(trial)
                if value > psi:
                    u, psi = trial, value
                    tau = min(2.0 * tau, 1e6)
                    break
                tau *= 0.5
            if psi - previous <= self.tol * abs(previous):
                break
        return u, psi


def estimate_theta_star(cfg: ProblemConfig, scales: Sequence[float] = THETA_STAR_SCALES) -> ThetaStarEstimate:
    """Smallest I/ψ reached from the probes t·v₁; an upper bound on θ*."""
    ascent = _SphereAscent(cfg)
    v1 = first_eigenpair(cfg.mesh).vector.values
    probes: list[tuple[float, float | None]] = []
    best, best_scale = math.inf, math.nan
    for t in scales:
        u0 = float(t) * v1
        if ascent.psi(u0) <= 0:
            probes.append((float(t), None))
            continue
        u, psi = ascent.maximize(u0)
        ratio = 0.5 * ascent.norm_sq(u) / psi
        probes.append((float(t), ratio))
        if ratio < best:
            best, best_scale = ratio, float(t)
    if not math.isfinite(best):
        raise SearchFailure(
            "psi is not positive at any probe t*v1; the feasible set looks empty",
            diagnostics={"scales": [float(t) for t in scales]},
        )
    logger.info("estimate_theta_star: %.10g (t=%.1e)", best, best_scale)
    return ThetaStarEstimate(value=best, best_scale=best_scale, probes=probes)


def _checkerboard(cfg: ProblemConfig, radius: float) -> np.ndarray:
    """Small positive bumps on even-parity nodes, −β on odd ones, ‖u‖_X = R."""
    index = np.indices(cfg.mesh.shape).reshape(cfg.mesh.dim, -1).sum(axis=0)
    even = (index % 2 == 0).astype(float)
    odd = 1.0 - even
    A = cfg.A
    eae, eao, oao = even @ (A @ even), even @ (A @ odd), odd @ (A @ odd)
    eps = min(CHECKERBOARD_HEIGHT, 0.5 * radius / math.sqrt(eae))
    if oao == 0:
        return even * radius / math.sqrt(eae)
    # oao·β² − 2ε·eao·β + ε²·eae − R² = 0, positive root
    b = -2.0 * eps * eao
    c = eps * eps * eae - radius * radius
    beta = (-b + math.sqrt(b * b - 4.0 * oao * c)) / (2.0 * oao)
    return eps * even - beta * odd


def estimate_theta_tilde(cfg: ProblemConfig, radii: Sequence[float] = (1.0, 10.0, 100.0)) -> ThetaTildeTrend:
    """min I/ψ on spheres of growing radius; +∞ when ψ ≤ 0 on every probe."""
    radii = tuple(float(r) for r in radii)
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and increasing")
    ascent = _SphereAscent(cfg)
    v1 = first_eigenpair(cfg.mesh).vector.values
    v1 = v1 / math.sqrt(ascent.norm_sq(v1))
    values = []
    for radius in radii:
        best = math.inf
        for u0 in (radius * v1, -radius * v1, _checkerboard(cfg, radius)):
            if ascent.psi(u0) <= 0:
                continue
            u, psi = ascent.maximize(u0)
            best = min(best, 0.5 * radius * radius / psi)
        values.append(best)
        logger.info("estimate_theta_tilde: R=%g -> %.6g", radius, best)
    return ThetaTildeTrend(radii=radii, values=tuple(values))


def estimate_ratio_bounds(
    theta_star: ThetaStarEstimate,
    theta_tilde: ThetaTildeTrend,
    rho: float,
    sigma: float,
    lambda1: float,
) -> RatioBounds:
    """Compare the probed ψ/‖u‖²_X = 1/(2·I/ψ) with the growth-rate bounds.

    Near 0 the best ratio should reach σ/λ₁; on large spheres it should fall
    towards max{ρ,0}/λ₁.
    """
    near = 1.0 / (2.0 * theta_star.value)
    near_bound = sigma / lambda1
    far = tuple(0.0 if math.isinf(v) else 1.0 / (2.0 * v) for v in theta_tilde.values)
    far_bound = max(rho, 0.0) / lambda1
    return RatioBounds(
        near_zero_ratio=near,
        near_zero_bound=near_bound,
        near_zero_consistent=math.isinf(near_bound) or near >= near_bound * (1.0 - 1e-3),
        far_ratios=far,
        far_bound=far_bound,
        far_consistent=all(b <= a * (1.0 + 1e-9) for a, b in zip(far, far[1:])),
    )
