"""Growth thresholds ρ, σ, γ, the admissible λ-interval and sign checks."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from trisolve.exceptions import HypothesisViolation
from trisolve.models import Exactness
from trisolve.nonlinearity.catalog import Nonlinearity, NonlinearityKind

logger = logging.getLogger(__name__)

# Windows for numeric limit estimates
RHO_WINDOW = np.logspace(2, 6, 200)
SIGMA_WINDOW = np.logspace(-8, -2, 200)
GAMMA_GRID_POINTS = 10_000
CONDITION16_TOL = 1e-12


@dataclass(frozen=True)
class ThresholdReport:
    rho: float
    sigma: float
    lambda1: float
    lambda_lo: float
    lambda_hi: float
    gamma: float | None = None
    exactness: dict = field(default_factory=dict)

    def contains(self, lam: float) -> bool:
        return self.lambda_lo < lam < self.lambda_hi

    @property
    def estimated(self) -> bool:
        return any(v == Exactness.estimated for v in self.exactness.values())


@dataclass(frozen=True)
class Condition16Report:
    sup_value: float
    argmax: float
    passed: bool
    analytic_pass: bool | None
    radius: float
    n_samples: int
    tolerance: float = CONDITION16_TOL
    grid_based: bool = True
    note: str = "grid check of sup (lambda*g - F*f)*xi <= 0, not a proof"


@dataclass(frozen=True)
class GrowthReport:
    p: float | None
    q: float | None
    dim: int
    sobolev_ok: bool
    sobolev_note: str
    condition_a_max: float
    condition_a_nonincreasing: bool
    condition_b_f_sup: float
    condition_b_g_sup: float


def _ratio(g: Nonlinearity, xi: np.ndarray) -> np.ndarray:
    return g.F(xi) / (xi * xi)


def rho_sigma(g: Nonlinearity) -> tuple[float, float, Exactness]:
    """ρ = limsup_{|ξ|→∞} G/ξ², σ = max of the one-sided liminfs of G/ξ² at 0.

    Exact for plus_power and constants, windowed estimates otherwise.
    """
    if g.kind is NonlinearityKind.plus_power:
        return 0.0, 0.5 * g.scale_factor, Exactness.exact
    if g.kind is NonlinearityKind.constant:
        c = g.params["value"]
        # G/ξ² = c/ξ: limit 0 at infinity, ±∞ on the two sides of 0
        return 0.0, (math.inf if c != 0 else 0.0), Exactness.exact

    rho = float(np.max(np.concatenate([_ratio(g, RHO_WINDOW), _ratio(g, -RHO_WINDOW)])))
    sigma = float(max(np.min(_ratio(g, SIGMA_WINDOW)), np.min(_ratio(g, -SIGMA_WINDOW))))
    logger.warning("rho_sigma: %s has no closed form; estimated rho=%.6g sigma=%.6g",
                   g.name, rho, sigma)
    return rho, sigma, Exactness.estimated


def gamma_corollary2(h: Nonlinearity) -> float:
    """γ = inf over (0,1] of H(ξ)h(ξ)/ξ on a uniform grid."""
    grid = np.linspace(0.0, 1.0, GAMMA_GRID_POINTS + 1)
    hv = h(grid)
    if np.any(hv < 0) or np.min(hv) <= 0:
        raise HypothesisViolation(
            f"h={h.name} has grid inf {np.min(hv):.6g} on [0,1]; inf_{{[0,1]}} h > 0 is violated",
            hypothesis="inf_{[0,1]} h > 0",
        )
    xi = grid[1:]
    gamma = float(np.min(h.F(xi) * hv[1:] / xi))
    if gamma <= 0:
        raise HypothesisViolation(f"gamma={gamma:.6g} is not positive",
                                  hypothesis="inf_{[0,1]} h > 0")
    return gamma


def lambda_interval(rho: float, sigma: float, lambda1: float) -> tuple[float, float]:
    """(λ₁/(2σ), λ₁/(2·max{ρ,0})) with λ₁/0 = +∞ and λ₁/∞ = 0."""
    r = max(rho, 0.0)
    if not r < sigma:
        raise HypothesisViolation(
            f"max{{rho,0}}={r:g} is not below sigma={sigma:g}",
            hypothesis="max{rho,0} < sigma",
        )
    lo = 0.0 if math.isinf(sigma) else lambda1 / (2.0 * sigma)
    hi = math.inf if r == 0 else lambda1 / (2.0 * r)
    return lo, hi


def threshold_report(g: Nonlinearity, lambda1: float, h: Nonlinearity | None = None) -> ThresholdReport:
    rho, sigma, exactness = rho_sigma(g)
    flags = {"rho": exactness, "sigma": exactness}
    gamma = None
    if h is not None:
        gamma = gamma_corollary2(h)
        flags["gamma"] = Exactness.exact if h.kind is NonlinearityKind.constant else Exactness.estimated
    lo, hi = lambda_interval(rho, sigma, lambda1)
    return ThresholdReport(rho=rho, sigma=sigma, lambda1=lambda1, lambda_lo=lo,
                           lambda_hi=hi, gamma=gamma, exactness=flags)


def _symmetric_grid(radius: float, n_samples: int) -> np.ndarray:
    """Linear on [0, min(1,R)], log-spaced beyond, mirrored through 0."""
    half = n_samples // 2
    linear_end = min(1.0, radius)
    n_linear = half // 2 + 1 if radius > 1 else half + 1
    positive = np.linspace(0.0, linear_end, n_linear)
    if radius > 1:
        tail = np.logspace(0.0, math.log10(radius), half - n_linear + 2)
        positive = np.union1d(positive, tail)
    return np.union1d(-positive, positive)


def _analytic_condition16(f: Nonlinearity, g: Nonlinearity, lam: float) -> bool | None:
    """Closed-form answer for constant f and unscaled plus_power g.

    s(ξ) = ξ²(λ − c²) − λξ^{q+1} for ξ > 0 and −c²ξ² for ξ ≤ 0.
    """
    if f.kind is not NonlinearityKind.constant or g.kind is not NonlinearityKind.plus_power:
        return None
    if g.scale_factor != 1.0 or lam < 0:
        return None
    c = f.params["value"]
    return bool(c * c >= lam * (1.0 - 1e-12))


def check_condition16(
    f: Nonlinearity,
    g: Nonlinearity,
    lam: float,
    radius: float = 1e3,
    n_samples: int = 4001,
) -> Condition16Report:
    if radius <= 0:
        raise ValueError("radius must be positive")
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    xi = _symmetric_grid(radius, n_samples)
    with np.errstate(over="ignore", invalid="ignore"):
        s = (lam * g(xi) - f.F(xi) * f(xi)) * xi
    s = np.where(np.isnan(s), np.inf, s)
    k = int(np.argmax(s))
    sup = float(s[k])
    report = Condition16Report(
        sup_value=sup,
        argmax=float(xi[k]),
        passed=sup <= CONDITION16_TOL,
        analytic_pass=_analytic_condition16(f, g, lam),
        radius=radius,
        n_samples=int(xi.size),
    )
    logger.info("condition16: sup=%.3e at xi=%.4g (grid pass=%s, analytic=%s)",
                sup, report.argmax, report.passed, report.analytic_pass)
    return report


def growth_report(f: Nonlinearity, g: Nonlinearity, dim: int) -> GrowthReport:
    p, q = f.growth_exponent, g.growth_exponent
    if dim <= 2:
        sobolev_ok, note = True, f"vacuous for dimension {dim}"
    else:
        p_max, q_max = 2.0 / (dim - 2), (dim + 2.0) / (dim - 2)
        sobolev_ok = (p is not None and p < p_max) and (q is not None and q < q_max)
        note = f"requires p < {p_max:g} and q < {q_max:g}"

    ratio = np.maximum(np.abs(f.F(RHO_WINDOW)), np.abs(f.F(-RHO_WINDOW))) / RHO_WINDOW**2
    xi = np.linspace(-1e3, 1e3, 4001)
    f_sup = float(np.max(np.abs(f(xi)) / (1.0 + np.abs(xi) ** (p or 0.0))))
    g_sup = float(np.max(np.abs(g(xi)) / (1.0 + np.abs(xi) ** (q or 0.0))))
    return GrowthReport(
        p=p,
        q=q,
        dim=dim,
        sobolev_ok=sobolev_ok,
        sobolev_note=note,
        condition_a_max=float(ratio.max()),
        condition_a_nonincreasing=bool(np.all(np.diff(ratio) <= 1e-12 * ratio[:-1] + 1e-300)),
        condition_b_f_sup=f_sup,
        condition_b_g_sup=g_sup,
    )
