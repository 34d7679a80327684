"""End-to-end exploration of the alternative for one configuration."""

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from trisolve.discretization import dual_norm, first_eigenpair
from trisolve.energy import ProblemConfig, saddle_gradients
from trisolve.exceptions import HypothesisViolation, SearchFailure
from trisolve.explorer.alternative import AlternativeResult, check_alternative
from trisolve.explorer.branches import Bracket, Equalization, Segment, bracket_search, equalize_alpha
from trisolve.explorer.family import AlphaFamily
from trisolve.explorer.theta import (
    RatioBounds,
    ThetaStarEstimate,
    ThetaTildeTrend,
    estimate_ratio_bounds,
    estimate_theta_star,
    estimate_theta_tilde,
)
from trisolve.models import RunStatus, StageStatus
from trisolve.nonlinearity import (
    Condition16Report,
    GrowthReport,
    Nonlinearity,
    ThresholdReport,
    check_condition16,
    growth_report,
    threshold_report,
)
from trisolve.solvers import MinimaPair, SolutionSet, SolverOptions, minima_pair

logger = logging.getLogger(__name__)

SADDLE_TOL = 1e-8
STAGES = ("thresholds", "condition16", "alternative", "theta", "bracket", "equalize", "minima", "saddle")


class ExploreOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    tol_gap: float = Field(1e-8, gt=0)
    radii: tuple[float, ...] = (1.0, 10.0, 100.0)
    grid_points: int = Field(16, ge=2)
    max_bisection: int = Field(60, ge=1)
    bracket_refinements: int = Field(3, ge=0)
    trust_estimates: bool = False
    condition16_radius: float = Field(1e3, gt=0)
    condition16_samples: int = Field(4001, ge=1000)


@dataclass
class ExplorationReport:
    lambda1: float
    lam: float
    seed: int
    thresholds: ThresholdReport | None = None
    growth: GrowthReport | None = None
    condition16: Condition16Report | None = None
    alternative: AlternativeResult | None = None
    active_branch: str | None = None
    theta_star: ThetaStarEstimate | None = None
    theta_tilde: ThetaTildeTrend | None = None
    ratio_bounds: RatioBounds | None = None
    segment: tuple[float, float] | None = None
    bracket: Bracket | None = None
    branch_table: list[tuple[float, float, float]] = field(default_factory=list)
    equalization: Equalization | None = None
    minima: MinimaPair | None = None
    saddle: list[dict] = field(default_factory=list)
    soft_checks: dict = field(default_factory=dict)
    stages: dict[str, StageStatus] = field(default_factory=dict)
    messages: dict[str, str] = field(default_factory=dict)
    diagnostics: dict[str, dict] = field(default_factory=dict)
    timings_ms: dict[str, float] = field(default_factory=dict)
    status: RunStatus = RunStatus.ok

    @property
    def solutions(self) -> SolutionSet | None:
        return self.equalization.solutions if self.equalization else None

    @property
    def alpha_search_required(self) -> bool:
        return self.active_branch == "second"


def saddle_diagnostics(solutions: SolutionSet, cfg: ProblemConfig) -> list[dict]:
    """Stationarity of Φ at each solution.

    ∂Φ/∂u vanishes at (u, α) because u solves the problem with forcing α, and
    ∂Φ/∂y vanishes at (u, −F(u)). ∂Φ/∂u at (u, −F(u)) is the auxiliary
    residual and is reported, not tested.
    """
    rows = []
    for record in solutions:
        u = record.values
        minus_F = -cfg.f.F(u)
        phi_u, _ = saddle_gradients(u, cfg.alpha.values, cfg)
        aux_u, phi_y = saddle_gradients(u, minus_F, cfg)
        row = {
            "origin": record.origin,
            "phi_u_at_alpha": dual_norm(phi_u, cfg.m),
            "phi_y_at_minus_F": dual_norm(phi_y, cfg.m),
            "phi_u_at_minus_F": dual_norm(aux_u, cfg.m),
        }
        row["passed"] = row["phi_u_at_alpha"] <= SADDLE_TOL and row["phi_y_at_minus_F"] <= SADDLE_TOL
        rows.append(row)
    return rows


class _Stages:
    def __init__(self, report: ExplorationReport):
        self.report = report

    @contextmanager
    def run(self, name: str):
        start = time.perf_counter()
        try:
            yield
            self.report.stages.setdefault(name, StageStatus.ok)
        except HypothesisViolation as exc:
            logger.warning("explore: %s violated: %s", name, exc)
            self.report.stages[name] = StageStatus.violated
            self.report.messages[name] = str(exc)
            self.report.status = RunStatus.hypothesis_violation
        except SearchFailure as exc:
            logger.warning("explore: %s failed: %s", name, exc)
            self.report.stages[name] = StageStatus.failed
            self.report.messages[name] = str(exc)
            self.report.diagnostics[name] = exc.diagnostics
            self.report.status = RunStatus.search_failure
        except Exception as exc:
            logger.exception("explore: %s raised", name)
            self.report.stages[name] = StageStatus.failed
            self.report.messages[name] = f"{type(exc).__name__}: {exc}"
            self.report.status = RunStatus.internal_error
        finally:
            self.report.timings_ms[name] = 1e3 * (time.perf_counter() - start)

    @property
    def stopped(self) -> bool:
        return self.report.status is not RunStatus.ok

    def skip_rest(self, reason: str):
        for name in STAGES:
            if name not in self.report.stages:
                self.report.stages[name] = StageStatus.skipped
                self.report.messages.setdefault(name, reason)


def explore(
    cfg: ProblemConfig,
    family: AlphaFamily,
    opts: SolverOptions | None = None,
    explore_opts: ExploreOptions | None = None,
    h: Nonlinearity | None = None,
    scale: float = 1.0,
    segment: tuple[float, float] | None = None,
    seed: int = 0,
) -> ExplorationReport:
    """thresholds → sign condition → auxiliary problem → θ*, θ̃ → bracket →
    equalization → minima pair → saddle diagnostics.

    Stage failures become statuses; the report is always returned.
    """
    opts = opts or SolverOptions(rng_seed=seed)
    explore_opts = explore_opts or ExploreOptions()
    lambda1 = first_eigenpair(cfg.mesh).value
    report = ExplorationReport(lambda1=lambda1, lam=cfg.lam, seed=seed)
    stages = _Stages(report)

    with stages.run("thresholds"):
        report.growth = growth_report(cfg.f, cfg.g, cfg.mesh.dim)
        report.thresholds = threshold_report(cfg.g, lambda1, h)
        if report.thresholds.estimated and not explore_opts.trust_estimates:
            raise HypothesisViolation(
                "thresholds are numeric estimates; set explore.trust_estimates = true to use them",
                hypothesis="confirmed thresholds",
            )
        if not report.thresholds.contains(cfg.lam):
            raise HypothesisViolation(
                f"lambda={cfg.lam:.10g} is outside ({report.thresholds.lambda_lo:.10g}, "
                f"{report.thresholds.lambda_hi:.10g})",
                hypothesis="lambda in the admissible interval",
            )
    if stages.stopped:
        stages.skip_rest("hypothesis check failed")
        return report

    with stages.run("condition16"):
        report.condition16 = check_condition16(
            cfg.f, cfg.g, cfg.lam, explore_opts.condition16_radius, explore_opts.condition16_samples)
    if stages.stopped:
        stages.skip_rest("sign condition check failed")
        return report

    with stages.run("alternative"):
        report.alternative = check_alternative(cfg, opts)
        report.active_branch = "first" if report.alternative.nontrivial_found else "second"
    if stages.stopped:
        stages.skip_rest("auxiliary problem failed")
        return report
    if report.active_branch == "first":
        stages.skip_rest("not required: the auxiliary problem has a nonzero solution")
        return report

    with stages.run("theta"):
        report.theta_tilde = estimate_theta_tilde(cfg, explore_opts.radii)
        report.theta_star = estimate_theta_star(cfg)
        report.ratio_bounds = estimate_ratio_bounds(
            report.theta_star, report.theta_tilde,
            report.thresholds.rho, report.thresholds.sigma, lambda1)
        report.soft_checks["theta_star_below_lambda"] = report.theta_star.value < cfg.lam
    if report.stages.get("theta") is StageStatus.failed and report.status is RunStatus.search_failure:
        # diagnostics only
        report.status = RunStatus.ok
    if stages.stopped:
        stages.skip_rest("theta estimation failed")
        return report

    line = Segment(family, cfg.with_alpha(np.zeros(cfg.mesh.interior_count)), scale)
    t_lo, t_hi = segment if segment is not None else (-2.0 * cfg.lam, 0.0)
    limit = family.segment_limit(scale)
    if max(abs(t_lo), abs(t_hi)) > limit:
        logger.warning("explore: segment [%g, %g] clipped to the family box |t| <= %g", t_lo, t_hi, limit)
        t_lo, t_hi = max(t_lo, -limit), min(t_hi, limit)
    report.segment = (t_lo, t_hi)

    with stages.run("bracket"):
        report.bracket = bracket_search(line, (t_lo, t_hi), opts,
                                        explore_opts.grid_points, explore_opts.bracket_refinements)
    if report.bracket is not None:
        report.branch_table = report.bracket.table
    else:
        report.branch_table = report.diagnostics.get("bracket", {}).get("table", [])
    if stages.stopped:
        stages.skip_rest("no bracket")
        return report

    with stages.run("equalize"):
        report.equalization = equalize_alpha(line, report.bracket, opts,
                                             explore_opts.tol_gap, explore_opts.max_bisection)
    if stages.stopped:
        stages.skip_rest("equalization failed")
        return report

    cfg_star = line.at(report.equalization.t)
    with stages.run("minima"):
        report.minima = minima_pair(report.equalization.solutions, cfg_star)
        others = report.equalization.solutions.members[2:]
        report.soft_checks["minima_flagged"] = report.minima.both_minima
        report.soft_checks["third_has_negative_direction"] = any(
            s.hessian_min is not None and s.hessian_min < 0 for s in others)
        if report.theta_star is not None:
            report.soft_checks["theta_star_consistent"] = (
                report.theta_star.value <= cfg.lam
                or not (report.minima.first.energy < 0 and report.minima.second.energy < 0))

    with stages.run("saddle"):
        report.saddle = saddle_diagnostics(report.equalization.solutions, cfg_star)
        report.soft_checks["saddle_stationary"] = all(r["passed"] for r in report.saddle)

    logger.info("explore: status=%s, %d solutions, gap %.3e", report.status.value,
                len(report.equalization.solutions), report.equalization.gap)
    return report
