"""Subcommand dispatch, artifact emission and the run ledger."""

import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from trisolve.cli.report import SCHEMA_VERSION, to_jsonable, write_branch_table, write_json, write_summary
from trisolve.cli.runconfig import RunConfig, flatten_config
from trisolve.config import settings
from trisolve.database import get_session
from trisolve.discretization import build_mesh, first_eigenpair, write_field_csv
from trisolve.energy import ProblemConfig, make_problem
from trisolve.exceptions import HypothesisViolation, SearchFailure, TrisolveError
from trisolve.explorer import AlphaFamily, ExplorationReport, check_alternative, explore
from trisolve.models import RunRecord, RunStatus, Subcommand
from trisolve.nonlinearity import (
    Nonlinearity,
    check_condition16,
    constant,
    gamma_corollary2,
    growth_report,
    load_table,
    plus_power,
    scale_f_corollary2,
    threshold_report,
)
from trisolve.solvers import MinimaPair, SolutionSet, minima_pair, multistart_find

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Problem:
    cfg: ProblemConfig
    family: AlphaFamily
    h: Nonlinearity | None
    scale: float
    lambda1: float


@dataclass
class CommandResult:
    payload: dict
    status: RunStatus = RunStatus.ok
    timings_ms: dict = field(default_factory=dict)


# --- Problem assembly ---

def _require(path: str | None, key: str) -> str:
    if not path:
        raise HypothesisViolation(f"{key} is required for a table nonlinearity", hypothesis=key)
    return path


def build_g(config: RunConfig) -> Nonlinearity:
    g = config.nonlinearity.g
    if g.kind == "plus_power":
        return plus_power(g.q)
    if g.kind == "constant":
        return constant(g.value)
    return load_table(_require(g.table_path, "nonlinearity.g.table_path"))


def build_h(config: RunConfig) -> Nonlinearity:
    f = config.nonlinearity.f
    if f.h_kind == "one":
        return constant(1.0)
    if f.h_kind == "constant":
        return constant(f.h_value)
    return load_table(_require(f.h_table_path, "nonlinearity.f.h_table_path"))


def build_problem(config: RunConfig) -> Problem:
    d = config.domain
    mesh = build_mesh(d.dim, d.n, d.lengths)
    lambda1 = first_eigenpair(mesh).value
    lam = config.lam.value * (lambda1 if config.lam.mode == "multiple_of_lambda1" else 1.0)

    fs = config.nonlinearity.f
    h, scale = None, 1.0
    if fs.kind == "one":
        f = constant(1.0)
    elif fs.kind == "constant":
        f = constant(fs.value)
    elif fs.kind == "table":
        f = load_table(_require(fs.table_path, "nonlinearity.f.table_path"))
    else:
        h = build_h(config)
        gamma = gamma_corollary2(h)
        f = scale_f_corollary2(h, lam, gamma)
        scale = math.sqrt(gamma / lam)

    family = AlphaFamily(config.alpha.family, mesh, k=config.alpha.k, bound=config.alpha.bound)
    alpha = (family.field(config.alpha.coefficients) if config.alpha.coefficients is not None
             else np.zeros(mesh.interior_count))
    cfg = make_problem(mesh, f, build_g(config), lam, alpha)
    return Problem(cfg=cfg, family=family, h=h, scale=scale, lambda1=lambda1)


# --- Payload pieces ---

def _solutions_payload(solutions: SolutionSet, out_dir: Path, prefix: str = "solution") -> list[dict]:
    rows = []
    for i, s in enumerate(solutions):
        csv_path = write_field_csv(s.field, out_dir / f"{prefix}_{i}.csv")
        rows.append({
            "index": i,
            "energy": s.energy,
            "residual_norm": s.residual_norm,
            "l2_norm": float(np.sqrt(np.sum(s.field.mesh.cell_volume * s.values**2))),
            "side": s.side,
            "hessian_min": s.hessian_min,
            "local_min": s.local_min,
            "origin": s.origin,
            "csv": csv_path.name,
        })
    return rows


def _minima_payload(pair: MinimaPair | None) -> dict | None:
    if pair is None:
        return None
    return {
        "energies": [pair.first.energy, pair.second.energy],
        "origins": [pair.first.origin, pair.second.origin],
        "hessian_min": [pair.first.hessian_min, pair.second.hessian_min],
        "gap": pair.gap,
        "both_minima": pair.both_minima,
    }


# --- Subcommands ---

def cmd_eigen(problem: Problem, config: RunConfig, out_dir: Path) -> CommandResult:
    pair = first_eigenpair(problem.cfg.mesh)
    write_field_csv(pair.vector, out_dir / "eigenfunction.csv", value_name="v1")
    return CommandResult({
        "lambda1": pair.value,
        "iterations": pair.iterations,
        "residual_norm": pair.residual_norm,
        "eigenfunction_csv": "eigenfunction.csv",
    })


def cmd_check(problem: Problem, config: RunConfig, out_dir: Path) -> CommandResult:
    """λ outside the admissible interval is reported and exits as a violation."""
    cfg = problem.cfg
    c16 = check_condition16(cfg.f, cfg.g, cfg.lam, config.explore.condition16_radius,
                            config.explore.condition16_samples)
    thresholds = threshold_report(cfg.g, problem.lambda1, problem.h)
    inside = thresholds.contains(cfg.lam)
    payload = {
        "lambda1": problem.lambda1,
        "lambda": cfg.lam,
        "thresholds": {**to_jsonable(thresholds), "lambda_in_interval": inside},
        "interval": [thresholds.lambda_lo, thresholds.lambda_hi],
        "condition16": {**to_jsonable(c16), "pass": c16.passed},
        "growth": growth_report(cfg.f, cfg.g, cfg.mesh.dim),
    }
    if not inside:
        logger.warning("check: lambda=%.10g outside (%.10g, %.10g)",
                       cfg.lam, thresholds.lambda_lo, thresholds.lambda_hi)
        return CommandResult(payload, RunStatus.hypothesis_violation)
    return CommandResult(payload)


def cmd_solve(problem: Problem, config: RunConfig, out_dir: Path) -> CommandResult:
    cfg = problem.cfg
    solutions = multistart_find(cfg, config.solver_options())
    write_field_csv(cfg.alpha, out_dir / "alpha.csv", value_name="alpha")
    return CommandResult({
        "lambda1": problem.lambda1,
        "lambda": cfg.lam,
        "alpha": {"coefficients": config.alpha.coefficients, "csv": "alpha.csv"},
        "solutions": _solutions_payload(solutions, out_dir),
        "failures": len(solutions.failures),
        "rounds": solutions.rounds,
        "minima_pair": _minima_payload(minima_pair(solutions, cfg) if len(solutions) >= 2 else None),
    })


def cmd_alternative(problem: Problem, config: RunConfig, out_dir: Path) -> CommandResult:
    result = check_alternative(problem.cfg, config.solver_options())
    return CommandResult({
        "lambda1": problem.lambda1,
        "lambda": problem.cfg.lam,
        "alternative": {
            "nontrivial_found": result.nontrivial_found,
            "threshold": result.threshold,
            "count": len(result.solutions),
            "max_l2_norm": result.max_norm,
            "witness": None if result.witness is None else result.witness.origin,
            "solutions": _solutions_payload(result.solutions, out_dir, prefix="aux8_solution"),
        },
    })


def explore_payload(report: ExplorationReport, out_dir: Path) -> dict:
    eq = report.equalization
    payload = {
        "lambda1": report.lambda1,
        "lambda": report.lam,
        "thresholds": report.thresholds,
        "growth": report.growth,
        "condition16": None if report.condition16 is None else {
            **to_jsonable(report.condition16), "pass": report.condition16.passed},
        "alternative": None if report.alternative is None else {
            "nontrivial_found": report.alternative.nontrivial_found,
            "count": len(report.alternative.solutions),
            "max_l2_norm": report.alternative.max_norm,
            "active_branch": report.active_branch,
            "alpha_search_required": report.alpha_search_required,
        },
        "alpha": None,
        "solutions": [],
        "minima_pair": None,
        "theta_star": None if report.theta_star is None else {
            "value": report.theta_star.value,
            "best_scale": report.theta_star.best_scale,
            "upper_bound": True,
        },
        "theta_tilde_trend": None if report.theta_tilde is None else {
            "radii": report.theta_tilde.radii,
            "values": report.theta_tilde.values,
            "trend": report.theta_tilde.trend,
            "heuristic": True,
        },
        "ratio_bounds": report.ratio_bounds,
        "segment": report.segment,
        "saddle": report.saddle,
        "soft_checks": report.soft_checks,
        "stages": report.stages,
        "messages": report.messages,
        "diagnostics": {k: v for k, v in report.diagnostics.items() if k != "bracket"},
    }
    if report.branch_table:
        write_branch_table(out_dir / "branch_table.csv", report.branch_table)
        payload["branch_table_csv"] = "branch_table.csv"
    if eq is not None:
        write_field_csv(eq.alpha, out_dir / "alpha.csv", value_name="alpha")
        payload["alpha"] = {
            "t": eq.t,
            "coefficients": eq.coefficients,
            "csv": "alpha.csv",
            "gap": eq.gap,
            "J_pos": eq.J_pos,
            "J_neg": eq.J_neg,
            "bisection_steps": eq.iterations,
        }
        payload["solutions"] = _solutions_payload(eq.solutions, out_dir)
    payload["minima_pair"] = _minima_payload(report.minima)
    return payload


def cmd_explore(problem: Problem, config: RunConfig, out_dir: Path) -> CommandResult:
    report = explore(
        problem.cfg,
        problem.family,
        opts=config.solver_options(),
        explore_opts=config.explore,
        h=problem.h,
        scale=problem.scale,
        segment=config.alpha.segment,
        seed=config.seed,
    )
    return CommandResult(explore_payload(report, out_dir), report.status, report.timings_ms)


HANDLERS = {
    Subcommand.eigen: cmd_eigen,
    Subcommand.check: cmd_check,
    Subcommand.solve: cmd_solve,
    Subcommand.alternative: cmd_alternative,
    Subcommand.explore: cmd_explore,
}


# --- Ledger ---

def record_run(subcommand: Subcommand, config_path: str, seed: int, status: RunStatus,
               report_path: Path, duration_ms: float, details: dict) -> None:
    if not settings.record_runs:
        return
    try:
        with get_session() as session:
            session.add(RunRecord(
                subcommand=subcommand,
                config_path=config_path,
                seed=seed,
                status=status,
                exit_code=status.exit_code,
                report_path=str(report_path),
                duration_ms=duration_ms,
                details=json.dumps(details),
            ))
            session.commit()
    except Exception as e:
        logger.warning("Run ledger write failed: %s", e)


# --- Entry ---

def run(subcommand: Subcommand | str, config: RunConfig, config_path: str = "") -> int:
    """Execute one subcommand; returns the exit status. Artifacts land in config.output.dir."""
    subcommand = Subcommand(subcommand)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    status = RunStatus.ok
    timings: dict = {}
    body: dict = {}
    error = None

    try:
        problem = build_problem(config)
        result = HANDLERS[subcommand](problem, config, out_dir)
        body, status, timings = result.payload, result.status, result.timings_ms
    except HypothesisViolation as e:
        status, error = RunStatus.hypothesis_violation, str(e)
        logger.warning("%s: hypothesis violation: %s", subcommand.value, e)
    except SearchFailure as e:
        status, error = RunStatus.search_failure, str(e)
        logger.warning("%s: search failure: %s", subcommand.value, e)
    except TrisolveError as e:
        status, error = RunStatus.internal_error, f"{type(e).__name__}: {e}"
        logger.error("%s failed: %s", subcommand.value, e)
    except Exception as e:
        status, error = RunStatus.internal_error, f"{type(e).__name__}: {e}"
        logger.exception("%s raised", subcommand.value)

    duration_ms = 1e3 * (time.perf_counter() - start)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand.value,
        "status": status.value,
        "exit_code": status.exit_code,
        "config_echo": flatten_config(config),
        **body,
        "seed": config.seed,
        "timings_ms": {**timings, "total": duration_ms},
    }
    if error is not None:
        payload["error"] = error
    report_path = write_json(out_dir / f"{subcommand.value}_report.json", payload)
    write_summary(out_dir, payload)

    record_run(subcommand, config_path, config.seed, status, report_path, duration_ms,
               {"error": error} if error else {"keys": sorted(body)})
    logger.info("%s finished with status %s (exit %d) in %.0f ms",
                subcommand.value, status.value, status.exit_code, duration_ms)
    return status.exit_code
