"""Reproduce the reference scenario stage by stage: eigenpair → hypotheses →
auxiliary problem → θ estimates → α equalization → three solutions.

Usage:
    python scripts/reference_run.py
    python scripts/reference_run.py --config configs/reference.conf --output out/reference_run
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from trisolve.cli import build_problem, load_config, run
from trisolve.database import init_db
from trisolve.exceptions import HypothesisViolation, SearchFailure
from trisolve.explorer import (
    Segment,
    bracket_search,
    check_alternative,
    equalize_alpha,
    estimate_theta_star,
    estimate_theta_tilde,
)
from trisolve.nonlinearity import check_condition16, threshold_report
from trisolve.solvers import minima_pair

PROJECT_ROOT = Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser(description="End-to-end reference reproduction")
    parser.add_argument("--config", default=str(PROJECT_ROOT / "configs" / "reference.conf"))
    parser.add_argument("--output", default=None, help="override output.dir")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()

    overrides = {}
    if args.output:
        overrides["output.dir"] = args.output
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    config = load_config(args.config, overrides)
    opts = config.solver_options()

    print("\n[1/6] First Dirichlet eigenpair...")
    problem = build_problem(config)
    cfg = problem.cfg
    print(f"  lambda1 = {problem.lambda1:.10f}   lambda = {cfg.lam:.10f}")

    print("\n[2/6] Hypotheses...")
    try:
        thresholds = threshold_report(cfg.g, problem.lambda1, problem.h)
    except HypothesisViolation as e:
        print(f"  VIOLATION: {e}")
        return 2
    c16 = check_condition16(cfg.f, cfg.g, cfg.lam)
    print(f"  rho = {thresholds.rho}, sigma = {thresholds.sigma}, gamma = {thresholds.gamma}")
    print(f"  interval = ({thresholds.lambda_lo:.6f}, {thresholds.lambda_hi})")
    print(f"  sign condition grid sup = {c16.sup_value:.3e} -> {'pass' if c16.passed else 'fail'}")

    print("\n[3/6] Auxiliary problem...")
    alternative = check_alternative(cfg, opts)
    print(f"  {len(alternative.solutions)} solution(s), nonzero found: {alternative.nontrivial_found}")
    if alternative.nontrivial_found:
        print("  First branch holds; no alpha search needed.")
        return 0

    print("\n[4/6] Ratio estimates...")
    theta_star = estimate_theta_star(cfg)
    theta_tilde = estimate_theta_tilde(cfg, config.explore.radii)
    print(f"  theta* <= {theta_star.value:.8f} (lambda1 = {problem.lambda1:.8f})")
    print(f"  theta~ trend over R={list(theta_tilde.radii)}: {theta_tilde.trend}")

    print("\n[5/6] Bracketing and equalizing branch energies...")
    line = Segment(problem.family, cfg, problem.scale)
    t_range = config.alpha.segment or (-2.0 * cfg.lam, 0.0)
    try:
        bracket = bracket_search(line, t_range, opts, config.explore.grid_points,
                                 config.explore.bracket_refinements)
        print(f"  bracket: [{bracket.lower.t:.6f}, {bracket.upper.t:.6f}]")
        eq = equalize_alpha(line, bracket, opts, config.explore.tol_gap, config.explore.max_bisection)
    except SearchFailure as e:
        print(f"  SEARCH FAILURE: {e}")
        return 3
    print(f"  t* = {eq.t:.12f}  gap = {eq.gap:.3e}  ({eq.iterations} bisection steps)")

    print("\n[6/6] Solutions at the equalized alpha...")
    pair = minima_pair(eq.solutions, line.at(eq.t))
    for i, s in enumerate(eq.solutions):
        print(f"  #{i}: J = {s.energy:+.12f}  residual = {s.residual_norm:.1e}  "
              f"hessian min = {s.hessian_min:+.4e}  ({s.origin})")
    print(f"  lowest pair gap = {pair.gap:.3e}, both local minima: {pair.both_minima}")

    print("\nWriting explore report...")
    init_db()
    code = run("explore", config, config_path=args.config)
    print(f"  exit status {code}; artifacts in {config.output_dir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
