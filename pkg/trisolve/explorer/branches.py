"""Branch energies along a segment of α's, bracketing and equalization."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from trisolve.concurrency import parallel_map
from trisolve.discretization import Field, first_eigenpair
from trisolve.energy import ProblemConfig, energy
from trisolve.exceptions import NewtonFailure, SearchFailure
from trisolve.explorer.family import AlphaFamily
from trisolve.solvers import (
    NonlinearSystem,
    SolutionSet,
    SolverOptions,
    Start,
    multistart_find,
    newton_solve,
)
from trisolve.solvers.multistart import EIGEN_START_SCALES

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BranchEnergies:
    t: float
    J_pos: float
    J_neg: float
    u_pos: np.ndarray = field(repr=False)
    u_neg: np.ndarray = field(repr=False)

    @property
    def gap(self) -> float:
        return self.J_pos - self.J_neg


@dataclass(frozen=True)
class Bracket:
    lower: BranchEnergies
    upper: BranchEnergies
    table: list[tuple[float, float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class Equalization:
    t: float
    coefficients: np.ndarray
    alpha: Field
    solutions: SolutionSet
    gap: float
    J_pos: float
    J_neg: float
    iterations: int


class Segment:
    """t ↦ problem with α(t) = family member t·scale·(1, ..., 1)."""

    def __init__(self, family: AlphaFamily, cfg: ProblemConfig, scale: float = 1.0):
        self.family = family
        self.cfg = cfg
        self.scale = scale

    def coefficients(self, t: float) -> np.ndarray:
        return self.family.segment_coefficients(t, self.scale)

    def at(self, t: float) -> ProblemConfig:
        return self.cfg.with_alpha(self.family.field(self.coefficients(t)))


def branch_energies(cfg: ProblemConfig, opts: SolverOptions | None = None,
                    warm: Sequence[np.ndarray] = (), t: float = math.nan) -> BranchEnergies:
    """Lowest energies among solutions on the +v₁ side and on the rest.

    A solution counts as positive when its v₁-projection exceeds distinct_tol;
    u = 0 and everything below belongs to the negative side.
    """
    opts = opts or SolverOptions()
    delta = opts.distinct_threshold(cfg.mesh.measure)
    v1 = first_eigenpair(cfg.mesh).vector.values
    starts = [np.zeros_like(v1)] + [s * v1 for t_ in EIGEN_START_SCALES for s in (t_, -t_)]
    starts.extend(np.asarray(w, dtype=float) for w in warm)
    system = NonlinearSystem.for_problem(cfg)

    def attempt(u0):
        try:
            return newton_solve(system, u0, opts).values
        except NewtonFailure:
            return None

    best = {+1: (math.inf, None), -1: (math.inf, None)}
    for u in parallel_map(attempt, starts):
        if u is None:
            continue
        side = +1 if float(np.sum(cfg.m * v1 * u)) > delta else -1
        J = energy(u, cfg)
        if J < best[side][0]:
            best[side] = (J, u)

    lost = [name for side, name in ((+1, "positive"), (-1, "negative")) if best[side][1] is None]
    if lost:
        raise SearchFailure(
            f"branch lost at t={t:.6g}: no converged start on the {' and '.join(lost)} side",
            diagnostics={"t": t, "lost": lost},
        )
    return BranchEnergies(t=t, J_pos=best[+1][0], J_neg=best[-1][0],
                          u_pos=best[+1][1], u_neg=best[-1][1])


def _evaluate(segment: Segment, ts, opts: SolverOptions) -> list[BranchEnergies | SearchFailure]:
    def one(t):
        try:
            return branch_energies(segment.at(t), opts, t=float(t))
        except SearchFailure as exc:
            logger.warning("bracket_search: %s", exc)
            return exc
    return parallel_map(one, list(ts))


def _changes_sign(a: BranchEnergies, b: BranchEnergies) -> bool:
    return a.gap == 0 or b.gap == 0 or (a.gap > 0) != (b.gap > 0)


def bracket_search(
    segment: Segment,
    t_range: tuple[float, float],
    opts: SolverOptions | None = None,
    grid_points: int = 16,
    refinements: int = 3,
) -> Bracket:
    """Scan an even t-grid from the upper end down for a sign change of J_pos − J_neg.

    Where a branch is lost next to a valid point, that cell is re-scanned on a
    finer grid, at most `refinements` levels deep.
    """
    opts = opts or SolverOptions()
    t_lo, t_hi = sorted(float(t) for t in t_range)
    table: list[tuple[float, float, float]] = []

    def scan(lo: float, hi: float, level: int) -> Bracket | None:
        ts = np.linspace(hi, lo, grid_points)
        rows = _evaluate(segment, ts, opts)
        for t, row in zip(ts, rows):
            if isinstance(row, BranchEnergies):
                table.append((float(t), row.J_pos, row.J_neg))
            else:
                table.append((float(t), math.nan, math.nan))
        for (t_a, a), (t_b, b) in zip(zip(ts, rows), zip(ts[1:], rows[1:])):
            if isinstance(a, BranchEnergies) and isinstance(b, BranchEnergies):
                if _changes_sign(a, b):
                    return Bracket(lower=b, upper=a)
            elif isinstance(a, BranchEnergies) and level < refinements:
                logger.info("bracket_search: refining [%.6g, %.6g] (level %d)", t_b, t_a, level + 1)
                found = scan(float(t_b), float(t_a), level + 1)
                if found is not None:
                    return found
        return None

    found = scan(t_lo, t_hi, 0)
    table.sort()
    if found is None:
        raise SearchFailure(
            f"no sign change of J_pos - J_neg on [{t_lo:g}, {t_hi:g}]",
            diagnostics={"table": table},
        )
    logger.info("bracket_search: bracket [%.6g, %.6g]", found.lower.t, found.upper.t)
    return Bracket(lower=found.lower, upper=found.upper, table=table)


def equalize_alpha(
    segment: Segment,
    bracket: Bracket | tuple[float, float],
    opts: SolverOptions | None = None,
    tol_gap: float = 1e-8,
    max_bisection: int = 60,
) -> Equalization:
    """Bisect t until |J_pos − J_neg| ≤ tol_gap·(1 + |J_pos|), then collect all
    solutions at the equalized α; at least three are required.
    """
    opts = opts or SolverOptions()
    if not isinstance(bracket, Bracket):
        lo, hi = sorted(float(t) for t in bracket)
        ends = _evaluate(segment, (lo, hi), opts)
        for end in ends:
            if isinstance(end, SearchFailure):
                raise end
        bracket = Bracket(lower=ends[0], upper=ends[1])
    a, b = bracket.lower, bracket.upper
    if not _changes_sign(a, b):
        raise SearchFailure(
            f"invalid bracket: J_pos - J_neg has the same sign at t={a.t:g} and t={b.t:g}",
            diagnostics={"gaps": [a.gap, b.gap]},
        )

    def converged(be: BranchEnergies) -> bool:
        return abs(be.gap) <= tol_gap * (1.0 + abs(be.J_pos))

    current = min((a, b), key=lambda be: abs(be.gap))
    iterations = 0
    while not converged(current):
        if iterations >= max_bisection:
            raise SearchFailure(
                f"bisection stopped after {max_bisection} steps with gap {current.gap:.3e}",
                diagnostics={"t": current.t, "gap": current.gap},
            )
        iterations += 1
        mid = 0.5 * (a.t + b.t)
        try:
            current = branch_energies(segment.at(mid), opts,
                                      warm=(current.u_pos, current.u_neg), t=mid)
        except SearchFailure as exc:
            raise SearchFailure(f"branch lost during bisection: {exc}",
                                diagnostics={**exc.diagnostics, "iteration": iterations}) from exc
        logger.debug("equalize_alpha: t=%.15g gap=%.3e", mid, current.gap)
        if (current.gap > 0) == (a.gap > 0):
            a = current
        else:
            b = current

    cfg = segment.at(current.t)
    solutions = multistart_find(
        cfg, opts,
        extra_starts=(Start("branch+", current.u_pos), Start("branch-", current.u_neg)),
    )
    logger.info("equalize_alpha: t*=%.15g gap=%.3e after %d steps, %d solutions",
                current.t, current.gap, iterations, len(solutions))
    if len(solutions) < 3:
        raise SearchFailure(
            f"only {len(solutions)} distinct solutions at the equalized alpha",
            diagnostics={"t": current.t, "gap": current.gap, "solutions": len(solutions)},
        )
    coefficients = segment.coefficients(current.t)
    return Equalization(
        t=current.t,
        coefficients=coefficients,
        alpha=cfg.alpha,
        solutions=solutions,
        gap=abs(current.gap),
        J_pos=current.J_pos,
        J_neg=current.J_neg,
        iterations=iterations,
    )
