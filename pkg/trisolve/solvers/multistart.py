"""Multistart deflated Newton: collect distinct solutions, rank by energy."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from trisolve.concurrency import parallel_map
from trisolve.discretization import Field, first_eigenpair
from trisolve.energy import ENERGIES, ProblemConfig
from trisolve.exceptions import NewtonFailure, SearchFailure
from trisolve.models import ProblemKind
from trisolve.solvers.deflation import deflated_residual
from trisolve.solvers.newton import NewtonResult, NonlinearSystem, newton_solve
from trisolve.solvers.options import SolverOptions
from trisolve.solvers.stability import hessian_min_eigenvalue, is_local_min

logger = logging.getLogger(__name__)

EIGEN_START_SCALES = (0.1, 1.0, 5.0)


@dataclass(frozen=True, eq=False)
class Start:
    label: str
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class SolutionRecord:
    field: Field
    energy: float
    residual_norm: float
    origin: str
    side: int = 0  # sign of the v₁-projection, 0 when within distinct_tol
    hessian_min: float | None = None
    local_min: bool | None = None

    @property
    def values(self) -> np.ndarray:
        return self.field.values


@dataclass
class SolutionSet:
    kind: ProblemKind
    members: list[SolutionRecord]
    distinct_tol: float
    failures: list[dict] = field(default_factory=list)
    rounds: int = 0

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def on_side(self, side: int) -> list[SolutionRecord]:
        return [s for s in self.members if s.side == side]


@dataclass(frozen=True)
class MinimaPair:
    first: SolutionRecord
    second: SolutionRecord
    gap: float

    @property
    def both_minima(self) -> bool:
        return bool(self.first.local_min and self.second.local_min)


def m_distance(a: np.ndarray, b: np.ndarray, m: np.ndarray) -> float:
    d = a - b
    return float(np.sqrt(np.sum(m * d * d)))


def build_starts(cfg: ProblemConfig, opts: SolverOptions,
                 extra: Sequence[Start] = ()) -> list[Start]:
    """0, ±t·v₁, caller-supplied warm starts, then smoothed Gaussian fields.

    Random fields are Poisson-smoothed white noise with M-norm drawn from
    [0.2, 5]; each uses its own generator seeded by (rng_seed, index).
    """
    v1 = first_eigenpair(cfg.mesh).vector.values
    starts = [Start("zero", np.zeros(cfg.mesh.interior_count))]
    for t in EIGEN_START_SCALES:
        starts.append(Start(f"+{t:g}v1", t * v1))
        starts.append(Start(f"-{t:g}v1", -t * v1))
    starts.extend(extra)

    A = sp.csc_matrix(cfg.A)
    index = 0
    while len(starts) < opts.max_starts:
        rng = np.random.default_rng([opts.rng_seed, index])
        smooth = np.atleast_1d(spsolve(A, cfg.m * rng.standard_normal(cfg.mesh.interior_count)))
        smooth *= rng.uniform(0.2, 5.0) / np.sqrt(np.sum(cfg.m * smooth * smooth))
        starts.append(Start(f"random{index}", smooth))
        index += 1
    return starts


def _attempt(system, start: Start, opts: SolverOptions) -> NewtonResult | NewtonFailure:
    try:
        return newton_solve(system, start.values, opts)
    except NewtonFailure as exc:
        return exc


def multistart_find(
    cfg: ProblemConfig,
    opts: SolverOptions | None = None,
    which: ProblemKind = ProblemKind.main,
    extra_starts: Sequence[Start] = (),
    with_hessian: bool = True,
) -> SolutionSet:
    """Deflated Newton from every start, round after round, until a round adds
    no new root or opts.max_rounds is reached. Members come back sorted by energy.
    """
    opts = opts or SolverOptions()
    delta = opts.distinct_threshold(cfg.mesh.measure)
    base = NonlinearSystem.for_problem(cfg, which)
    starts = build_starts(cfg, opts, extra_starts)
    v1 = first_eigenpair(cfg.mesh).vector.values

    found: list[tuple[np.ndarray, NewtonResult, str]] = []
    failures: list[dict] = []
    rounds = 0
    for rounds in range(1, opts.max_rounds + 1):
        system = deflated_residual(base, [u for u, _, _ in found], opts) if found else base
        outcomes = parallel_map(lambda s: _attempt(system, s, opts), starts)
        new = 0
        for start, outcome in zip(starts, outcomes):
            if isinstance(outcome, NewtonFailure):
                failures.append({"round": rounds, "start": start.label,
                                 "reason": str(outcome), "residual_norm": outcome.residual_norm})
                continue
            u = outcome.values
            if all(m_distance(u, other, cfg.m) > delta for other, _, _ in found):
                found.append((u, outcome, f"round {rounds}, start {start.label}"))
                new += 1
        logger.info("multistart_find(%s): round %d found %d new (total %d)",
                    which.value, rounds, new, len(found))
        if new == 0:
            break

    energy_fn = ENERGIES[which]
    members = []
    for u, outcome, origin in found:
        proj = float(np.sum(cfg.m * v1 * u))
        side = 0 if abs(proj) <= delta else int(np.sign(proj))
        mu = hessian_min_eigenvalue(u, cfg, which) if with_hessian else None
        members.append(SolutionRecord(
            field=Field(u, cfg.mesh),
            energy=energy_fn(u, cfg),
            residual_norm=outcome.residual_norm,
            origin=origin,
            side=side,
            hessian_min=mu,
            local_min=None if mu is None else is_local_min(mu, cfg),
        ))
    members.sort(key=lambda s: (s.energy, s.origin))
    return SolutionSet(kind=which, members=members, distinct_tol=delta, failures=failures, rounds=rounds)


def _with_hessian(rec: SolutionRecord, cfg: ProblemConfig, which: ProblemKind) -> SolutionRecord:
    if rec.hessian_min is not None:
        return rec
    mu = hessian_min_eigenvalue(rec.values, cfg, which)
    return replace(rec, hessian_min=mu, local_min=is_local_min(mu, cfg))


def minima_pair(solset: SolutionSet, cfg: ProblemConfig) -> MinimaPair:
    """Two lowest-energy members and |J(u_a) − J(u_b)|."""
    if len(solset) < 2:
        raise SearchFailure(
            f"minima_pair needs two solutions, got {len(solset)}",
            diagnostics={"solutions": len(solset)},
        )
    first, second = (_with_hessian(rec, cfg, solset.kind) for rec in solset.members[:2])
    return MinimaPair(first=first, second=second, gap=abs(first.energy - second.energy))
