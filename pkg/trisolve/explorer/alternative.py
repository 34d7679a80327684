"""First branch of the alternative: nonzero solutions of the auxiliary problem."""

import logging
from dataclasses import dataclass

import numpy as np

from trisolve.energy import ProblemConfig
from trisolve.models import ProblemKind
from trisolve.solvers import SolutionRecord, SolutionSet, SolverOptions, multistart_find

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlternativeResult:
    nontrivial_found: bool
    witness: SolutionRecord | None
    solutions: SolutionSet
    threshold: float

    @property
    def max_norm(self) -> float:
        return max((float(np.sqrt(np.sum(s.field.mesh.cell_volume * s.values**2))) for s in self.solutions),
                   default=0.0)


def check_alternative(cfg: ProblemConfig, opts: SolverOptions | None = None) -> AlternativeResult:
    """Multistart on −Δu = −F(u)f(u) + λg(u); nontrivial means ‖u‖_Y > 1e-6·√meas(Ω)."""
    solutions = multistart_find(cfg, opts, ProblemKind.aux8, with_hessian=False)
    threshold = 1e-6 * np.sqrt(cfg.mesh.measure)
    witness = None
    for record in solutions:
        if np.sqrt(np.sum(cfg.m * record.values**2)) > threshold:
            witness = record
            break
    logger.info("check_alternative: %d solutions of the auxiliary problem, nontrivial=%s",
                len(solutions), witness is not None)
    return AlternativeResult(nontrivial_found=witness is not None, witness=witness,
                             solutions=solutions, threshold=threshold)
