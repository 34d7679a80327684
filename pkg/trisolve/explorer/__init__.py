"""The alternative: auxiliary problem check, θ estimates and the α search."""

from trisolve.explorer.alternative import AlternativeResult, check_alternative
from trisolve.explorer.branches import (
    Bracket,
    BranchEnergies,
    Equalization,
    Segment,
    branch_energies,
    bracket_search,
    equalize_alpha,
)
from trisolve.explorer.family import AlphaFamily, FamilyKind
from trisolve.explorer.pipeline import (
    ExplorationReport,
    ExploreOptions,
    explore,
    saddle_diagnostics,
)
from trisolve.explorer.theta import (
    RatioBounds,
    ThetaStarEstimate,
    ThetaTildeTrend,
    estimate_ratio_bounds,
    estimate_theta_star,
    estimate_theta_tilde,
)

__all__ = [
    "AlphaFamily",
    "FamilyKind",
    "AlternativeResult",
    "check_alternative",
    "ThetaStarEstimate",
    "ThetaTildeTrend",
    "RatioBounds",
    "estimate_theta_star",
    "estimate_theta_tilde",
    "estimate_ratio_bounds",
    "Segment",
    "BranchEnergies",
    "Bracket",
    "Equalization",
    "branch_energies",
    "bracket_search",
    "equalize_alpha",
    "ExploreOptions",
    "ExplorationReport",
    "explore",
    "saddle_diagnostics",
]
