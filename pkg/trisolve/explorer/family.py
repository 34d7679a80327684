"""Finite-dimensional convex families of forcing terms α."""

import dataclasses
from dataclasses import dataclass
from enum import Enum

import numpy as np

from trisolve.discretization import Field, Mesh

_BOX_SLACK = 1e-12


class FamilyKind(str, Enum):
    constants = "constants"
    piecewise_constant = "piecewise_constant"
    sine_series = "sine_series"


@dataclass(frozen=True, eq=False)
class AlphaFamily:
    """α = Σ cₖ·basisₖ with every |cₖ| ≤ box.

    The box is chosen so that every member satisfies ‖α‖_∞ ≤ bound; a box is
    convex, so convex combinations of members stay in the family.
    """

    kind: FamilyKind
    mesh: Mesh
    k: int = 1
    bound: float = 100.0
    _basis: np.ndarray = dataclasses.field(init=False, repr=False)

    def __post_init__(self):
        if self.bound <= 0:
            raise ValueError("bound must be positive")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        object.__setattr__(self, "_basis", self._build_basis())

    def _build_basis(self) -> np.ndarray:
        coords = self.mesh.node_coords
        lengths = np.asarray(self.mesh.lengths)
        if self.kind is FamilyKind.constants:
            return np.ones((1, self.mesh.interior_count))
        if self.kind is FamilyKind.piecewise_constant:
            cell = np.minimum((coords / lengths * self.k).astype(int), self.k - 1)
            flat = np.ravel_multi_index(tuple(cell.T), (self.k,) * self.mesh.dim)
            basis = np.zeros((self.k**self.mesh.dim, self.mesh.interior_count))
            basis[flat, np.arange(self.mesh.interior_count)] = 1.0
            return basis
        modes = np.arange(1, self.k + 1)
        per_axis = [np.sin(np.outer(modes, coords[:, d]) * np.pi / lengths[d]) for d in range(self.mesh.dim)]
        if self.mesh.dim == 1:
            return per_axis[0]
        return np.einsum("in,jn->ijn", per_axis[0], per_axis[1]).reshape(-1, self.mesh.interior_count)

    @property
    def size(self) -> int:
        return self._basis.shape[0]

    @property
    def box(self) -> float:
        """Per-coefficient bound."""
        if self.kind is FamilyKind.sine_series:
            return self.bound / self.size
        return self.bound

    def contains(self, coefficients) -> bool:
        c = np.asarray(coefficients, dtype=float)
        return c.shape == (self.size,) and bool(np.all(np.abs(c) <= self.box * (1 + _BOX_SLACK)))

    def field(self, coefficients) -> Field:
        c = np.asarray(coefficients, dtype=float)
        if not self.contains(c):
            raise ValueError(f"coefficients {c.tolist()} are outside the family box ±{self.box:g}")
        return Field(c @ self._basis, self.mesh)

    def combine(self, a, b, theta: float) -> np.ndarray:
        if not 0.0 <= theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        return theta * np.asarray(a, dtype=float) + (1.0 - theta) * np.asarray(b, dtype=float)

    def segment_coefficients(self, t: float, scale: float = 1.0) -> np.ndarray:
        """Member t·scale·(1, ..., 1) of the one-parameter segment."""
        return np.full(self.size, t * scale)

    def segment_limit(self, scale: float = 1.0) -> float:
        """Largest |t| keeping the segment inside the box."""
        return self.box / abs(scale)
