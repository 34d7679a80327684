"""Uniform grids over an interval or a rectangle with Dirichlet boundary."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class Mesh:
    dim: int
    cells_per_side: int
    lengths: tuple[float, ...]
    h: tuple[float, ...]
    interior_count: int
    measure: float
    node_coords: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, ...]:
        """Interior nodes per axis."""
        return (self.cells_per_side - 1,) * self.dim

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    def _key(self) -> tuple:
        return (self.dim, self.cells_per_side, self.lengths)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())


def build_mesh(dim: int, n: int, lengths) -> Mesh:
    """Build a uniform mesh with n cells along every axis.

    Interior nodes are ordered lexicographically, first axis outermost.
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if int(n) != n or n < 2:
        raise ValueError(f"cells_per_side must be an integer >= 2, got {n}")
    n = int(n)

    if np.isscalar(lengths):
        lengths = (float(lengths),) * dim
    lengths = tuple(float(length) for length in lengths)
    if len(lengths) == 1 and dim == 2:
        lengths = lengths * 2
    if len(lengths) != dim:
        raise ValueError(f"expected {dim} side lengths, got {len(lengths)}")
    if any(not np.isfinite(length) or length <= 0 for length in lengths):
        raise ValueError(f"side lengths must be positive, got {lengths}")

    h = tuple(length / n for length in lengths)
    axes = [np.arange(1, n) * step for step in h]
    if dim == 1:
        coords = axes[0].reshape(-1, 1)
    else:
        gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
        coords = np.column_stack([gx.ravel(), gy.ravel()])
    coords.setflags(write=False)

    return Mesh(
        dim=dim,
        cells_per_side=n,
        lengths=lengths,
        h=h,
        interior_count=(n - 1) ** dim,
        measure=float(np.prod(lengths)),
        node_coords=coords,
    )
