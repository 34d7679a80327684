"""Discrete functions on a mesh and their CSV form."""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from trisolve.discretization.mesh import Mesh

_AXIS_NAMES = ("x", "y")


@dataclass(frozen=True, eq=False)
class Field:
    values: np.ndarray = field(repr=False)
    mesh: Mesh

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.mesh.interior_count,):
            raise ValueError(
                f"field has shape {values.shape}, mesh expects ({self.mesh.interior_count},)"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self) -> int:
        return self.values.shape[0]


def as_values(u) -> np.ndarray:
    """Raw nodal values of a Field or array-like."""
    if isinstance(u, Field):
        return u.values
    return np.asarray(u, dtype=float)


def constant_field(mesh: Mesh, value: float) -> Field:
    return Field(np.full(mesh.interior_count, float(value)), mesh)


def write_field_csv(u: Field, path: str | Path, value_name: str = "u") -> Path:
    """Rows (coordinates..., value) in node order, header "x[,y],u"."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(_AXIS_NAMES[: u.mesh.dim]) + [value_name]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for coords, value in zip(u.mesh.node_coords, u.values):
            writer.writerow([format(float(c), ".17g") for c in coords] + [format(float(value), ".17g")])
    return path


def read_field_csv(path: str | Path, mesh: Mesh) -> Field:
    """Inverse of write_field_csv; node order and coordinates must match the mesh."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty field file")
    data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=float)
    if data.shape != (mesh.interior_count, mesh.dim + 1):
        raise ValueError(f"{path}: expected {mesh.interior_count} rows of {mesh.dim + 1} columns")
    if not np.allclose(data[:, :-1], mesh.node_coords, rtol=0.0, atol=1e-12 * max(mesh.lengths)):
        raise ValueError(f"{path}: node coordinates do not match the mesh")
    return Field(data[:, -1], mesh)
