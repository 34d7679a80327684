"""JSON reports, CSV tables and the Markdown summary."""

import csv
import dataclasses
import json
import math
from enum import Enum
from pathlib import Path

import numpy as np
from jinja2 import Environment, FileSystemLoader, StrictUndefined

SCHEMA_VERSION = 1
TEMPLATE_DIR = Path(__file__).resolve().parent / "templates"

_env = Environment(
    loader=FileSystemLoader(TEMPLATE_DIR),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


def _float(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become "inf", "-inf" or "nan"."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, Path):
        return obj.as_posix()
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path: Path, payload: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(payload), indent=2, allow_nan=False) + "\n", encoding="utf-8")
    return path


def write_branch_table(path: Path, rows) -> Path:
    """Columns t, J_pos, J_neg; lost branches are written as nan."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "J_pos", "J_neg"])
        for row in rows:
            writer.writerow([format(float(v), ".17g") for v in row])
    return path


def render_summary(payload: dict) -> str:
    return _env.get_template("summary.md.j2").render(report=to_jsonable(payload))


def write_summary(out_dir: Path, payload: dict) -> Path:
    path = out_dir / "summary.md"
    path.write_text(render_summary(payload), encoding="utf-8")
    return path
