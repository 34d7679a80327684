"""key = value run configuration: parsing, validation and the effective echo."""

import logging
import re
from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from trisolve.exceptions import ConfigError
from trisolve.explorer import ExploreOptions, FamilyKind
from trisolve.solvers import SolverOptions

logger = logging.getLogger(__name__)

ECHO_NAME = "effective.conf"
LIST_KEYS = {"domain.lengths", "explore.radii", "alpha.segment", "alpha.coefficients"}
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")
_NONE = {"none", "null", ""}


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# --- Sections ---

class DomainSection(_Section):
    dim: int = Field(1, ge=1, le=2)
    n: int = Field(200, ge=2)
    lengths: tuple[float, ...] = (1.0,)

    @field_validator("lengths")
    @classmethod
    def _positive(cls, v):
        if not v or any(length <= 0 for length in v):
            raise ValueError("lengths must be > 0")
        return v


class GSection(_Section):
    kind: Literal["plus_power", "table", "constant"] = "plus_power"
    q: float = 3.0
    table_path: str | None = None
    value: float = 0.0

    @field_validator("q")
    @classmethod
    def _q_above_one(cls, v):
        if not v > 1:
            raise ValueError("q > 1 is required")
        return v


class FSection(_Section):
    kind: Literal["one", "constant", "table", "corollary2_scaled"] = "corollary2_scaled"
    value: float = 1.0
    table_path: str | None = None
    h_kind: Literal["one", "constant", "table"] = "one"
    h_value: float = 1.0
    h_table_path: str | None = None


class NonlinearitySection(_Section):
    f: FSection = FSection()
    g: GSection = GSection()


class LambdaSection(_Section):
    mode: Literal["absolute", "multiple_of_lambda1"] = "multiple_of_lambda1"
    value: float = Field(2.0, ge=0)


class AlphaSection(_Section):
    family: FamilyKind = FamilyKind.constants
    k: int = Field(1, ge=1)
    bound: float = Field(100.0, gt=0)
    segment: tuple[float, float] | None = None
    coefficients: tuple[float, ...] | None = None


class OutputSection(_Section):
    dir: str = "out/reference"


class RunConfig(_Section):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    domain: DomainSection = DomainSection()
    nonlinearity: NonlinearitySection = NonlinearitySection()
    lam: LambdaSection = Field(LambdaSection(), alias="lambda")
    alpha: AlphaSection = AlphaSection()
    solver: SolverOptions = SolverOptions()
    explore: ExploreOptions = ExploreOptions()
    output: OutputSection = OutputSection()
    seed: int = 0

    @property
    def output_dir(self) -> Path:
        return Path(self.output.dir)

    def solver_options(self) -> SolverOptions:
        """Solver section with the run seed applied."""
        return self.solver.model_copy(update={"rng_seed": self.seed})


# --- Parsing ---

def _coerce(key: str, raw: str):
    if raw.lower() in _NONE:
        return None
    if key in LIST_KEYS or "," in raw:
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw


def _assign(tree: dict, key: str, value, lineno: int | None):
    parts = key.split(".")
    node = tree
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"line {lineno}: {key!r} conflicts with scalar {part!r}", line=lineno, key=key)
        node = child
    if isinstance(node.get(parts[-1]), dict):
        raise ConfigError(f"line {lineno}: {key!r} is a section, not a value", line=lineno, key=key)
    node[parts[-1]] = value


def parse_lines(text: str) -> dict[str, tuple[str, int]]:
    """Flat {dotted key: (raw value, line number)}; comments start with # or ;."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split(" #", 1)[0].strip()
        if not stripped or stripped[0] in "#;":
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}", line=lineno)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if not _KEY_RE.match(key):
            raise ConfigError(f"line {lineno}: invalid key {key!r}", line=lineno, key=key)
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {entries[key][1]})",
                              line=lineno, key=key)
        entries[key] = (raw, lineno)
    return entries


def build_config(entries: dict[str, tuple[str, int | None]]) -> RunConfig:
    tree: dict = {}
    for key, (raw, lineno) in entries.items():
        _assign(tree, key, _coerce(key, raw), lineno)
    try:
        return RunConfig.model_validate(tree)
    except ValidationError as exc:
        err = exc.errors()[0]
        key = ".".join(str(p) for p in err["loc"])
        line = entries.get(key, (None, None))[1]
        where = f"line {line}: " if line else ""
        raise ConfigError(f"{where}{key}: {err['msg']}", line=line, key=key) from exc


def load_config(path: str | Path, overrides: dict[str, str] | None = None,
                write_echo: bool = True) -> RunConfig:
    """Parse, apply overrides (e.g. from --seed/--output), validate, echo."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    entries = parse_lines(path.read_text(encoding="utf-8"))
    for key, value in (overrides or {}).items():
        entries[key] = (str(value), None)
    config = build_config(entries)
    if write_echo:
        echo = config.output_dir / ECHO_NAME
        echo.parent.mkdir(parents=True, exist_ok=True)
        echo.write_text(dump_config(config), encoding="utf-8")
        logger.info("Config echo written to %s", echo)
    return config


# --- Echo ---

def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    return str(value)


def flatten_config(config: RunConfig) -> dict[str, str]:
    flat: dict[str, str] = {}

    def walk(prefix: str, node):
        for key, value in node.items():
            dotted = f"{prefix}.{key}" if prefix else key
            if isinstance(value, dict):
                walk(dotted, value)
            else:
                flat[dotted] = _format(value)

    walk("", config.model_dump(by_alias=True))
    return flat


def dump_config(config: RunConfig) -> str:
    lines = ["# effective configuration"]
    lines += [f"{key} = {value}" for key, value in flatten_config(config).items()]
    return "\n".join(lines) + "\n"
