from datetime import datetime
from enum import Enum
from typing import Optional

from sqlmodel import Field, SQLModel


# --- Enums ---

class Subcommand(str, Enum):
    eigen = "eigen"
    check = "check"
    solve = "solve"
    alternative = "alternative"
    explore = "explore"


class RunStatus(str, Enum):
    ok = "ok"
    hypothesis_violation = "hypothesis_violation"
    search_failure = "search_failure"
    internal_error = "internal_error"

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]


_EXIT_CODES = {
    RunStatus.ok: 0,
    RunStatus.internal_error: 1,
    RunStatus.hypothesis_violation: 2,
    RunStatus.search_failure: 3,
}


class ProblemKind(str, Enum):
    main = "main"    # -Δu = α f(u) + λ g(u)
    aux8 = "aux8"    # -Δu = -F(u) f(u) + λ g(u)


class Exactness(str, Enum):
    exact = "exact"
    estimated = "estimated"


class StageStatus(str, Enum):
    ok = "ok"
    failed = "failed"
    skipped = "skipped"
    violated = "violated"


# --- Models ---

class RunRecord(SQLModel, table=True):
    __tablename__ = "run_records"

    id: Optional[int] = Field(default=None, primary_key=True)
    subcommand: Subcommand = Field(index=True)
    config_path: str = ""
    seed: int = 0
    status: RunStatus = RunStatus.ok
    exit_code: int = 0
    report_path: str = ""
    duration_ms: float = 0.0
    details: str = ""  # JSON string with a short stage summary
    created_at: datetime = Field(default_factory=datetime.utcnow, index=True)
