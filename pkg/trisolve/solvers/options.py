from pydantic import BaseModel, ConfigDict, Field, model_validator


class SolverOptions(BaseModel):
    """Newton, line search, deflation and multistart knobs."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    newton_tol: float = Field(1e-9, gt=0)
    max_newton: int = Field(50, ge=1)
    armijo_c: float = Field(1e-4, gt=0, lt=1)
    backtrack: float = Field(0.5, gt=0, lt=1)
    max_halvings: int = Field(30, ge=1)
    deflation_power: float = Field(2.0, gt=0)
    deflation_shift: float = Field(1.0, ge=0)
    distinct_tol: float | None = Field(None, gt=0)  # default 1e-3·√measure
    max_starts: int = Field(24, ge=1)
    max_rounds: int = Field(8, ge=1)
    rng_seed: int = 0

    @model_validator(mode="after")
    def _check_newton_tol(self):
        if self.newton_tol >= 1:
            raise ValueError("newton_tol must be below 1")
        return self

    def distinct_threshold(self, measure: float) -> float:
        if self.distinct_tol is not None:
            return self.distinct_tol
        return 1e-3 * measure**0.5
