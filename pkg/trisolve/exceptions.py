"""Error hierarchy. The CLI maps these onto exit statuses."""

import numpy as np


class TrisolveError(Exception):
    """Base for every failure raised on purpose."""


class ConfigError(TrisolveError, ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        super().__init__(message)
        self.line = line
        self.key = key


class HypothesisViolation(TrisolveError, ValueError):
    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class ConvergenceError(TrisolveError, RuntimeError):
    """An iterative method stopped without meeting its contract."""

    def __init__(
        self,
        message: str,
        iterate: np.ndarray | None = None,
        residual_norm: float = float("nan"),
        iterations: int = 0,
    ):
        super().__init__(message)
        self.iterate = iterate
        self.residual_norm = residual_norm
        self.iterations = iterations


class EigenSolveError(ConvergenceError):
    pass


class NewtonFailure(ConvergenceError):
    pass


class DeflationError(TrisolveError, ArithmeticError):
    """Deflated residual evaluated at distance zero from a deflated root."""


class SearchFailure(TrisolveError, RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
