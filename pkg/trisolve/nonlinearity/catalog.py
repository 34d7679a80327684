"""Nonlinearities f, g with primitives F, G and growth metadata."""

import csv
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from trisolve.exceptions import HypothesisViolation
from trisolve.nonlinearity.quadrature import QuadraturePrimitive

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


class NonlinearityKind(str, Enum):
    plus_power = "plus_power"
    constant = "constant"
    table = "table"


@dataclass(frozen=True)
class Nonlinearity:
    name: str
    kind: NonlinearityKind
    function: ArrayFn = field(repr=False, compare=False)
    primitive: ArrayFn = field(repr=False, compare=False)
    derivative: ArrayFn | None = field(default=None, repr=False, compare=False)
    growth_exponent: float | None = None
    primitive_closed_form: bool = True
    breakpoints: tuple[float, ...] = ()
    params: dict = field(default_factory=dict)

    def __call__(self, xi) -> np.ndarray:
        return self.function(np.asarray(xi, dtype=float))

    def F(self, xi) -> np.ndarray:
        return self.primitive(np.asarray(xi, dtype=float))

    def prime(self, xi) -> np.ndarray:
        """Derivative; central differences when no analytic form is attached."""
        xi = np.asarray(xi, dtype=float)
        if self.derivative is not None:
            return self.derivative(xi)
        step = 1e-6 * np.maximum(1.0, np.abs(xi))
        return (self.function(xi + step) - self.function(xi - step)) / (2.0 * step)

    def quadrature_primitive(self) -> QuadraturePrimitive:
        return QuadraturePrimitive(self.function, self.breakpoints)

    @property
    def scale_factor(self) -> float:
        return float(self.params.get("scale", 1.0))


# --- Built-ins ---

def plus_power(q: float) -> Nonlinearity:
    """g(ξ) = ξ⁺ − (ξ⁺)^q, G(ξ) = ½(ξ⁺)² − (ξ⁺)^{q+1}/(q+1).

    g′ takes the right-derivative at the kink: g′(ξ) = 1 − q(ξ⁺)^{q−1} for ξ ≥ 0.
    """
    q = float(q)
    if not q > 1:
        raise HypothesisViolation(f"plus_power needs q > 1, got q={q}", hypothesis="q > 1")

    def g(xi):
        p = np.maximum(xi, 0.0)
        return p - p**q

    def G(xi):
        p = np.maximum(xi, 0.0)
        return 0.5 * p * p - p ** (q + 1.0) / (q + 1.0)

    def dg(xi):
        p = np.maximum(xi, 0.0)
        return np.where(xi >= 0.0, 1.0 - q * p ** (q - 1.0), 0.0)

    return Nonlinearity(
        name=f"plus_power(q={q:g})",
        kind=NonlinearityKind.plus_power,
        function=g,
        primitive=G,
        derivative=dg,
        growth_exponent=q,
        breakpoints=(0.0,),
        params={"q": q},
    )


def constant(value: float) -> Nonlinearity:
    c = float(value)
    return Nonlinearity(
        name=f"constant({c:g})",
        kind=NonlinearityKind.constant,
        function=lambda xi: np.full_like(xi, c, dtype=float),
        primitive=lambda xi: c * xi,
        derivative=lambda xi: np.zeros_like(xi, dtype=float),
        growth_exponent=0.0,
        params={"value": c},
    )


def table(points) -> Nonlinearity:
    """Piecewise-linear through (ξ, value) pairs, linear extrapolation past the ends."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("table needs at least two (xi, value) pairs")
    xs, ys = pts[:, 0].copy(), pts[:, 1].copy()
    if np.any(np.diff(xs) <= 0):
        raise ValueError("table abscissae must be strictly increasing")
    slopes = np.diff(ys) / np.diff(xs)

    def segment(xi):
        return np.clip(np.searchsorted(xs, xi, side="right") - 1, 0, slopes.size - 1)

    def fn(xi):
        k = segment(xi)
        return ys[k] + slopes[k] * (xi - xs[k])

    def dfn(xi):
        return slopes[segment(xi)]

    quad = QuadraturePrimitive(fn, tuple(xs))
    return Nonlinearity(
        name=f"table({xs.size} points)",
        kind=NonlinearityKind.table,
        function=fn,
        primitive=quad,
        derivative=dfn,
        growth_exponent=1.0,
        primitive_closed_form=False,
        breakpoints=tuple(float(x) for x in xs),
        params={"points": pts.tolist()},
    )


def load_table(path: str | Path) -> Nonlinearity:
    """Table from a CSV of ξ,value rows; a non-numeric first row is a header."""
    path = Path(path)
    rows: list[tuple[float, float]] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if lineno == 1:
                    continue
                raise ValueError(f"{path}:{lineno}: expected 'xi,value', got {row!r}")
    nl = table(rows)
    return replace(nl, name=f"table({path.name})", params={**nl.params, "path": str(path)})


def make_builtin(name: str, params: dict | None = None) -> Nonlinearity:
    params = params or {}
    if name == "plus_power":
        return plus_power(params.get("q", 3.0))
    if name == "constant_one":
        return constant(1.0)
    if name == "constant":
        return constant(params.get("value", 1.0))
    if name == "table":
        if "path" in params:
            return load_table(params["path"])
        return table(params["points"])
    raise ValueError(f"unknown nonlinearity {name!r}")


def scale(nl: Nonlinearity, factor: float, name: str | None = None) -> Nonlinearity:
    """factor·nl, primitive and derivative scaled identically."""
    factor = float(factor)
    base_f, base_F, base_d = nl.function, nl.primitive, nl.derivative
    params = {**nl.params, "scale": nl.scale_factor * factor}
    if nl.kind is NonlinearityKind.constant:
        params["value"] = nl.params["value"] * factor
    return replace(
        nl,
        name=name or f"{factor:.6g}*{nl.name}",
        function=lambda xi: factor * base_f(xi),
        primitive=lambda xi: factor * base_F(xi),
        derivative=None if base_d is None else (lambda xi: factor * base_d(xi)),
        params=params,
    )


def scale_f_corollary2(h: Nonlinearity, lam: float, gamma: float) -> Nonlinearity:
    """f = √(λ/γ)·h."""
    if not gamma > 0:
        raise HypothesisViolation(
            f"gamma={gamma:g} is not positive; the hypothesis inf_{{[0,1]}} h > 0 is violated",
            hypothesis="inf_{[0,1]} h > 0",
        )
    if not lam > 0:
        raise HypothesisViolation(f"lambda={lam:g} must be positive", hypothesis="lambda > 0")
    factor = math.sqrt(lam / gamma)
    f = scale(h, factor, name=f"sqrt(lambda/gamma)*{h.name}")
    logger.debug("scale_f_corollary2: factor %.12g (lambda=%g, gamma=%g)", factor, lam, gamma)
    return replace(f, params={**f.params, "corollary2": {"base": h.name, "lambda": lam, "gamma": gamma}})
