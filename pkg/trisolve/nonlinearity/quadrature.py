"""Adaptive Simpson quadrature and quadrature-backed primitives."""

from collections.abc import Callable, Iterable

import numpy as np


def _simpson(f: Callable[[float], float], a: float, fa: float, b: float, fb: float):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _refine(f, a, fa, b, fb, m, fm, whole, tol, rel_tol, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    delta = left + right - whole
    # delta carries round-off proportional to the panel value
    if depth <= 0 or abs(delta) <= 15.0 * max(tol, rel_tol * abs(left + right)):
        return left + right + delta / 15.0
    return (
        _refine(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, rel_tol, depth - 1)
        + _refine(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, rel_tol, depth - 1)
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-12,
    rel_tol: float = 1e-14,
    max_depth: int = 30,
) -> float:
    """∫_a^b f by interval halving until the Richardson estimate is below
    max(tol, rel_tol·|panel integral|).

    Signed: a > b gives the negated integral.
    """
    if a == b:
        return 0.0
    fa, fb = float(f(a)), float(f(b))
    m, fm, whole = _simpson(f, a, fa, b, fb)
    return float(_refine(f, a, fa, b, fb, m, fm, whole, tol, rel_tol, max_depth))


class QuadraturePrimitive:
    """ξ ↦ ∫₀^ξ f(t) dt with f possibly kinked at known breakpoints.

    Integrals between consecutive knots (breakpoints plus 0) are computed once;
    an evaluation only integrates from the nearest knot, so no kink is ever
    inside a Simpson panel.
    """

    def __init__(self, function: Callable[[np.ndarray], np.ndarray],
                 breakpoints: Iterable[float] = (), tol: float = 1e-12):
        self._f = lambda t: float(function(np.asarray(t, dtype=float)))
        self._tol = tol
        self._knots = np.array(sorted(set(float(b) for b in breakpoints) | {0.0}))
        zero = int(np.searchsorted(self._knots, 0.0))
        cumulative = np.zeros(self._knots.size)
        for i in range(zero + 1, self._knots.size):
            cumulative[i] = cumulative[i - 1] + adaptive_simpson(
                self._f, self._knots[i - 1], self._knots[i], tol)
        for i in range(zero - 1, -1, -1):
            cumulative[i] = cumulative[i + 1] - adaptive_simpson(
                self._f, self._knots[i], self._knots[i + 1], tol)
        self._cumulative = cumulative

    def _scalar(self, xi: float) -> float:
        i = int(np.argmin(np.abs(self._knots - xi)))
        return self._cumulative[i] + adaptive_simpson(self._f, self._knots[i], xi, self._tol)

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        out = np.array([self._scalar(x) for x in xi.ravel()])
        return out.reshape(xi.shape)
