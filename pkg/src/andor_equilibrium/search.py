"""One-dimensional search: bisection, golden-section and grid refinement."""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from math import sqrt

log = logging.getLogger(__name__)

__all__ = [
    "PHI_RATIO",
    "SearchResult",
    "bisect_increasing",
    "bisect_sign_change",
    "golden_section_max",
    "grid_refine_max",
]

PHI_RATIO = 2 / (1 + sqrt(5))


@dataclass(frozen=True)
class SearchResult:
    x: float
    value: float
    iterations: int
    converged: bool


def bisect_increasing(
    func: Callable,
    target,
    lo=0.0,
    hi=1.0,
    tol: float = 1e-12,
    max_iterations: int = 200,
):
    """Solve func(x) = target on [lo, hi] for a nondecreasing ``func``.

    Works on floats and on ``Fraction`` bounds alike; returns the midpoint
    of the final bracket.
    """
    for _ in range(max_iterations):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2
        if func(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def bisect_sign_change(
    func: Callable, lo, hi, tol: float, max_iterations: int = 400
) -> tuple:
    """Shrink [lo, hi] around a sign change of ``func`` to width <= tol."""
    f_lo = func(lo)
    if f_lo * func(hi) > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iterations):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2
        f_mid = func(mid)
        if f_mid == 0:
            return mid, mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi


def golden_section_max(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iterations: int = 500,
) -> SearchResult:
    """Maximize a unimodal ``func`` on [lo, hi]; endpoints are candidates."""
    x1 = hi - PHI_RATIO * (hi - lo)
    x2 = lo + PHI_RATIO * (hi - lo)
    f1, f2 = func(x1), func(x2)
    f_lo, f_hi = func(lo), func(hi)
    lo0, hi0 = lo, hi
    iteration = 0
    while iteration < max_iterations and hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + PHI_RATIO * (hi - lo)
            f2 = func(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - PHI_RATIO * (hi - lo)
            f1 = func(x1)
        iteration += 1

    x_mid = (lo + hi) / 2
    f_mid = func(x_mid)
    best = max((f_mid, x_mid), (f_lo, lo0), (f_hi, hi0))
    return SearchResult(
        x=best[1],
        value=best[0],
        iterations=iteration,
        converged=hi - lo <= tol,
    )


def grid_refine_max(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-6,
    points: int = 33,
    max_rounds: int = 200,
) -> SearchResult:
    """Maximize ``func`` on [lo, hi] by repeated grid scans.

    Each round evaluates ``points`` equally spaced abscissae and narrows the
    bracket to the neighbours of the best one; no unimodality is assumed
    beyond the final bracket.
    """
    rounds = 0
    best_x, best_f = lo, func(lo)
    while rounds < max_rounds:
        step = (hi - lo) / (points - 1)
        xs = [lo + k * step for k in range(points)]
        values = [func(x) for x in xs]
        k = max(range(points), key=lambda j: (values[j], -j))
        best_x, best_f = xs[k], values[k]
        rounds += 1
        if hi - lo <= tol:
            break
        lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, points - 1)]
        log.debug("grid round %d: bracket [%.12g, %.12g]", rounds, lo, hi)
    return SearchResult(
        x=best_x, value=best_f, iterations=rounds, converged=hi - lo <= tol
    )
