"""Small vectorized root finders and maximizers used internally."""

from __future__ import annotations

import numpy as np

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def expand_bracket(fun, target, start=0.0, step=1.0, max_steps=80):
    """Find ``lo <= hi`` with ``fun(lo) <= target <= fun(hi)`` for increasing ``fun``.

    ``target`` may be an array; ``fun`` must be vectorized.  The search
    expands geometrically away from ``start`` in both directions.
    """
    target = np.asarray(target, dtype=float)
    lo = np.full(target.shape, start - step)
    hi = np.full(target.shape, start + step)
    width = np.full(target.shape, step)
    for _ in range(max_steps):
        below = fun(lo) > target
        if not below.any():
            break
        lo = np.where(below, lo - width, lo)
        width = np.where(below, 2.0 * width, width)
    width = np.full(target.shape, step)
    for _ in range(max_steps):
        above = fun(hi) < target
        if not above.any():
            break
        hi = np.where(above, hi + width, hi)
        width = np.where(above, 2.0 * width, width)
    return lo, hi


def bisect_increasing(fun, target, lo, hi, max_iter=200, xtol=4e-16):
    """Vectorized bisection for ``fun(x) = target`` with ``fun`` increasing.

    Returns the upper end of the final bracket, so ``fun(x) >= target``
    holds at the returned points whenever it held at ``hi``.
    """
    target = np.asarray(target, dtype=float)
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(max_iter):
        width = hi - lo
        active = width > xtol * np.maximum(1.0, np.abs(hi))
        if not active.any():
            break
        mid = lo + 0.5 * width
        fm = fun(mid)
        go_up = fm < target
        lo = np.where(active & go_up, mid, lo)
        hi = np.where(active & ~go_up, mid, hi)
    return hi


def golden_max(fun, a, b, iters=80):
    """Vectorized golden-section search for the maximum of ``fun`` on ``[a, b]``.

    ``a`` and ``b`` are arrays of interval endpoints; ``fun`` receives an
    array of abscissae of the same shape and returns objective values.
    Returns ``(x, fun(x))`` for the final interior point.  The objective is
    assumed unimodal on each interval.
    """
    a = np.array(a, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    for _ in range(iters):
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        keep_left = fun(c) >= fun(d)
        b = np.where(keep_left, d, b)
        a = np.where(keep_left, a, c)
    x = 0.5 * (a + b)
    return x, fun(x)
