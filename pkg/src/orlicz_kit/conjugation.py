"""Young conjugate ``phi*(u) = sup_{w >= 0} (u w - phi(w))`` and related checks.

The supremum is taken over ``{0}`` plus the tolerance grid, then refined by
golden-section search between the neighbours of the grid maximizer.  When
the maximizer sits at the top of the grid the supremum is still growing and
the point is flagged rather than given a value.  Because the candidate set
always contains the grid, ``phi*(u) >= u w - phi(w)`` holds exactly for every
grid point ``w``; that is what makes the computed biconjugate a minorant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._numeric import golden_max
from .exceptions import DomainError, PreconditionError
from .functions import (
    DEFAULT_TOL,
    OrliczFunction,
    Regime,
    Table,
    ToleranceConfig,
    convexity_check,
    regime_grid,
)
from .growth import GrowthReport, delta_q_best_constant, delta_star_p_best_constant

__all__ = [
    "Conjugate",
    "Biconjugate",
    "DualityReport",
    "young_conjugate",
    "biconjugate",
    "duality_transfer_check",
    "power_table",
]

RESOLVED = "resolved"
GROWING = "growing"


def power_table(p: float, tol: ToleranceConfig = DEFAULT_TOL) -> Table:
    """``u**p / p`` tabulated on the tolerance grid."""
    u = regime_grid(Regime.all(), tol)
    return Table(u, u ** p / p)


def _sup(f, w, u, chunk=256):
    """Grid-plus-golden supremum of ``u w - f(w)`` for each entry of ``u``.

    Returns ``(values, argmax, status_growing)``.
    """
    fw = f.value(w)
    vals = np.empty(u.size)
    arg = np.empty(u.size)
    top = np.zeros(u.size, dtype=bool)
    for s in range(0, u.size, chunk):
        uu = u[s : s + chunk]
        with np.errstate(invalid="ignore", over="ignore"):
            obj = uu[:, None] * w[None, :] - fw[None, :]
        obj = np.where(np.isnan(obj), -np.inf, obj)
        k = np.argmax(obj, axis=1)
        best = obj[np.arange(uu.size), k]
        a = w[np.maximum(k - 1, 0)]
        b = w[np.minimum(k + 1, w.size - 1)]

        def fun(x, uu=uu):
            with np.errstate(over="ignore"):
                return uu * x - f.value(x)

        xr, vr = golden_max(fun, a, b)
        better = vr > best
        vals[s : s + chunk] = np.where(better, vr, best)
        arg[s : s + chunk] = np.where(better, xr, w[k])
        top[s : s + chunk] = k == w.size - 1
    return vals, arg, top


@dataclass(frozen=True, eq=False)
class Conjugate:
    """Tabulated conjugate with a finite-domain marker.

    Attributes:
        u: dual grid (``0`` first).
        values: ``phi*(u)``; ``nan`` where the supremum is still growing.
        status: ``"resolved"`` or ``"growing"`` per point.
        maximizer: the ``w`` attaining each supremum.
        u_inf: threshold beyond which ``phi*`` is infinite; ``inf`` when the
            function grows faster than linearly at the top of the grid.
    """

    source: OrliczFunction
    u: np.ndarray
    values: np.ndarray
    status: np.ndarray
    maximizer: np.ndarray
    u_inf: float
    w: np.ndarray

    @property
    def resolved(self) -> np.ndarray:
        return self.status == RESOLVED

    def at(self, u) -> np.ndarray:
        """Evaluate the supremum directly at arbitrary points (no extrapolation)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        vals, _, top = _sup(self.source, self.w, u)
        return np.where(top, np.nan, vals)

    def as_function(self) -> Table:
        """Table through the resolved points where the conjugate is positive and increasing."""
        keep = self.resolved & (self.values > 0)
        u, y = self.u[keep], self.values[keep]
        if u.size:
            inc = np.concatenate([[True], np.diff(y) > 1e-10 * y[1:]])
            u, y = u[inc], y[inc]
        if u.size < 2:
            raise DomainError("conjugate has fewer than two positive resolved points")
        return Table(u, y)

    def to_spec(self):
        keep = self.resolved
        return {
            "u": self.u[keep].tolist(),
            "phi": self.values[keep].tolist(),
            "u_inf": self.u_inf if math.isfinite(self.u_inf) else "inf",
            "growing_from": float(self.u[~keep][0]) if np.any(~keep) else None,
        }


def _u_inf(f, w):
    top = w[-2:]
    ly = f.log_value(np.log(top))
    chord = (ly[1] - ly[0]) / math.log(top[1] / top[0])
    if not np.isfinite(chord) or chord > 1.0 + 1e-9:
        return math.inf
    y = f.value(top)
    return float((y[1] - y[0]) / (top[1] - top[0]))


def young_conjugate(f: OrliczFunction, tol: ToleranceConfig = DEFAULT_TOL) -> Conjugate:
    """Conjugate on ``{0}`` plus the tolerance grid."""
    grid = regime_grid(Regime.all(), tol)
    w = np.concatenate([[0.0], grid])
    u_inf = _u_inf(f, grid)
    u = w
    if math.isfinite(u_inf) and grid[0] < u_inf < grid[-1]:
        # the edge of the finite domain is itself a resolved point
        u = np.union1d(w, [u_inf])
    vals, arg, top = _sup(f, w, u)
    status = np.where(top, GROWING, RESOLVED)
    vals = np.where(top, np.nan, vals)
    return Conjugate(f, u, vals, status, arg, u_inf, w)


@dataclass(frozen=True, eq=False)
class Biconjugate:
    """Second conjugate on the source grid, with its minorant report.

    ``excess`` is ``max (phi** - phi) / max(1, phi)``; ``max_rel_gap`` is the
    largest ``|phi** - phi| / phi`` over points whose slope lies inside the
    resolved part of the first conjugate.  ``convex_input`` records whether
    the source passed the convexity check, the case in which the gap must
    be small.
    """

    u: np.ndarray
    values: np.ndarray
    phi: np.ndarray
    excess: float
    minorant_holds: bool
    max_rel_gap: float
    convex_input: bool
    gap_holds: Optional[bool]
    conjugate: Conjugate

    def as_function(self) -> Table:
        keep = self.values > 0
        u, y = self.u[keep], self.values[keep]
        inc = np.concatenate([[True], np.diff(y) > 1e-10 * y[1:]])
        return Table(u[inc], y[inc])


def biconjugate(
    f: OrliczFunction, tol: ToleranceConfig = DEFAULT_TOL, minorant_tol: float = 1e-9, gap_tol: float = 1e-4
) -> Biconjugate:
    """Conjugate of the conjugate, evaluated at the grid points of ``f``.

    The outer supremum runs over the resolved dual grid and is refined by
    golden-section search, with the inner supremum recomputed exactly at
    every trial point.
    """
    conj = young_conjugate(f, tol)
    ok = conj.resolved
    v = conj.u[ok]
    cv = conj.values[ok]
    u = conj.w
    phi = f.value(u)

    def outer(uu):
        obj = uu[:, None] * v[None, :] - cv[None, :]
        k = np.argmax(obj, axis=1)
        best = obj[np.arange(uu.size), k]
        a = v[np.maximum(k - 1, 0)]
        b = v[np.minimum(k + 1, v.size - 1)]
        inner = lambda x: uu * x - conj.at(x)
        _, vr = golden_max(inner, a, b, iters=40)
        vr = np.where(np.isnan(vr), -np.inf, vr)
        return np.maximum(best, vr), k

    chunks = [outer(u[s : s + 256]) for s in range(0, u.size, 256)]
    vals = np.concatenate([c[0] for c in chunks])
    k = np.concatenate([c[1] for c in chunks])
    finite = np.isfinite(phi)
    excess = float(np.max((vals[finite] - phi[finite]) / np.maximum(1.0, phi[finite])))
    convex = convexity_check(f, Regime.all(), tol).holds
    # the slope at u must be strictly inside the resolved dual range
    interior = (k > 0) & (k < v.size - 1) & (u > 0) & finite
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = np.abs(vals - phi) / phi
    max_gap = float(np.max(gap[interior])) if interior.any() else math.nan
    return Biconjugate(
        u, vals, phi, excess, bool(excess <= minorant_tol), max_gap, convex,
        bool(max_gap <= gap_tol) if convex and interior.any() else None, conj,
    )


@dataclass(frozen=True)
class DualityReport:
    """Lower growth of order ``p`` for ``phi`` against upper growth of order ``p'`` for ``phi*``.

    ``dual_dilation`` is ``b = a**(p-1)`` for the witness dilation ``a`` of
    the lower-growth sweep; it is the dilation at which the conjugate
    inequality is tested in the classical argument.
    """

    p: float
    q: float
    primal: GrowthReport
    dual: GrowthReport
    agree: bool
    dual_dilation: float
    dual_span: tuple

    def as_dict(self):
        return {
            "p": self.p,
            "q": self.q,
            "primal": self.primal.as_dict(),
            "dual": self.dual.as_dict(),
            "agree": self.agree,
            "dual_dilation": self.dual_dilation,
            "dual_span": list(self.dual_span),
        }


def duality_transfer_check(f: OrliczFunction, p: float, tol: ToleranceConfig = DEFAULT_TOL) -> DualityReport:
    """Compare the primal and dual growth verdicts for a convex function.

    The conjugate sweep runs on the conjugate's resolved, finite domain.
    """
    if not p > 1:
        raise PreconditionError("duality transfer needs p > 1")
    if not convexity_check(f, Regime.all(), tol).holds:
        raise PreconditionError("duality transfer needs a convex function; conjugate a convex minorant first")
    q = p / (p - 1.0)
    primal = delta_star_p_best_constant(f, p, Regime.all(), tol)
    g = young_conjugate(f, tol).as_function()
    span = (float(g.u[0]), float(g.u[-1]))
    dual = delta_q_best_constant(g, q, Regime.all(), tol.with_span(*span))
    return DualityReport(
        float(p), float(q), primal, dual, primal.holds == dual.holds, float(primal.witness[0] ** (p - 1.0)), span
    )
