"""Envelope-integral regularization of functions with power-type growth.

Given upper growth of order ``q`` the construction takes the running
infimum ``r`` of ``phi(t)/t**q`` (from the cutoff ``v`` on; constant below
it) and sets ``psi(u) = int_0^u r(t) t**(q-1) dt``.  After the substitution
``x = t**q`` the integrand is non-increasing, so ``psi(u**(1/q))`` is
concave.  Lower growth of order ``p`` uses the running supremum of
``phi(t)/t**p`` instead and yields ``psi(u**(1/p))`` convex.

The envelope is interpolated piecewise power-law between grid nodes, like
any :class:`~orlicz_kit.functions.Table`, and each segment is integrated
exactly.  Segment averages of a monotone envelope are monotone, so the
shape property holds exactly on the output nodes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .functions import (
    DEFAULT_TOL,
    OrliczFunction,
    Regime,
    ShapeReport,
    SmallExtension,
    Table,
    ToleranceConfig,
    concavity_check,
    convexity_check,
    power_compose,
)
from .growth import delta_q_best_constant, delta_star_p_best_constant

__all__ = [
    "RegularizationReport",
    "Regularized",
    "regularize_concave_power",
    "regularize_convex_power",
    "extend_small_to_all",
    "power_envelope",
]

SLACK = 1e-9


@dataclass(frozen=True)
class RegularizationReport:
    """Checks performed on a regularized function.

    Attributes:
        mode: ``"concave"`` or ``"convex"``.
        exponent: the ``q`` (concave) or ``p`` (convex) used.
        precondition_holds: verdict of the growth sweep on the input.
        growth_constant: the constant ``K`` of that sweep.
        envelope_constant: ``max phi/(u**e r)`` (concave) or
            ``max u**e r/phi`` (convex) over nodes past the cutoff.
        shape: concavity/convexity check of ``psi(u**(1/e))``.
        envelope_monotone: ``r`` is monotone in the required direction.
        sandwich_holds: envelope lies between ``phi/u**e`` and its
            rescaling by the growth constant.
        lower_bound_ratio, upper_bound_ratio: worst value over the checked
            nodes of (lower bound / psi) and (psi / upper bound); at most 1
            means the bound holds.
        lower_bound_holds, upper_bound_holds: those ratios within slack.
    """

    mode: str
    exponent: float
    regime: Regime
    cutoff: float
    precondition_holds: bool
    growth_constant: float
    envelope_constant: float
    shape: ShapeReport
    envelope_monotone: bool
    sandwich_holds: bool
    lower_bound_ratio: float
    upper_bound_ratio: float
    lower_bound_holds: bool
    upper_bound_holds: bool

    @property
    def ok(self) -> bool:
        return self.shape.holds and self.lower_bound_holds and self.upper_bound_holds

    def as_dict(self):
        return {
            "mode": self.mode,
            "exponent": self.exponent,
            "regime": str(self.regime),
            "cutoff": self.cutoff,
            "precondition_holds": self.precondition_holds,
            "growth_constant": self.growth_constant,
            "envelope_constant": self.envelope_constant,
            "shape_holds": self.shape.holds,
            "shape_worst": self.shape.worst,
            "envelope_monotone": self.envelope_monotone,
            "sandwich_holds": self.sandwich_holds,
            "lower_bound_ratio": self.lower_bound_ratio,
            "upper_bound_ratio": self.upper_bound_ratio,
            "lower_bound_holds": self.lower_bound_holds,
            "upper_bound_holds": self.upper_bound_holds,
        }


@dataclass(frozen=True)
class Regularized:
    psi: Table
    envelope: np.ndarray
    source: OrliczFunction
    report: RegularizationReport


def extend_small_to_all(f: OrliczFunction, q: float, v: float, tol: ToleranceConfig = DEFAULT_TOL) -> SmallExtension:
    """Keep ``f`` on ``[0, v]`` and continue it as ``c u**q + (f(v) - c v**q)``.

    For non-convex ``f`` the constant is ``c = f(v)/v**q``, which makes the
    offset vanish.  For convex ``f``, ``c = f'_-(v)/(q v**(q-1))`` keeps the
    extension convex.
    """
    if not (q > 0 and v > 0):
        raise DomainError("extension needs q > 0 and v > 0")
    fv = float(f.value(v))
    if convexity_check(f, Regime.small(v), tol).holds and q >= 1:
        c = f.left_derivative(v) / (q * v ** (q - 1.0))
    else:
        c = fv / v ** q
    return SmallExtension(f, float(q), float(v), float(c))


def _segment_integrals(u, r, e):
    """Exact ``int r(t) t**(e-1) dt`` over each segment, ``r`` power-law between nodes."""
    lu = np.log(u)
    du = np.diff(lu)
    beta = np.diff(np.log(r)) / du
    gamma = beta + e
    z = gamma * du
    # (rho**gamma - 1)/gamma written as du * expm1(z)/z, safe near z = 0
    with np.errstate(invalid="ignore", divide="ignore"):
        factor = np.where(np.abs(z) > 1e-12, np.expm1(z) / np.where(z == 0, 1.0, z), 1.0 + 0.5 * z)
    return r[:-1] * u[:-1] ** e * du * factor


def power_envelope(f: OrliczFunction, e: float, u: np.ndarray, v: float, kind: str) -> np.ndarray:
    """Running infimum (``kind="inf"``) or supremum of ``f(t)/t**e`` from ``v``; constant below."""
    g = np.exp(f.log_value(np.log(u)) - e * np.log(u))
    start = int(np.searchsorted(u, v)) if v > 0 else 0
    acc = np.minimum.accumulate if kind == "inf" else np.maximum.accumulate
    r = np.empty_like(g)
    r[start:] = acc(g[start:])
    r[:start] = g[start]
    return r


def _grid_with_cutoff(regime: Regime, tol: ToleranceConfig):
    lo, hi = tol.grid_span
    u = np.exp(np.linspace(math.log(lo), math.log(hi), tol.grid_points))
    v = regime.cutoff if regime.mode == "large" else 0.0
    if v > 0:
        if not lo < v < hi:
            raise DomainError(f"cutoff {v} must lie inside the grid span")
        u = np.union1d(u, [v])
    return u, v


def _regularize(f, e, regime, tol, mode):
    if not e > 0:
        raise DomainError("exponent must be positive")
    source = f
    requested = regime
    if regime.mode == "small":
        v_small = regime.cutoff
        source = extend_small_to_all(f, e, v_small, tol)
        regime = Regime.all()
    concave = mode == "concave"
    sweep = delta_q_best_constant if concave else delta_star_p_best_constant
    growth = sweep(source, e, regime, tol)
    if not growth.holds:
        warnings.warn(
            f"{'upper' if concave else 'lower'} growth of order {e} looks violated "
            f"(stability {growth.stability:.3g}); the construction runs anyway",
            RuntimeWarning,
            stacklevel=3,
        )
    u, v = _grid_with_cutoff(regime, tol)
    r = power_envelope(source, e, u, v, "inf" if concave else "sup")
    seg = _segment_integrals(u, r, e)
    ly = source.log_value(np.log(u[[0, 1, -2, -1]]))
    lu = np.log(u[[0, 1, -2, -1]])
    k0 = float((ly[1] - ly[0]) / (lu[1] - lu[0]))
    k1 = float((ly[3] - ly[2]) / (lu[3] - lu[2]))
    # below the grid phi is continued with its bottom chord exponent k0; when
    # phi/t**e is then monotone the right way, r tracks it and psi(u0) = phi(u0)/k0
    tracks_low = v == 0 and (k0 <= e if concave else k0 >= e)
    if tracks_low:
        start, low_tail = float(source.value(u[0])) / k0, k0
    else:
        start, low_tail = r[0] * u[0] ** e / e, e
    psi = np.concatenate([[start], start + np.cumsum(seg)])
    if not np.all(np.isfinite(psi)):
        raise DomainError("quadrature of the envelope is not finite")
    g_top = float(np.exp(ly[3] - e * lu[3]))
    tracks_high = abs(r[-1] - g_top) <= 1e-12 * g_top
    high_tail = (min(k1, e) if concave else max(k1, e)) if tracks_high else e
    table = Table(u, psi, (low_tail, high_tail))

    composed = power_compose(table, e)
    shape = (concavity_check if concave else convexity_check)(composed, Regime.all(), tol)

    phi = source.value(u)
    g = phi / u ** e
    past = u >= v
    K = growth.constant
    if concave:
        monotone = bool(np.all(np.diff(r) <= 0))
        env_k = float(np.max(g[past] / r[past]))
        sandwich = bool(np.all(g[past] / K <= r[past] * (1 + SLACK)) and np.all(r[past] <= g[past] * (1 + SLACK)))
        low_mask = u >= 2 * v
        lower = (1.0 / e) * (1 - 2.0 ** -e) * phi / K
        upper = (2.0 / e) * phi
    else:
        monotone = bool(np.all(np.diff(r) >= 0))
        env_k = float(np.max(r[past] / g[past]))
        sandwich = bool(np.all(g[past] <= r[past] * (1 + SLACK)) and np.all(r[past] <= g[past] / K * (1 + SLACK)))
        low_mask = (u >= 2 * v) & (u / 2 >= u[0])
        lower = source.value(u / 2) * (2.0 ** e - 1) / e
        upper = phi / (e * K ** 2)
    lo_ratio = float(np.max(lower[low_mask] / psi[low_mask]))
    hi_ratio = float(np.max(psi[past] / upper[past]))
    report = RegularizationReport(
        mode, float(e), requested, float(v), growth.holds, float(K), env_k, shape, monotone, sandwich,
        lo_ratio, hi_ratio, lo_ratio <= 1 + SLACK, hi_ratio <= 1 + SLACK,
    )
    return Regularized(table, r, source, report)


def regularize_concave_power(
    f: OrliczFunction, q: float, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL
) -> Regularized:
    """Equivalent function ``psi`` with ``psi(u**(1/q))`` concave.

    The report checks ``psi >= (1/q)(1 - 2**-q) phi / K`` for ``u >= 2v`` and
    ``psi <= (2/q) phi`` for ``u >= v``.  The second bound is not implied by
    upper growth alone (``phi(u) = u`` with ``q = 3`` gives ``psi ~ u``), so it
    is reported rather than enforced.  Small-argument regimes are first
    extended to all arguments with :func:`extend_small_to_all`.
    """
    return _regularize(f, q, regime, tol, "concave")


def regularize_convex_power(
    f: OrliczFunction, p: float, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL
) -> Regularized:
    """Equivalent function ``psi`` with ``psi(u**(1/p))`` convex.

    The report checks ``psi(u) >= phi(u/2)(2**p - 1)/p`` for ``u >= 2v`` and
    ``psi(u) <= phi(u)/(p K**2)`` for ``u >= v``.
    """
    return _regularize(f, p, regime, tol, "convex")
