"""Best constants for doubling-type growth conditions and index estimates.

Three conditions are handled, each over a :class:`~orlicz_kit.functions.Regime`:

* doubling: ``phi(2u) <= K phi(u)``;
* upper power growth of order ``q``: ``phi(a u) <= K a**q phi(u)`` for ``a >= 1``;
* lower power growth of order ``p``: ``phi(a u) >= K a**p phi(u)`` for ``a >= 1``.

Constants are exact optima over all pairs of grid points.  Writing
``g = log phi - q log u`` on the grid, the upper constant is
``max_{i <= j} exp(g_j - g_i)``, which a single running-minimum pass
computes in linear time; the lower constant is the mirror image.
Whether a condition "holds" is decided heuristically by recomputing on a
grid twice as wide and twice as dense and asking that the constant move by
at most 5%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .functions import DEFAULT_TOL, OrliczFunction, Regime, ToleranceConfig, regime_log_grid

__all__ = [
    "GrowthReport",
    "IndexEstimate",
    "delta_q_best_constant",
    "delta_star_p_best_constant",
    "delta2_check",
    "estimate_indices",
    "delta2_equivalence_suite",
    "STABILITY_LIMIT",
]

STABILITY_LIMIT = 1.05


@dataclass(frozen=True)
class GrowthReport:
    """Outcome of one growth-condition sweep.

    Attributes:
        condition: ``"delta2"``, ``"delta_q"`` or ``"delta_star_p"``.
        exponent: the ``q`` or ``p`` tested (2 for doubling, as a dilation).
        regime: argument range swept.
        constant: best constant on the base grid; may be ``inf`` (or 0 for
            lower growth) when it overflows.
        log_constant: its logarithm, always finite for finite grids.
        witness: ``(a, u)`` attaining the constant.
        wide_log_constant: same quantity on the wide nested grid.
        stability: ``exp|log K_wide - log K_base|``.
        holds: ``stability <= 1.05``.
    """

    condition: str
    exponent: float
    regime: Regime
    constant: float
    log_constant: float
    witness: Tuple[float, float]
    wide_log_constant: float
    stability: float
    holds: bool

    def as_dict(self):
        return {
            "condition": self.condition,
            "exponent": self.exponent,
            "regime": str(self.regime),
            "constant": self.constant,
            "log_constant": self.log_constant,
            "witness": {"a": self.witness[0], "u": self.witness[1]},
            "stability": self.stability,
            "holds": self.holds,
        }


def _upper_pairs(x, g):
    """``max_{i <= j} g_j - g_i`` with its arg pair."""
    running = np.minimum.accumulate(g)
    gap = g - running
    j = int(np.argmax(gap))
    i = int(np.argmin(g[: j + 1]))
    return float(gap[j]), i, j


def _lower_pairs(x, g):
    """``min_{i <= j} g_j - g_i`` with its arg pair."""
    running = np.maximum.accumulate(g)
    gap = g - running
    j = int(np.argmin(gap))
    i = int(np.argmax(g[: j + 1]))
    return float(gap[j]), i, j


def _report(condition, exponent, regime, base, wide, x_base):
    logk, i, j = base
    wlogk = wide[0]
    drift = abs(wlogk - logk)
    stability = math.exp(drift) if drift < 700 else math.inf
    with np.errstate(over="ignore"):
        constant = float(np.exp(logk))
    witness = (float(math.exp(x_base[j] - x_base[i])), float(math.exp(x_base[i])))
    return GrowthReport(
        condition, float(exponent), regime, constant, float(logk), witness, float(wlogk),
        stability, bool(np.isfinite(logk) and stability <= STABILITY_LIMIT),
    )


def _power_growth(f, e, regime, tol, upper):
    sweep = _upper_pairs if upper else _lower_pairs
    out = []
    for wide in (False, True):
        x = regime_log_grid(regime, tol, wide)
        g = f.log_value(x) - e * x
        out.append((x, sweep(x, g)))
    name = "delta_q" if upper else "delta_star_p"
    return _report(name, e, regime, out[0][1], out[1][1], out[0][0])


def delta_q_best_constant(
    f: OrliczFunction, q: float, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL
) -> GrowthReport:
    """Best ``K >= 1`` with ``phi(a u) <= K a**q phi(u)`` over grid pairs in the regime."""
    if not q > 0:
        raise ValueError("q must be positive")
    return _power_growth(f, q, regime, tol, upper=True)


def delta_star_p_best_constant(
    f: OrliczFunction, p: float, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL
) -> GrowthReport:
    """Best ``0 < K <= 1`` with ``phi(a u) >= K a**p phi(u)`` over grid pairs in the regime."""
    if not p > 0:
        raise ValueError("p must be positive")
    return _power_growth(f, p, regime, tol, upper=False)


def delta2_check(f: OrliczFunction, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL) -> GrowthReport:
    """Best ``K`` with ``phi(2u) <= K phi(u)`` on the regime grid."""
    ln2 = math.log(2.0)
    out = []
    for wide in (False, True):
        x = regime_log_grid(regime, tol, wide)
        if regime.mode == "small":
            x = x[x + ln2 <= math.log(regime.cutoff) + 1e-15]
        # at least one admissible point: fall back to the lowest one
        if x.size == 0:
            x = regime_log_grid(regime, tol, wide)[:1]
        r = f.log_value(x + ln2) - f.log_value(x)
        k = int(np.argmax(r))
        out.append((x, float(r[k]), k))
    (xb, lb, kb), (_, lw, _) = out
    drift = abs(lw - lb)
    stability = math.exp(drift) if drift < 700 else math.inf
    with np.errstate(over="ignore"):
        constant = float(np.exp(lb))
    return GrowthReport(
        "delta2", 2.0, regime, constant, lb, (2.0, float(math.exp(xb[kb]))), lw,
        stability, bool(np.isfinite(lb) and stability <= STABILITY_LIMIT),
    )


@dataclass(frozen=True)
class IndexEstimate:
    """Bounds and estimates for the lower and upper indices.

    ``chord_min``/``chord_max`` are the extreme chord exponents
    ``log(phi(w)/phi(u)) / log(w/u)`` over grid pairs: a uniform chord
    exponent ``p`` certifies lower growth of order ``p`` with ``K = 1``, so
    they bracket the indices.  ``alpha_hat``/``beta_hat`` use a single large
    dilation ``A``.
    """

    chord_min: float
    chord_max: float
    alpha_hat: float
    beta_hat: float
    dilation: float
    regime: Regime
    wide_chord_min: float = field(default=math.nan)
    wide_chord_max: float = field(default=math.nan)

    def as_dict(self):
        return {
            "chord_min": self.chord_min,
            "chord_max": self.chord_max,
            "alpha_hat": self.alpha_hat,
            "beta_hat": self.beta_hat,
            "dilation": self.dilation,
            "regime": str(self.regime),
        }


def _chords(f, x):
    y = f.log_value(x)
    s = np.diff(y) / np.diff(x)
    return float(np.min(s)), float(np.max(s)), y


def estimate_indices(f: OrliczFunction, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL) -> IndexEstimate:
    """Chord-exponent bounds and large-dilation estimates of the indices.

    The extreme chord exponent over all pairs is attained by adjacent grid
    points (every chord exponent is an average of adjacent ones).  The
    dilation estimates use ``A`` equal to the square root of the grid's
    span ratio, so that half of the grid can serve as base points.
    """
    x = regime_log_grid(regime, tol)
    cmin, cmax, y = _chords(f, x)
    k = (x.size - 1) // 2
    loga = x[k] - x[0]
    ratio = (y[k:] - y[: x.size - k]) / loga
    wmin, wmax, _ = _chords(f, regime_log_grid(regime, tol, wide=True))
    return IndexEstimate(
        cmin, cmax, float(np.min(ratio)), float(np.max(ratio)), float(math.exp(loga)), regime, wmin, wmax
    )


@dataclass(frozen=True)
class EquivalenceSuite:
    """Three ways of asking whether the doubling condition holds."""

    delta2: GrowthReport
    delta_q: GrowthReport
    chord_max: float
    chord_max_stable: bool
    consistent: bool
    diagnostics: Tuple[str, ...]

    @property
    def verdicts(self):
        return (self.delta2.holds, self.delta_q.holds, self.chord_max_stable)

    def as_dict(self):
        return {
            "delta2": self.delta2.as_dict(),
            "delta_q": self.delta_q.as_dict(),
            "chord_max": self.chord_max,
            "chord_max_stable": self.chord_max_stable,
            "consistent": self.consistent,
            "diagnostics": list(self.diagnostics),
        }


def delta2_equivalence_suite(
    f: OrliczFunction, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL
) -> EquivalenceSuite:
    """Cross-check doubling, upper power growth and a finite upper chord exponent.

    Mathematically the three are equivalent; on a finite grid they can
    disagree, which is reported in ``diagnostics`` rather than raised.
    """
    d2 = delta2_check(f, regime, tol)
    idx = estimate_indices(f, regime, tol)
    dq = delta_q_best_constant(f, idx.chord_max + 1.0, regime, tol)
    cm, wcm = idx.chord_max, idx.wide_chord_max
    stable = bool(np.isfinite(cm) and np.isfinite(wcm) and wcm <= STABILITY_LIMIT * cm + 1e-12)
    verdicts = {"delta2": d2.holds, "delta_q": dq.holds, "chord_max": stable}
    consistent = len(set(verdicts.values())) == 1
    diagnostics = ()
    if not consistent:
        diagnostics = tuple(f"{k} {'holds' if v else 'fails'}" for k, v in verdicts.items())
    return EquivalenceSuite(d2, dq, cm, stable, consistent, diagnostics)
