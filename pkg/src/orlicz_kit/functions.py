"""Orlicz functions: representation, evaluation, inversion and shape tests.

Every function works internally in log-log coordinates through
``log_value``, which maps ``log u`` to ``log phi(u)``.  That keeps growth
sweeps over very wide grids (and functions such as ``exp(u) - 1``) free of
overflow; ``value`` is the ordinary pointwise evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ._numeric import bisect_increasing, expand_bracket
from .exceptions import DomainError, IndexZeroError

__all__ = [
    "OrliczFunction",
    "Power",
    "MaxPowers",
    "MinPowers",
    "LogPerturbedPower",
    "ExpMinusOne",
    "Table",
    "PowerComposed",
    "SmallExtension",
    "Regime",
    "ToleranceConfig",
    "ShapeReport",
    "Equivalence",
    "evaluate",
    "inverse",
    "log_inverse",
    "power_compose",
    "convexity_check",
    "concavity_check",
    "equivalence_check",
    "halving_constant",
    "function_from_spec",
    "regime_grid",
]

# Relative increase required between adjacent table values.
STRICTNESS = 1e-10


class OrliczFunction:
    """Strictly increasing continuous function on ``[0, inf)`` with ``phi(0) = 0``.

    Subclasses implement ``log_value``; most also override ``_value_pos``
    with a direct formula for accuracy.
    """

    kind = "abstract"

    def log_value(self, logu):
        raise NotImplementedError

    def _value_pos(self, u):
        return np.exp(self.log_value(np.log(u)))

    def value(self, u):
        """Evaluate ``phi`` pointwise; accepts scalars or arrays."""
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        pos = u > 0
        if np.any(pos):
            with np.errstate(over="ignore"):
                out[pos] = self._value_pos(u[pos])
        if out.ndim == 0:
            return float(out)
        return out

    __call__ = value

    def log_at(self, u):
        """``log phi(u)`` for positive ``u``."""
        return self.log_value(np.log(np.asarray(u, dtype=float)))

    def left_derivative(self, u):
        """One-sided derivative from the left; backward difference by default."""
        h = u * 1e-6
        return float((self.value(u) - self.value(u - h)) / h)

    def to_spec(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_spec()})"


def _check_exponent(name, x):
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"{name} must be a positive finite number, got {x!r}")


@dataclass(frozen=True, repr=False)
class Power(OrliczFunction):
    """``u**p``."""

    p: float
    kind = "power"

    def __post_init__(self):
        _check_exponent("p", self.p)

    def log_value(self, logu):
        return self.p * np.asarray(logu, dtype=float)

    def _value_pos(self, u):
        return u ** self.p

    def left_derivative(self, u):
        return self.p * u ** (self.p - 1.0)

    def to_spec(self):
        return {"kind": self.kind, "p": self.p}


@dataclass(frozen=True, repr=False)
class MaxPowers(OrliczFunction):
    """``max(u**p, u**q)``."""

    p: float
    q: float
    kind = "max_powers"

    def __post_init__(self):
        _check_exponent("p", self.p)
        _check_exponent("q", self.q)

    def log_value(self, logu):
        x = np.asarray(logu, dtype=float)
        return np.maximum(self.p * x, self.q * x)

    def _value_pos(self, u):
        return np.maximum(u ** self.p, u ** self.q)

    def left_derivative(self, u):
        # the branch active just left of u
        lo, hi = sorted((self.p, self.q))
        e = lo if u <= 1.0 else hi
        return e * u ** (e - 1.0)

    def to_spec(self):
        return {"kind": self.kind, "p": self.p, "q": self.q}


@dataclass(frozen=True, repr=False)
class MinPowers(OrliczFunction):
    """``min(u**p, u**q)``."""

    p: float
    q: float
    kind = "min_powers"

    def __post_init__(self):
        _check_exponent("p", self.p)
        _check_exponent("q", self.q)

    def log_value(self, logu):
        x = np.asarray(logu, dtype=float)
        return np.minimum(self.p * x, self.q * x)

    def _value_pos(self, u):
        return np.minimum(u ** self.p, u ** self.q)

    def left_derivative(self, u):
        lo, hi = sorted((self.p, self.q))
        e = hi if u <= 1.0 else lo
        return e * u ** (e - 1.0)

    def to_spec(self):
        return {"kind": self.kind, "p": self.p, "q": self.q}


@dataclass(frozen=True, repr=False)
class LogPerturbedPower(OrliczFunction):
    """``u**q / |ln u|`` on ``(0, 1/e]``, ``(1/q + 1) u**q - e**-q / q`` beyond.

    Has upper index ``q`` for small arguments without satisfying the
    ``q``-growth condition there.
    """

    q: float
    kind = "log_perturbed_power"

    def __post_init__(self):
        _check_exponent("q", self.q)

    def log_value(self, logu):
        x = np.asarray(logu, dtype=float)
        q = self.q
        small = x <= -1.0
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            low = q * x - np.log(np.abs(x))
            high = q * x + np.log((1.0 / q + 1.0) - np.exp(-q * (1.0 + x)) / q)
        return np.where(small, low, high)

    def _value_pos(self, u):
        q = self.q
        with np.errstate(divide="ignore", invalid="ignore"):
            low = u ** q / np.abs(np.log(u))
        high = (1.0 / q + 1.0) * u ** q - math.exp(-q) / q
        return np.where(u <= math.exp(-1.0), low, high)

    def left_derivative(self, u):
        q = self.q
        if u <= math.exp(-1.0):
            lg = -math.log(u)
            return u ** (q - 1.0) * (q / lg + 1.0 / lg ** 2)
        return (q + 1.0) * u ** (q - 1.0)

    def to_spec(self):
        return {"kind": self.kind, "q": self.q}


@dataclass(frozen=True, repr=False)
class ExpMinusOne(OrliczFunction):
    """``exp(u) - 1``; fails the doubling condition for large arguments."""

    kind = "exp_minus_one"

    def log_value(self, logu):
        x = np.asarray(logu, dtype=float)
        with np.errstate(over="ignore"):
            u = np.exp(x)
        big = u > 1.0
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            a = u + np.log1p(-np.exp(-u))
            b = np.log(np.expm1(np.where(big, 1.0, u)))
        return np.where(big, a, b)

    def _value_pos(self, u):
        return np.expm1(u)

    def left_derivative(self, u):
        return math.exp(u)

    def to_spec(self):
        return {"kind": self.kind}


@dataclass(frozen=True, eq=False, repr=False)
class Table(OrliczFunction):
    """Tabulated function, interpolated piecewise power-law in log-log space.

    Outside ``[u[0], u[-1]]`` the function follows power tails with the given
    exponents; by default these are the boundary chord exponents.
    """

    u: np.ndarray
    phi: np.ndarray
    tail_exponents: Tuple[float, float] = field(default=None)
    kind = "table"

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        if u.ndim != 1 or u.shape != phi.shape or u.size < 2:
            raise DomainError("table needs matching 1-d arrays with at least two nodes")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(phi))):
            raise DomainError("table nodes and values must be finite")
        if u[0] <= 0 or np.any(np.diff(u) <= 0):
            raise DomainError("table abscissae must be positive and strictly increasing")
        if phi[0] <= 0 or np.any(np.diff(phi) <= STRICTNESS * phi[1:]):
            raise DomainError("table values must be positive and strictly increasing")
        lu, lp = np.log(u), np.log(phi)
        tails = self.tail_exponents
        if tails is None:
            tails = ((lp[1] - lp[0]) / (lu[1] - lu[0]), (lp[-1] - lp[-2]) / (lu[-1] - lu[-2]))
        tails = (float(tails[0]), float(tails[1]))
        if not (tails[0] > 0 and tails[1] > 0):
            raise DomainError("tail exponents must be positive")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "tail_exponents", tails)
        object.__setattr__(self, "_lu", lu)
        object.__setattr__(self, "_lp", lp)

    @classmethod
    def from_function(cls, f: OrliczFunction, u) -> "Table":
        u = np.asarray(u, dtype=float)
        return cls(u, f.value(u))

    def log_value(self, logu):
        x = np.asarray(logu, dtype=float)
        lu, lp = self._lu, self._lp
        k0, k1 = self.tail_exponents
        out = np.interp(x, lu, lp)
        out = np.where(x < lu[0], lp[0] + k0 * (x - lu[0]), out)
        out = np.where(x > lu[-1], lp[-1] + k1 * (x - lu[-1]), out)
        return out

    def to_spec(self):
        return {
            "kind": self.kind,
            "u": self.u.tolist(),
            "phi": self.phi.tolist(),
            "tail_exponents": list(self.tail_exponents),
        }

    def __eq__(self, other):
        return (
            isinstance(other, Table)
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.phi, other.phi)
            and self.tail_exponents == other.tail_exponents
        )

    __hash__ = None


@dataclass(frozen=True, repr=False)
class PowerComposed(OrliczFunction):
    """``u -> base(u**(1/s))`` for kinds without a closed-form composition."""

    base: OrliczFunction
    s: float
    kind = "power_compose"

    def __post_init__(self):
        _check_exponent("s", self.s)

    def log_value(self, logu):
        return self.base.log_value(np.asarray(logu, dtype=float) / self.s)

    def _value_pos(self, u):
        with np.errstate(over="ignore"):
            return self.base.value(np.exp(np.log(u) / self.s))

    def to_spec(self):
        return {"kind": self.kind, "base": self.base.to_spec(), "s": self.s}


@dataclass(frozen=True, repr=False)
class SmallExtension(OrliczFunction):
    """``base`` on ``[0, v]`` and ``c u**q + (base(v) - c v**q)`` beyond ``v``."""

    base: OrliczFunction
    q: float
    v: float
    c: float
    kind = "small_extension"

    def __post_init__(self):
        _check_exponent("q", self.q)
        _check_exponent("v", self.v)
        _check_exponent("c", self.c)

    @property
    def offset(self) -> float:
        return float(self.base.value(self.v)) - self.c * self.v ** self.q

    def log_value(self, logu):
        x = np.asarray(logu, dtype=float)
        lv = math.log(self.v)
        inner = self.base.log_value(np.minimum(x, lv))
        fv = float(self.base.value(self.v))
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            outer = self.q * x + math.log(self.c) + np.log1p(self.offset / (self.c * np.exp(self.q * x)))
        if self.offset == 0.0:
            outer = math.log(fv) + self.q * (x - lv)
        return np.where(x <= lv, inner, outer)

    def _value_pos(self, u):
        inner = self.base.value(np.minimum(u, self.v))
        outer = self.c * u ** self.q + self.offset
        return np.where(u <= self.v, inner, outer)

    def left_derivative(self, u):
        if u <= self.v:
            return self.base.left_derivative(u)
        return self.c * self.q * u ** (self.q - 1.0)

    def to_spec(self):
        return {"kind": self.kind, "base": self.base.to_spec(), "q": self.q, "v": self.v, "c": self.c}


# --------------------------------------------------------------------------
# regimes and grids


_MODES = ("all", "large", "small")


@dataclass(frozen=True)
class Regime:
    """Argument range a growth condition refers to.

    ``large`` means ``u >= cutoff``; ``small`` means ``u <= cutoff``.  The
    cutoff is ignored for ``all``.  By convention all/large/small arguments
    go with infinite non-atomic, finite non-atomic and counting measures;
    that pairing is documented, not enforced.
    """

    mode: str = "all"
    cutoff: float = 0.0

    def __post_init__(self):
        if self.mode not in _MODES:
            raise DomainError(f"regime mode must be one of {_MODES}, got {self.mode!r}")
        if self.mode == "small" and not self.cutoff > 0:
            raise DomainError("small-argument regime needs a positive cutoff")
        if self.mode == "large" and not self.cutoff >= 0:
            raise DomainError("large-argument regime needs a nonnegative cutoff")

    @classmethod
    def all(cls):
        return cls("all", 0.0)

    @classmethod
    def large(cls, v):
        return cls("large", float(v))

    @classmethod
    def small(cls, v):
        return cls("small", float(v))

    @classmethod
    def parse(cls, text: str) -> "Regime":
        """Parse ``all``, ``large:V`` or ``small:V``."""
        mode, _, v = text.strip().lower().partition(":")
        if mode == "all":
            return cls.all()
        if not v:
            raise DomainError(f"regime {text!r} needs a cutoff, e.g. {mode}:1")
        return cls(mode, float(v))

    def contains(self, u):
        u = np.asarray(u, dtype=float)
        if self.mode == "large":
            return u >= self.cutoff
        if self.mode == "small":
            return (u > 0) & (u <= self.cutoff)
        return u >= 0

    def __str__(self):
        return "all" if self.mode == "all" else f"{self.mode}:{self.cutoff:g}"


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical knobs shared by the sweeps."""

    rel_tol: float = 1e-10
    curvature_tol: float = 1e-7
    grid_points: int = 2048
    grid_span: Tuple[float, float] = (1e-8, 1e8)

    def __post_init__(self):
        lo, hi = self.grid_span
        if not (self.rel_tol > 0 and self.curvature_tol > 0 and self.grid_points > 2):
            raise DomainError("tolerances and grid size must be strictly positive")
        if not (0 < lo < hi):
            raise DomainError("grid span must satisfy 0 < lo < hi")

    def with_span(self, lo, hi) -> "ToleranceConfig":
        return ToleranceConfig(self.rel_tol, self.curvature_tol, self.grid_points, (float(lo), float(hi)))

    def as_dict(self):
        return {
            "rel_tol": self.rel_tol,
            "curvature_tol": self.curvature_tol,
            "grid_points": self.grid_points,
            "grid_span": list(self.grid_span),
        }


DEFAULT_TOL = ToleranceConfig()


def regime_log_span(regime: Regime, tol: ToleranceConfig):
    lo, hi = (math.log(x) for x in tol.grid_span)
    if regime.mode == "large" and regime.cutoff > 0:
        lo = max(lo, math.log(regime.cutoff))
        if lo >= hi:
            raise DomainError(f"large-argument cutoff {regime.cutoff} is beyond the grid span")
    elif regime.mode == "small":
        hi = math.log(regime.cutoff)
        if hi <= lo:
            raise DomainError(f"small-argument cutoff {regime.cutoff} is below the grid span")
    return lo, hi


def regime_log_grid(regime: Regime, tol: ToleranceConfig = DEFAULT_TOL, wide: bool = False):
    """Log-spaced grid (in log coordinates) covering the regime.

    The wide grid doubles the log-width and halves the spacing, so it
    contains the base grid.  It grows away from any fixed cutoff: downward
    for small arguments, upward for large ones, both ways otherwise.
    """
    lo, hi = regime_log_span(regime, tol)
    n = tol.grid_points
    if not wide:
        return np.linspace(lo, hi, n)
    w = hi - lo
    if regime.mode == "small":
        lo -= w
    elif regime.mode == "large" and regime.cutoff > 0 and math.log(regime.cutoff) >= math.log(tol.grid_span[0]):
        hi += w
    else:
        lo, hi = lo - w / 2, hi + w / 2
    return np.linspace(lo, hi, 4 * n - 3)


def regime_grid(regime: Regime, tol: ToleranceConfig = DEFAULT_TOL, wide: bool = False):
    """Same as :func:`regime_log_grid` but in natural coordinates."""
    x = regime_log_grid(regime, tol, wide)
    u = np.exp(x)
    if regime.mode == "small" and not wide:
        u[-1] = regime.cutoff
    return u


# --------------------------------------------------------------------------
# operations


def evaluate(f: OrliczFunction, u):
    """``phi(u)`` for ``u >= 0``; raises :class:`DomainError` on non-finite output."""
    arr = np.asarray(u, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError("Orlicz functions are evaluated at nonnegative arguments")
    out = f.value(arr)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{f.kind} value is not representable at u={u!r}")
    return out


def inverse(f: OrliczFunction, y, rel_tol: float = DEFAULT_TOL.rel_tol):
    """Inverse function by monotone bisection in log coordinates.

    The bracket is found by geometric expansion around ``u = 1``.  Works on
    scalars and arrays; ``inverse(f, 0) == 0``.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(~(y_arr >= 0)):
        raise DomainError("inverse is defined for nonnegative values")
    out = np.zeros(y_arr.shape)
    pos = y_arr > 0
    if np.any(pos):
        out[pos] = np.exp(log_inverse(f, np.log(y_arr[pos])))
    if out.ndim == 0:
        return float(out)
    return out


def log_inverse(f: OrliczFunction, logy):
    """``log`` of the inverse function at ``exp(logy)``; overflow-free variant of :func:`inverse`."""
    target = np.asarray(logy, dtype=float)
    lo, hi = expand_bracket(f.log_value, target)
    return bisect_increasing(f.log_value, target, lo, hi)


def power_compose(f: OrliczFunction, s: float) -> OrliczFunction:
    """Return ``u -> f(u**(1/s))``, in closed form when the kind allows it."""
    _check_exponent("s", s)
    if s == 1:
        return f
    if isinstance(f, Power):
        return Power(f.p / s)
    if isinstance(f, MaxPowers):
        return MaxPowers(f.p / s, f.q / s)
    if isinstance(f, MinPowers):
        return MinPowers(f.p / s, f.q / s)
    if isinstance(f, Table):
        k0, k1 = f.tail_exponents
        return Table(f.u ** s, f.phi, (k0 / s, k1 / s))
    if isinstance(f, PowerComposed):
        return power_compose(f.base, f.s * s)
    return PowerComposed(f, float(s))


@dataclass(frozen=True)
class ShapeReport:
    """Outcome of a convexity or concavity sweep.

    ``worst`` is the most adverse normalized change in slope (negative for a
    convexity violation, positive for a concavity violation) and ``witness``
    the abscissa where it occurs.
    """

    shape: str
    holds: bool
    worst: float
    witness: float
    points: int


def _shape_grid(f: OrliczFunction, regime: Regime, tol: ToleranceConfig):
    if isinstance(f, Table):
        # data lives on the nodes; the interpolant between them is not data
        u = f.u[regime.contains(f.u)]
        if u.size >= 3:
            return u
    return regime_grid(regime, tol)


def _slope_changes(f, regime, tol):
    u = _shape_grid(f, regime, tol)
    y = f.value(u)
    # overflowed values carry no shape information
    finite = np.isfinite(y)
    u, y = u[finite], y[finite]
    s = np.diff(y) / np.diff(u)
    d = np.diff(s)
    scale = np.maximum(np.abs(s[:-1]), np.abs(s[1:]))
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, d / scale, 0.0)
    return u, rel


def convexity_check(f: OrliczFunction, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL) -> ShapeReport:
    """Convexity via normalized slope increments on the regime grid."""
    u, rel = _slope_changes(f, regime, tol)
    i = int(np.argmin(rel))
    return ShapeReport("convex", bool(rel[i] >= -tol.curvature_tol), float(rel[i]), float(u[i + 1]), u.size)


def concavity_check(f: OrliczFunction, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL) -> ShapeReport:
    """Mirror of :func:`convexity_check`."""
    u, rel = _slope_changes(f, regime, tol)
    i = int(np.argmax(rel))
    return ShapeReport("concave", bool(rel[i] <= tol.curvature_tol), float(rel[i]), float(u[i + 1]), u.size)


@dataclass(frozen=True)
class Equivalence:
    """Constants with ``g(u/K2)/K1 <= f(u) <= K1 g(K2 u)`` on the searched grids."""

    K1: float
    K2: float
    base_product: float
    wide_product: float


_K_MAX = 1e6
# K2 candidates 2**(k/8), which hit 1, sqrt(2) and 2 exactly
_K2_GRID = np.append(2.0 ** (np.arange(0, 160) / 8.0), _K_MAX)


def _best_constants(f, g, x):
    lf = f.log_value(x)
    best = None
    for k2 in _K2_GRID:
        lk = math.log(k2)
        left = np.max(g.log_value(x - lk) - lf)
        right = np.max(lf - g.log_value(x + lk))
        lk1 = max(0.0, left, right)
        if not np.isfinite(lk1) or lk1 > math.log(_K_MAX) + 1e-12:
            continue
        k1 = math.exp(float(lk1))
        k2 = float(k2)
        if best is None or k1 * k2 < best[0] * best[1] * (1 - 1e-12):
            best = (k1, k2)
    return best


def equivalence_check(
    f: OrliczFunction,
    g: OrliczFunction,
    regime: Regime = Regime(),
    tol: ToleranceConfig = DEFAULT_TOL,
) -> Optional[Equivalence]:
    """Smallest ``(K1, K2)`` in ``[1, 1e6]**2`` (by product) making ``f`` and ``g`` equivalent.

    ``K2`` runs over a log grid and ``K1`` is then the exact minimum.  The
    search is repeated on the wide nested grid; constants that must grow by
    more than 5% there are treated as diverging and ``None`` is returned.
    """
    base = _best_constants(f, g, regime_log_grid(regime, tol))
    if base is None:
        return None
    wide = _best_constants(f, g, regime_log_grid(regime, tol, wide=True))
    if wide is None:
        return None
    pb, pw = base[0] * base[1], wide[0] * wide[1]
    if pw > 1.05 * pb:
        return None
    return Equivalence(wide[0], wide[1], float(pb), float(pw))


def halving_constant(f: OrliczFunction, regime: Regime = Regime(), tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Smallest ``K >= 1`` with ``f(u/K) <= f(u)/2`` at every grid point.

    Raises :class:`IndexZeroError` if even ``K = 1e6`` does not halve.
    """
    x = regime_log_grid(regime, tol)
    target = f.log_value(x) - math.log(2.0)

    def excess(logk):
        return np.array([np.max(f.log_value(x - lk) - target) for lk in np.atleast_1d(logk)])

    top = math.log(_K_MAX)
    if excess(top)[0] > 0:
        raise IndexZeroError("no halving constant up to 1e6; the lower index looks like zero")
    if excess(0.0)[0] <= 0:
        return 1.0
    lk = bisect_increasing(lambda t: -excess(t), np.array(0.0), np.array([0.0]), np.array([top]), xtol=1e-13)
    return float(np.exp(lk[0]))


# --------------------------------------------------------------------------
# JSON specs


def function_from_spec(spec: dict) -> OrliczFunction:
    """Build a function from its JSON description, e.g. ``{"kind": "power", "p": 2}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("function spec must be an object with a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "power":
            return Power(float(spec["p"]))
        if kind == "max_powers":
            return MaxPowers(float(spec["p"]), float(spec["q"]))
        if kind == "min_powers":
            return MinPowers(float(spec["p"]), float(spec["q"]))
        if kind == "log_perturbed_power":
            return LogPerturbedPower(float(spec["q"]))
        if kind == "exp_minus_one":
            return ExpMinusOne()
        if kind == "table":
            tails = spec.get("tail_exponents")
            return Table(np.asarray(spec["u"], float), np.asarray(spec["phi"], float), tuple(tails) if tails else None)
        if kind == "power_compose":
            return power_compose(function_from_spec(spec["base"]), float(spec["s"]))
        if kind == "small_extension":
            return SmallExtension(function_from_spec(spec["base"]), float(spec["q"]), float(spec["v"]), float(spec["c"]))
    except KeyError as exc:
        raise DomainError(f"function spec of kind {kind!r} is missing field {exc}") from None
    raise DomainError(f"unknown function kind {kind!r}")
