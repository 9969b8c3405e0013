"""Finite measure spaces, step functions, the modular and the Luxemburg quasi-norm.

A step function takes the value ``c_i`` on a cell of measure ``mu_i``; the
counting-measure case has every ``mu_i = 1``.  The Luxemburg quasi-norm

    ||x|| = inf{eps > 0 : sum_i mu_i phi(|c_i| / eps) <= 1}

is solved in ``t = log eps``, where ``F(t) = log sum_i mu_i phi(|c_i| e**-t)``
is continuous and strictly decreasing.  The bracket is exact: at
``eps = max_i |c_i| / phi^-1(1/mu_i)`` one term alone equals 1, and at
``eps = max_i |c_i| / phi^-1(1/(k mu_i))`` with ``k`` nonzero cells every
term is at most ``1/k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .exceptions import DomainError, IndexZeroError
from .functions import (
    DEFAULT_TOL,
    OrliczFunction,
    Regime,
    ToleranceConfig,
    halving_constant,
    log_inverse,
    power_compose,
)

__all__ = [
    "MeasureSpace",
    "StepFunction",
    "modular",
    "luxemburg_norm",
    "luxemburg_norm_batch",
    "indicator_norm",
    "norm_identity_check",
    "quasi_triangle_constant",
    "reverse_triangle_check",
    "inverse_doubling_check",
    "vector_from_spec",
]


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Discrete counting measure on ``n`` atoms or a non-atomic space cut into cells."""

    kind: str
    measures: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.measures, dtype=float)
        if self.kind not in ("discrete", "step"):
            raise DomainError(f"unknown measure space kind {self.kind!r}")
        if m.ndim != 1 or m.size < 1:
            raise DomainError("a measure space needs at least one cell")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise DomainError("cell measures must be positive and finite")
        object.__setattr__(self, "measures", m)

    @classmethod
    def discrete(cls, n: int) -> "MeasureSpace":
        if int(n) != n or n < 1:
            raise DomainError("discrete space needs n >= 1 atoms")
        return cls("discrete", np.ones(int(n)))

    @classmethod
    def step(cls, measures: Sequence[float]) -> "MeasureSpace":
        return cls("step", np.asarray(measures, dtype=float))

    @property
    def size(self) -> int:
        return self.measures.size

    @property
    def total(self) -> float:
        return float(self.measures.sum())

    def to_spec(self):
        if self.kind == "discrete":
            return {"kind": "discrete", "n": self.size}
        return {"kind": "step", "measures": self.measures.tolist()}

    def __eq__(self, other):
        return isinstance(other, MeasureSpace) and self.kind == other.kind and np.array_equal(self.measures, other.measures)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Simple function with value ``coeffs[i]`` on cell ``i`` of ``space``."""

    space: MeasureSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.space.size,):
            raise DomainError(f"expected {self.space.size} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def support(self) -> np.ndarray:
        return self.coeffs != 0

    def __add__(self, other: "StepFunction") -> "StepFunction":
        if other.space != self.space:
            raise DomainError("step functions live on different spaces")
        return StepFunction(self.space, self.coeffs + other.coeffs)

    def __mul__(self, a: float) -> "StepFunction":
        return StepFunction(self.space, a * self.coeffs)

    __rmul__ = __mul__

    def abs(self) -> "StepFunction":
        return StepFunction(self.space, np.abs(self.coeffs))

    def to_spec(self):
        return {"space": self.space.to_spec(), "coeffs": self.coeffs.tolist()}


def vector_from_spec(spec: dict) -> StepFunction:
    """Parse ``{"space": {...}, "coeffs": [...]}``; a discrete ``n`` defaults to ``len(coeffs)``."""
    try:
        sp = spec["space"]
        if sp["kind"] == "discrete":
            space = MeasureSpace.discrete(sp.get("n", len(spec["coeffs"])))
        elif sp["kind"] == "step":
            space = MeasureSpace.step(sp["measures"])
        else:
            raise DomainError(f"unknown measure space kind {sp['kind']!r}")
        return StepFunction(space, spec["coeffs"])
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed vector spec: {exc}") from None


def modular(f: OrliczFunction, x: StepFunction) -> float:
    """``sum_i mu_i phi(|c_i|)``."""
    return float(np.sum(x.space.measures * f.value(np.abs(x.coeffs))))


def _log_modular(f, logc, logmu, t):
    """``log sum mu_i phi(|c_i| e**-t)`` row-wise; ``logc`` is ``-inf`` off support."""
    with np.errstate(invalid="ignore"):
        terms = f.log_value(logc - t[:, None])
    terms = np.where(np.isneginf(logc), -np.inf, terms) + logmu
    return logsumexp(terms, axis=1)


def luxemburg_norm_batch(
    f: OrliczFunction,
    coeffs,
    measures,
    tol: float = 1e-14,
    max_iter: int = 200,
) -> np.ndarray:
    """Luxemburg norms of many step functions on the same cells.

    ``coeffs`` has shape ``(m, k)``; the result has shape ``(m,)``.  Uses
    the Illinois variant of regula falsi on ``F(t) = 0`` with a bisection
    step whenever the bracket fails to shrink by half.
    """
    c = np.abs(np.atleast_2d(np.asarray(coeffs, dtype=float)))
    mu = np.asarray(measures, dtype=float)
    out = np.zeros(c.shape[0])
    live = np.any(c > 0, axis=1)
    if not live.any():
        return out
    c = c[live]
    with np.errstate(divide="ignore"):
        logc = np.log(c)
    logmu = np.log(mu)
    k = np.count_nonzero(c, axis=1)
    inv1 = log_inverse(f, -logmu)  # log phi^-1(1/mu_i)
    lo = np.max(np.where(c > 0, logc - inv1, -np.inf), axis=1)
    invk = log_inverse(f, -(logmu[None, :] + np.log(k)[:, None]))
    hi = np.max(np.where(c > 0, logc - invk, -np.inf), axis=1)
    flo = _log_modular(f, logc, logmu, lo)
    fhi = _log_modular(f, logc, logmu, hi)
    t = hi.copy()
    ft = fhi.copy()
    side = np.zeros(lo.shape, dtype=int)
    for _ in range(max_iter):
        width = hi - lo
        active = (np.abs(ft) > tol) & (width > 4e-16 * np.maximum(1.0, np.abs(hi)))
        if not active.any():
            break
        denom = flo - fhi
        with np.errstate(invalid="ignore", divide="ignore"):
            cand = lo + flo * width / denom
        bad = ~np.isfinite(cand) | (cand <= lo) | (cand >= hi) | (np.abs(side) > 2)
        cand = np.where(bad, lo + 0.5 * width, cand)
        fc = _log_modular(f, logc[active], logmu, cand[active])
        t[active] = cand[active]
        ft[active] = fc
        above = np.zeros(lo.shape, dtype=bool)
        above[active] = fc > 0
        below = active & ~above
        # Illinois: halve the stale endpoint's value when the same side repeats
        lo = np.where(above, t, lo)
        flo = np.where(above, ft, np.where(below & (side < 0), 0.5 * flo, flo))
        hi = np.where(below, t, hi)
        fhi = np.where(below, ft, np.where(above & (side > 0), 0.5 * fhi, fhi))
        side = np.where(above, np.where(side > 0, side + 1, 1), np.where(below, np.where(side < 0, side - 1, -1), side))
        side = np.where(bad & active, 0, side)
    out[live] = np.exp(t)
    return out


def luxemburg_norm(f: OrliczFunction, x: StepFunction) -> float:
    """Luxemburg quasi-norm of a step function."""
    return float(luxemburg_norm_batch(f, x.coeffs[None, :], x.space.measures)[0])


def indicator_norm(f: OrliczFunction, measure: float) -> float:
    """Closed form ``1 / phi^-1(1/mu(A))`` for the indicator of a set ``A``."""
    return float(np.exp(-log_inverse(f, -math.log(measure))))


@dataclass(frozen=True)
class IdentityReport:
    lhs: float
    rhs: float
    rel_error: float
    holds: bool


def norm_identity_check(f: OrliczFunction, q: float, x: StepFunction, rel: float = 1e-8) -> IdentityReport:
    """``||x||`` under ``u -> phi(u**(1/q))`` against ``|| |x|**(1/q) ||_phi ** q``."""
    if not q > 0:
        raise DomainError("q must be positive")
    lhs = luxemburg_norm(power_compose(f, q), x)
    rhs = luxemburg_norm(f, StepFunction(x.space, np.abs(x.coeffs) ** (1.0 / q))) ** q
    err = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return IdentityReport(lhs, rhs, err, bool(err <= rel))


@dataclass(frozen=True)
class TriangleReport:
    """Largest ``||x + y|| / (||x|| + ||y||)`` found, with the structured candidate."""

    constant: float
    structured: float
    sampled: float
    witness: tuple
    samples: int


def _lower_index_positive(f, tol):
    """Raise :class:`IndexZeroError` unless ``f`` halves within a dilation of ``1e6``.

    A strictly increasing tabulated function always has positive chord
    exponents, so the numerically meaningful test is whether the halving
    constant (which is ``2**(1/alpha)`` for index ``alpha``) exists.
    """
    halving_constant(f, Regime.all(), tol)


def structured_triangle_ratio(f: OrliczFunction, tol: ToleranceConfig = DEFAULT_TOL):
    """Scan two disjoint indicators of equal measure over a range of measures.

    With ``y = 1/(2 mu)`` the ratio is ``phi^-1(2y) / (2 phi^-1(y))``.
    Returns ``(ratio, mu)`` at the maximum.
    """
    logy = np.linspace(*np.log(tol.grid_span), tol.grid_points)
    r = np.exp(log_inverse(f, logy + math.log(2.0)) - log_inverse(f, logy)) / 2.0
    i = int(np.argmax(r))
    return float(r[i]), float(0.5 * math.exp(-logy[i]))


def quasi_triangle_constant(
    f: OrliczFunction,
    count: int = 200,
    size: int = 8,
    seed: int = 0,
    space: Optional[MeasureSpace] = None,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TriangleReport:
    """Estimate the best constant ``C`` in ``||x + y|| <= C (||x|| + ||y||)``.

    Random pairs have log-uniform magnitudes and random signs on a discrete
    space (or ``space`` if given).
    """
    _lower_index_positive(f, tol)
    indicators, mu = structured_triangle_ratio(f, tol)
    rng = np.random.default_rng(seed)
    space = space or MeasureSpace.discrete(size)
    shape = (count, space.size)

    def draw():
        mag = 10.0 ** rng.uniform(-3, 3, shape)
        return mag * rng.choice([-1.0, 1.0], shape) * (rng.random(shape) < 0.7)

    x, y = draw(), draw()
    x[:, 0] = np.where(x[:, 0] == 0, 1.0, x[:, 0])
    y[:, -1] = np.where(y[:, -1] == 0, 1.0, y[:, -1])
    nx = luxemburg_norm_batch(f, x, space.measures)
    ny = luxemburg_norm_batch(f, y, space.measures)
    nxy = luxemburg_norm_batch(f, x + y, space.measures)
    ratio = nxy / (nx + ny)
    # a vector paired with itself gives exactly 1 for every Luxemburg functional
    n0 = luxemburg_norm_batch(f, np.vstack([x[0], 2.0 * x[0]]), space.measures)
    parallel = float(n0[1] / (2.0 * n0[0]))
    j = int(np.argmax(ratio))
    sampled = float(ratio[j])
    if parallel > indicators:
        structured, witness = parallel, ("parallel", StepFunction(space, x[0]))
    else:
        structured, witness = indicators, ("disjoint_indicators", mu)
    if sampled > structured:
        witness = ("sample", StepFunction(space, x[j]), StepFunction(space, y[j]))
    return TriangleReport(max(structured, sampled), structured, sampled, witness, count)


def reverse_triangle_check(
    f: OrliczFunction, count: int = 200, size: int = 8, seed: int = 0, slack: float = 1e-9
):
    """Check ``||x + y|| >= ||x|| + ||y||`` on random nonnegative pairs.

    Holds for the Luxemburg functional of a concave function.  Returns the
    largest observed ``(||x|| + ||y||) / ||x + y||`` and whether it is at most
    ``1 + slack``.
    """
    rng = np.random.default_rng(seed)
    mu = np.ones(size)
    x = 10.0 ** rng.uniform(-3, 3, (count, size)) * (rng.random((count, size)) < 0.7)
    y = 10.0 ** rng.uniform(-3, 3, (count, size)) * (rng.random((count, size)) < 0.7)
    x[:, 0] += 1.0
    nx, ny = luxemburg_norm_batch(f, x, mu), luxemburg_norm_batch(f, y, mu)
    worst = float(np.max((nx + ny) / luxemburg_norm_batch(f, x + y, mu)))
    return worst, bool(worst <= 1.0 + slack)


def inverse_doubling_check(f: OrliczFunction, C: float, r: float, tol: ToleranceConfig = DEFAULT_TOL, slack: float = 1e-6):
    """Check ``phi^-1(2s) <= (2/C)**(1/r) phi^-1(s)`` on a log grid of values ``s``.

    Follows from lower power growth ``phi(a t) >= C a**r phi(t)`` by taking
    ``a = (2/C)**(1/r)``.  Returns ``(worst ratio / bound, holds)``.
    """
    logs = np.linspace(*np.log(tol.grid_span), tol.grid_points)
    ratio = np.exp(log_inverse(f, logs + math.log(2.0)) - log_inverse(f, logs))
    bound = (2.0 / C) ** (1.0 / r)
    worst = float(np.max(ratio) / bound)
    return worst, bool(worst <= 1.0 + slack)
