"""Rademacher averages, geometric probes and finite counterexample families.

Averages over signs are exact: every sign vector with ``theta_1 = +1`` is
enumerated (the norm is invariant under a global flip).  For pairwise
disjoint families no enumeration is needed at all, since
``|sum theta_i x_i| = sum |x_i|`` pointwise and the norm is a lattice norm.

Probe ratios follow the usual conventions, with ``N`` the quasi-norm:

* type ``p``: ``avg N(sum theta_i x_i) / (sum N(x_i)**p)**(1/p)``
* cotype ``q``: ``(sum N(x_i)**q)**(1/q) / avg N(sum theta_i x_i)``
* upper ``p``-estimate: ``N(sum x_i) / (sum N(x_i)**p)**(1/p)`` (disjoint)
* lower ``q``-estimate: ``(sum N(x_i)**q)**(1/q) / N(sum x_i)`` (disjoint)
* ``p``-convexity: ``N((sum |x_i|**p)**(1/p)) / (sum N(x_i)**p)**(1/p)``
* ``q``-concavity: ``(sum N(x_i)**q)**(1/q) / N((sum |x_i|**q)**(1/q))``

The sign average is the plain mean (``moment=1``) or the root mean square
(``moment=2``); the two give equivalent notions of type and cotype.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import DomainError, PreconditionError, SearchFailed, SizeError
from .functions import DEFAULT_TOL, OrliczFunction, Regime, ToleranceConfig, log_inverse, regime_log_grid
from .modular import MeasureSpace, StepFunction, luxemburg_norm, luxemburg_norm_batch, modular

__all__ = [
    "SignAverage",
    "ProbeResult",
    "InstanceSpec",
    "WitnessFamily",
    "sign_patterns",
    "rademacher_average",
    "rademacher_monte_carlo",
    "khintchine_ratio",
    "square_function_ratio",
    "generate_instances",
    "probe_ratio",
    "probe_type",
    "probe_cotype",
    "probe_upper_estimate",
    "probe_lower_estimate",
    "probe_convexity",
    "probe_concavity",
    "build_linfty_witness",
    "build_lower_estimate_witness",
    "build_type_failure_witness",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 20
# largest block of a witness family stored vector by vector
MATERIALIZE_CAP = 1024
# slack on gap inequalities, in log units, to absorb rounding at equality
GAP_SLACK = 1e-12


def sign_patterns(n: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Rows ``start..stop`` of the ``2**(n-1)`` sign vectors with first entry ``+1``."""
    total = 1 << max(n - 1, 0)
    stop = total if stop is None else min(stop, total)
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n - 1, dtype=np.int64)[None, :]) & 1
    return np.concatenate([np.ones((idx.size, 1)), 1.0 - 2.0 * bits], axis=1)


# --------------------------------------------------------------------------
# families


def _as_matrix(family: Sequence[StepFunction]):
    if len(family) == 0:
        raise DomainError("family must contain at least one vector")
    space = family[0].space
    for x in family[1:]:
        if x.space != space:
            raise DomainError("all vectors of a family must live on the same space")
    return np.vstack([x.coeffs for x in family]), space


def is_disjoint(family: Sequence[StepFunction]) -> bool:
    X, _ = _as_matrix(family)
    return bool(np.all(np.count_nonzero(X, axis=0) <= 1))


@dataclass(frozen=True)
class SignAverage:
    """Statistics of ``N(sum theta_i x_i)`` over all sign vectors."""

    n: int
    mean: float
    min: float
    max: float
    mean_square: float
    exact: bool = True

    @property
    def rms(self) -> float:
        return math.sqrt(self.mean_square)

    def moment(self, m: int) -> float:
        return self.mean if m == 1 else self.rms

    def as_dict(self):
        return {"n": self.n, "mean": self.mean, "min": self.min, "max": self.max,
                "mean_square": self.mean_square, "exact": self.exact}


def rademacher_average(
    f: OrliczFunction,
    family: Sequence[StepFunction],
    cap: int = DEFAULT_CAP,
    chunk: int = 1 << 15,
    disjoint_shortcut: bool = True,
) -> SignAverage:
    """Exact average of the norm of ``sum theta_i x_i`` over all ``2**n`` sign vectors.

    Disjoint families skip the enumeration unless ``disjoint_shortcut`` is
    false; the cap then applies to them too.
    """
    X, space = _as_matrix(family)
    n = X.shape[0]
    if disjoint_shortcut and np.all(np.count_nonzero(X, axis=0) <= 1):
        v = luxemburg_norm(f, StepFunction(space, np.abs(X).sum(axis=0)))
        return SignAverage(n, v, v, v, v * v)
    if n > cap:
        raise SizeError(f"{n} vectors exceed the enumeration cap {cap}")
    total = 1 << (n - 1)
    s1 = s2 = 0.0
    lo, hi = math.inf, -math.inf
    for start in range(0, total, chunk):
        S = sign_patterns(n, start, start + chunk)
        norms = luxemburg_norm_batch(f, S @ X, space.measures)
        s1 += norms.sum()
        s2 += (norms * norms).sum()
        lo, hi = min(lo, norms.min()), max(hi, norms.max())
    return SignAverage(n, float(s1 / total), float(lo), float(hi), float(s2 / total))


def rademacher_monte_carlo(
    f: OrliczFunction, family: Sequence[StepFunction], samples: int = 100_000, seed: int = 0
) -> Tuple[float, float]:
    """Sampled estimate of the mean norm over random signs, with its standard error."""
    X, space = _as_matrix(family)
    rng = np.random.default_rng(seed)
    S = rng.choice([-1.0, 1.0], size=(samples, X.shape[0]))
    norms = luxemburg_norm_batch(f, S @ X, space.measures)
    return float(norms.mean()), float(norms.std(ddof=1) / math.sqrt(samples))


def khintchine_ratio(a: Sequence[float], r: float, cap: int = DEFAULT_CAP) -> float:
    """``(avg |sum theta_i a_i|**r)**(1/r) / (sum a_i**2)**(1/2)`` by exact enumeration."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size == 0 or not np.any(a != 0):
        raise DomainError("need a nonzero vector of scalars")
    if not r > 0:
        raise DomainError("moment r must be positive")
    if a.size > cap:
        raise SizeError(f"{a.size} scalars exceed the enumeration cap {cap}")
    s = np.abs(sign_patterns(a.size) @ a)
    if r == 2:
        m = np.mean(s * s)
        return float(math.sqrt(m / np.dot(a, a)))
    return float(np.mean(s ** r) ** (1.0 / r) / math.sqrt(np.dot(a, a)))


def square_function_ratio(f: OrliczFunction, family: Sequence[StepFunction], cap: int = DEFAULT_CAP) -> float:
    """``avg N(sum theta_i x_i) / N((sum |x_i|**2)**(1/2))``."""
    X, space = _as_matrix(family)
    sq = luxemburg_norm(f, StepFunction(space, np.sqrt((X * X).sum(axis=0))))
    return rademacher_average(f, family, cap).mean / sq


# --------------------------------------------------------------------------
# witness families


@dataclass(frozen=True, eq=False)
class WitnessFamily:
    """Finite family of vectors produced by a counterexample construction.

    Attributes:
        kind: ``"linfty"``, ``"lower_estimate"`` or ``"type_failure"``.
        space: measure space the vectors live on.
        vectors: the vectors, or ``None`` when the block is too large to
            store; the norms below are then computed from one cell of each
            kind, which is exact because all vectors are disjoint copies.
        disjoint: whether supports are pairwise disjoint.
        norm_values, norm_counts: distinct vector norms with multiplicities.
        sum_norm: norm of the sum of the family (equal to the sign average
            for disjoint families).
        meta: construction parameters (level ``n``, ``a_n``, ``u_n``, block size ...).
    """

    kind: str
    space: Optional[MeasureSpace]
    vectors: Optional[List[StepFunction]]
    disjoint: bool
    norm_values: np.ndarray
    norm_counts: np.ndarray
    sum_norm: float
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.norm_counts.sum())

    def power_sum(self, p: float) -> float:
        """``sum_i N(x_i)**p``."""
        return float(np.sum(self.norm_counts * self.norm_values ** p))

    def as_dict(self):
        out = {
            "kind": self.kind,
            "size": self.size,
            "disjoint": self.disjoint,
            "norm_values": self.norm_values.tolist(),
            "norm_counts": self.norm_counts.tolist(),
            "sum_norm": self.sum_norm,
            "meta": {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.meta.items()},
        }
        if self.vectors is not None:
            out["vectors"] = [x.to_spec() for x in self.vectors]
        return out


def _family_stats(f, family, moment, cap):
    """Norms of the members, sign average, and norm of the sum."""
    if isinstance(family, WitnessFamily):
        if family.disjoint:
            avg = family.sum_norm
        else:
            avg = rademacher_average(f, family.vectors, cap).moment(moment)
        return family.norm_values, family.norm_counts, avg, family.disjoint, family.sum_norm
    X, space = _as_matrix(family)
    norms = luxemburg_norm_batch(f, X, space.measures)
    if np.any(norms == 0):
        raise DomainError("family members must be nonzero")
    disjoint = bool(np.all(np.count_nonzero(X, axis=0) <= 1))
    avg = rademacher_average(f, family, cap).moment(moment)
    sum_norm = luxemburg_norm(f, StepFunction(space, X.sum(axis=0)))
    return norms, np.ones(norms.size), avg, disjoint, sum_norm


PROPERTIES = ("type", "cotype", "upper_estimate", "lower_estimate", "convexity", "concavity")


def probe_ratio(
    f: OrliczFunction,
    prop: str,
    exponent: float,
    family: Union[Sequence[StepFunction], WitnessFamily],
    moment: int = 1,
    cap: int = DEFAULT_CAP,
) -> float:
    """Ratio of one family for one property (see the module docstring)."""
    if prop not in PROPERTIES:
        raise DomainError(f"unknown property {prop!r}; choose from {PROPERTIES}")
    e = float(exponent)
    if prop in ("convexity", "concavity"):
        if isinstance(family, WitnessFamily):
            if not family.disjoint:
                raise DomainError("lattice sums of a stored-only family need its vectors")
            # disjoint: (sum |x_i|**e)**(1/e) = sum |x_i|
            norms, counts, total = family.norm_values, family.norm_counts, family.sum_norm
        else:
            X, space = _as_matrix(family)
            norms = luxemburg_norm_batch(f, X, space.measures)
            counts = np.ones(norms.size)
            total = luxemburg_norm(f, StepFunction(space, (np.abs(X) ** e).sum(axis=0) ** (1.0 / e)))
        lsum = float(np.sum(counts * norms ** e)) ** (1.0 / e)
        return total / lsum if prop == "convexity" else lsum / total
    norms, counts, avg, disjoint, sum_norm = _family_stats(f, family, moment, cap)
    lsum = float(np.sum(counts * norms ** e)) ** (1.0 / e)
    if prop == "type":
        return avg / lsum
    if prop == "cotype":
        return lsum / avg
    if not disjoint:
        raise PreconditionError(f"{prop.replace('_', ' ')} probes need disjointly supported families")
    return sum_norm / lsum if prop == "upper_estimate" else lsum / sum_norm


@dataclass(frozen=True)
class InstanceSpec:
    """Seeded recipe for random probe families.

    Attributes:
        count: number of random families.
        max_vectors: largest family size (kept within the enumeration cap).
        max_cells: largest number of cells of the underlying space.
        seed: RNG seed.
        coeff_range: magnitudes are log-uniform in this range, signs random.
        kinds: any of ``"indicators"`` (disjoint, constant on each support),
            ``"disjoint"`` and ``"overlapping"``; drawn in rotation.
        space: ``"discrete"`` (counting measure) or ``"step"`` (cells with
            log-uniform measures in ``[1e-2, 1e2]``).
        structured: also add families of equal disjoint indicators over a
            range of set measures.
    """

    count: int = 1000
    max_vectors: int = 6
    max_cells: int = 64
    seed: int = 0
    coeff_range: Tuple[float, float] = (1e-3, 1e3)
    kinds: Tuple[str, ...] = ("indicators", "disjoint", "overlapping")
    space: str = "discrete"
    structured: bool = True

    def disjoint_only(self) -> "InstanceSpec":
        kinds = tuple(k for k in self.kinds if k != "overlapping") or ("indicators",)
        return InstanceSpec(self.count, self.max_vectors, self.max_cells, self.seed, self.coeff_range, kinds,
                            self.space, self.structured)


def _random_space(rng, cells, kind):
    if kind == "step":
        return MeasureSpace.step(10.0 ** rng.uniform(-2, 2, cells))
    return MeasureSpace.discrete(cells)


def generate_instances(spec: InstanceSpec) -> List[List[StepFunction]]:
    """Random families per ``spec``, followed by the structured ones."""
    rng = np.random.default_rng(spec.seed)
    lo, hi = np.log10(spec.coeff_range)
    out = []
    for t in range(spec.count):
        kind = spec.kinds[t % len(spec.kinds)]
        n = int(rng.integers(1, spec.max_vectors + 1))
        cells = int(rng.integers(max(n, 2), spec.max_cells + 1))
        space = _random_space(rng, cells, spec.space)
        X = np.zeros((n, cells))
        if kind == "overlapping":
            mask = rng.random((n, cells)) < rng.uniform(0.2, 0.9)
            mask[np.arange(n), rng.integers(0, cells, n)] = True
            X[mask] = 10.0 ** rng.uniform(lo, hi, mask.sum()) * rng.choice([-1.0, 1.0], mask.sum())
        else:
            owner = rng.integers(-1, n, cells)  # -1 leaves a cell empty
            owner[rng.permutation(cells)[:n]] = np.arange(n)
            if kind == "indicators":
                level = 10.0 ** rng.uniform(lo, hi, n) * rng.choice([-1.0, 1.0], n)
                vals = level[np.maximum(owner, 0)]
            else:
                vals = 10.0 ** rng.uniform(lo, hi, cells) * rng.choice([-1.0, 1.0], cells)
            for i in range(n):
                X[i, owner == i] = vals[owner == i]
        out.append([StepFunction(space, X[i]) for i in range(n)])
    if spec.structured:
        for m in 10.0 ** np.arange(-4, 5, 1.0):
            for k in (2, 4, min(spec.max_vectors, 8)):
                space = MeasureSpace.step(np.full(k, m))
                out.append([StepFunction(space, np.eye(k)[i]) for i in range(k)])
    return out


@dataclass(frozen=True, eq=False)
class ProbeResult:
    """Extremal ratio of a probe sweep and the family attaining it."""

    property: str
    exponent: float
    best_ratio: float
    witness: Union[List[StepFunction], WitnessFamily]
    instance_count: int
    moment: int = 1
    ratios: Optional[np.ndarray] = None

    def as_dict(self):
        w = self.witness.as_dict() if isinstance(self.witness, WitnessFamily) else [x.to_spec() for x in self.witness]
        return {
            "property": self.property,
            "exponent": self.exponent,
            "best_ratio": self.best_ratio,
            "instance_count": self.instance_count,
            "moment": self.moment,
            "witness": w,
        }


def _probe(f, prop, exponent, instances, families, moment, cap, reverse_candidates=None):
    fams = list(families or [])
    if instances is not None:
        fams = generate_instances(instances) + fams
    if not fams:
        raise DomainError("no families to probe")
    ratios = np.array([probe_ratio(f, prop, exponent, fam, moment, cap) for fam in fams])
    k = int(np.argmax(ratios))
    return ProbeResult(prop, float(exponent), float(ratios[k]), fams[k], len(fams), moment, ratios)


def probe_type(f, p, instances: Optional[InstanceSpec] = InstanceSpec(), families=None, moment=1, cap=DEFAULT_CAP):
    """Largest type-``p`` ratio over the instance families."""
    return _probe(f, "type", p, instances, families, moment, cap)


def probe_cotype(f, q, instances: Optional[InstanceSpec] = InstanceSpec(), families=None, moment=1, cap=DEFAULT_CAP):
    """Largest cotype-``q`` ratio over the instance families."""
    return _probe(f, "cotype", q, instances, families, moment, cap)


def _check_disjoint(instances, families):
    if instances is not None and "overlapping" in instances.kinds:
        raise PreconditionError("estimate probes need disjoint families; use InstanceSpec.disjoint_only()")
    for fam in families or []:
        d = fam.disjoint if isinstance(fam, WitnessFamily) else is_disjoint(fam)
        if not d:
            raise PreconditionError("estimate probes need disjointly supported families")


def probe_upper_estimate(f, p, instances: Optional[InstanceSpec] = InstanceSpec().disjoint_only(), families=None,
                         cap=DEFAULT_CAP):
    """Largest ``N(sum x_i) / (sum N(x_i)**p)**(1/p)`` over disjoint families."""
    _check_disjoint(instances, families)
    return _probe(f, "upper_estimate", p, instances, families, 1, cap)


def probe_lower_estimate(f, q, instances: Optional[InstanceSpec] = InstanceSpec().disjoint_only(), families=None,
                         cap=DEFAULT_CAP):
    """Largest ``(sum N(x_i)**q)**(1/q) / N(sum x_i)`` over disjoint families."""
    _check_disjoint(instances, families)
    return _probe(f, "lower_estimate", q, instances, families, 1, cap)


def probe_convexity(f, p, instances: Optional[InstanceSpec] = InstanceSpec(), families=None):
    """Largest ``p``-convexity ratio; overlapping supports are allowed."""
    return _probe(f, "convexity", p, instances, families, 1, DEFAULT_CAP)


def probe_concavity(f, q, instances: Optional[InstanceSpec] = InstanceSpec(), families=None):
    """Largest ``q``-concavity ratio; overlapping supports are allowed.

    Pairs of disjoint equal indicators are always included: for them the
    ratio reduces to the reverse triangle inequality of the functional
    associated with ``u -> phi(u**(1/q))``.
    """
    extra = list(families or [])
    for m in 10.0 ** np.arange(-4, 5, 1.0):
        space = MeasureSpace.step([m, m])
        extra.append([StepFunction(space, [1.0, 0.0]), StepFunction(space, [0.0, 1.0])])
    return _probe(f, "concavity", q, instances, extra, 1, DEFAULT_CAP)


# --------------------------------------------------------------------------
# witness builders


def _cells_norms(f, coeff, measure):
    """Norm of one cell, computed through the general solver."""
    return luxemburg_norm(f, StepFunction(MeasureSpace.step([measure]), [coeff]))


def _u_search_grid(regime, tol):
    x = regime_log_grid(regime, tol)[::8]
    if regime.mode == "small":
        x = np.append(x, math.log(regime.cutoff))
    if regime.contains(1.0) and x[0] <= 0.0 <= x[-1]:
        x = np.append(x, 0.0)
    return x[np.argsort(np.abs(x), kind="stable")]


def _snap_integer(a, ok):
    """Round ``a`` to an integer when it is one up to rounding and the gap still holds."""
    r = round(a)
    if r >= 1 and abs(a - r) <= 1e-9 * a and ok(math.log(r)):
        return float(r)
    return a


def _minimal_dilation(cond, logx, la_max=700.0, step=0.05):
    """Smallest ``log a`` in ``[0, la_max]`` with ``cond(logx, log a)`` true, per base point.

    Returns ``(log a, index)`` of the best base point or ``None``.  Grid
    scan followed by bisection towards the first crossing; the returned
    value always satisfies the condition.
    """
    la = np.arange(0.0, la_max + step, step)
    ok = cond(logx[:, None], la[None, :])
    has = ok.any(axis=1)
    if not has.any():
        return None
    first = np.where(has, np.argmax(ok, axis=1), la.size)
    best = int(np.min(first))
    # ties prefer the base point listed first (closest to u = 1)
    i = int(np.argmax(first == best))
    hi = la[best]
    lo = la[best - 1] if best > 0 else None
    if lo is None:
        return 0.0, i
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if cond(np.array(logx[i]), np.array(mid)):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return float(hi), i


def build_lower_estimate_witness(
    f: OrliczFunction,
    q: float,
    n: int,
    regime: Regime = Regime(),
    tol: ToleranceConfig = DEFAULT_TOL,
    materialize_cap: int = MATERIALIZE_CAP,
) -> WitnessFamily:
    """Block ``n`` of the family refuting a lower ``q``-estimate.

    Finds ``a >= 1`` (as small as possible) and ``u`` with
    ``phi(a**(1/q) u) >= 2**n a phi(u)``, then takes ``[a]`` disjoint cells
    of measure ``1/phi(a**(1/q) u)`` and ``g_i = u`` on cell ``i``.  Each
    ``g_i`` has norm ``a**(-1/q)``, so ``sum N(g_i)**q = [a]/a >= 1/2``,
    while ``N(sum g_i)`` decays with ``n`` when ``phi`` is doubling.
    """
    if not (q > 0 and n >= 1):
        raise DomainError("need q > 0 and n >= 1")
    ln2n = n * math.log(2.0)

    def cond(x, la):
        with np.errstate(invalid="ignore", over="ignore"):
            gap = f.log_value(x + la / q) - f.log_value(x) - la - ln2n
        return gap >= -GAP_SLACK

    logx = _u_search_grid(regime, tol)
    found = _minimal_dilation(cond, logx)
    if found is None:
        raise SearchFailed(f"no (a, u) pair with the level-{n} gap; upper growth of order {q} may hold")
    la, i = found
    x = float(logx[i])
    a = _snap_integer(math.exp(la), lambda l: bool(cond(np.array(x), np.array(l))))
    u = math.exp(x)
    block = int(math.floor(a))
    log_cell = -float(f.log_value(x + math.log(a) / q))
    mu = math.exp(log_cell)
    cell_norm = _cells_norms(f, u, mu)
    sum_norm = _cells_norms(f, u, block * mu)
    vectors = space = None
    if block <= materialize_cap:
        space = MeasureSpace.step(np.full(block, mu))
        vectors = [StepFunction(space, u * np.eye(block)[j]) for j in range(block)]
        sum_norm = luxemburg_norm(f, StepFunction(space, np.full(block, u)))
    power_sum = block * cell_norm ** q
    if power_sum < 0.5 - 1e-9:
        raise SearchFailed(f"block sum {power_sum:.3g} below 1/2; block {n} is too short")
    meta = {
        "n": n, "q": q, "a_n": a, "u_n": u, "block_size": block, "cell_measure": mu,
        "cell_modular": float(np.exp(f.log_value(x + math.log(a) / q) + log_cell)),
        "power_sum": power_sum, "gap_log": float(f.log_value(x + math.log(a) / q) - f.log_value(x) - math.log(a)),
    }
    return WitnessFamily("lower_estimate", space, vectors, True, np.array([cell_norm]), np.array([block]),
                         sum_norm, meta)


def build_type_failure_witness(
    f: OrliczFunction,
    p: float,
    s: float,
    n: int,
    base: float = 2.0,
    regime: Regime = Regime(),
    tol: ToleranceConfig = DEFAULT_TOL,
    materialize_cap: int = MATERIALIZE_CAP,
) -> WitnessFamily:
    """Block ``n`` of the ceiling-partition family refuting type ``p``.

    Needs lower growth of order ``s < p``.  Finds ``a >= 1`` minimal and
    ``u`` with ``phi(a**(1/p) u) <= base**-n a phi(u)`` and
    ``ceil(a) phi(u) >= phi(2**(n/s) a**(1/p) u)``; takes ``ceil(a)`` cells of
    measure ``1/phi(2**(n/s) a**(1/p) u)`` with ``g_i = u`` on each.  Then
    ``sum N(g_i)**p = ceil(a) / (2**(np/s) a)`` is small while the modular of
    the sum is at least 1.
    """
    if not (p > 0 and s > 0 and n >= 1 and base >= 2):
        raise DomainError("need p, s > 0, n >= 1 and base >= 2")
    lb = n * math.log(base)
    push = n * math.log(2.0) / s

    def cond(x, la):
        with np.errstate(invalid="ignore", over="ignore"):
            gap = f.log_value(x) + la - lb - f.log_value(x + la / p)
            ceil_a = np.ceil(np.exp(la) * (1 - 1e-15))
            fill = np.log(ceil_a) + f.log_value(x) - f.log_value(x + push + la / p)
        return (gap >= -GAP_SLACK) & (fill >= -GAP_SLACK)

    logx = _u_search_grid(regime, tol)
    found = _minimal_dilation(cond, logx)
    if found is None:
        raise SearchFailed(f"no (a, u) pair with the level-{n} gap; lower growth of order {p} may hold")
    la, i = found
    x = float(logx[i])
    a = _snap_integer(math.exp(la), lambda l: bool(cond(np.array(x), np.array(l))))
    u = math.exp(x)
    block = int(math.ceil(a))
    lv = float(f.log_value(x + push + math.log(a) / p))
    mu = math.exp(-lv)
    cell_norm = _cells_norms(f, u, mu)
    sum_norm = _cells_norms(f, u, block * mu)
    vectors = space = None
    if block <= materialize_cap:
        space = MeasureSpace.step(np.full(block, mu))
        vectors = [StepFunction(space, u * np.eye(block)[j]) for j in range(block)]
        sum_norm = luxemburg_norm(f, StepFunction(space, np.full(block, u)))
    meta = {
        "n": n, "p": p, "s": s, "base": base, "a_n": a, "u_n": u, "block_size": block, "cell_measure": mu,
        "power_sum": block * cell_norm ** p, "power_sum_bound": 2.0 * 2.0 ** (-n * p / s),
        "sum_modular": float(block * np.exp(f.log_value(x) - lv)),
    }
    return WitnessFamily("type_failure", space, vectors, True, np.array([cell_norm]), np.array([block]),
                         sum_norm, meta)


def build_linfty_witness(
    f: OrliczFunction,
    m: int,
    regime: Regime = Regime.large(1.0),
    levels: int = 30,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> WitnessFamily:
    """``m`` disjoint functions spanning an almost isometric copy of ``l_inf^m``.

    Level ``k = 1..levels`` needs ``phi((1 + 1/k) u_k) >= 2**k phi(u_k)``,
    searched monotonically (upward, or downward for small arguments).  With
    cells ``A_k^i`` of measure ``2**-k / phi(u_k)`` the functions
    ``f_i = sum_{k > i} u_k 1_{A_k^i}`` have modular at most ``2**-i`` and norm
    in ``[1 - delta, 1]``, where ``delta`` (reported) shrinks as the number of
    levels grows.
    """
    if not (m >= 1 and levels > m):
        raise DomainError("need m >= 1 and more levels than functions")
    downward = regime.mode == "small"
    grid = regime_log_grid(regime, tol, wide=True)
    if downward:
        grid = grid[::-1]
    found = []
    pos = 0
    for k in range(1, levels + 1):
        lam = math.log1p(1.0 / k)
        with np.errstate(invalid="ignore", over="ignore"):
            gap = f.log_value(grid[pos:] + lam) - f.log_value(grid[pos:]) - k * math.log(2.0)
            logf = f.log_value(grid[pos:] + lam)
        ok = (gap >= 0) & np.isfinite(logf) & (logf < 700)
        if not ok.any():
            raise SearchFailed(
                f"no point with the level-{k} gap within the grid; the doubling condition may hold on {regime}"
            )
        j = pos + int(np.argmax(ok))
        found.append(float(grid[j]))
        pos = j
    xs = np.array(found)
    logf = f.log_value(xs)
    cells, coeff, owner = [], [], []
    for i in range(1, m + 1):
        for k in range(i + 1, levels + 1):
            cells.append(math.exp(-k * math.log(2.0) - logf[k - 1]))
            coeff.append(math.exp(xs[k - 1]))
            owner.append(i)
    space = MeasureSpace.step(np.array(cells))
    coeff, owner = np.array(coeff), np.array(owner)
    vectors = [StepFunction(space, np.where(owner == i, coeff, 0.0)) for i in range(1, m + 1)]
    norms = luxemburg_norm_batch(f, np.vstack([v.coeffs for v in vectors]), space.measures)
    modulars = np.array([modular(f, v) for v in vectors])
    sum_norm = luxemburg_norm(f, StepFunction(space, coeff))
    check = np.exp(f.log_value(np.log(coeff)) + np.log(space.measures))
    levels_of_cells = np.concatenate([np.arange(i + 1, levels + 1) for i in range(1, m + 1)])
    meta = {
        "m": m, "levels": levels, "u": np.exp(xs), "modulars": modulars,
        "delta": float(1.0 - norms.min()),
        "cell_equation_error": float(np.max(np.abs(check * 2.0 ** levels_of_cells - 1.0))),
    }
    values, counts = norms, np.ones(m)
    return WitnessFamily("linfty", space, vectors, True, values, counts, sum_norm, meta)
