import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from orlicz_kit import (
    ExpMinusOne,
    InstanceSpec,
    MaxPowers,
    MeasureSpace,
    Power,
    PreconditionError,
    Regime,
    SearchFailed,
    SizeError,
    StepFunction,
    build_linfty_witness,
    build_lower_estimate_witness,
    build_type_failure_witness,
    luxemburg_norm,
    modular,
    probe_concavity,
    probe_convexity,
    probe_cotype,
    probe_lower_estimate,
    probe_type,
    probe_upper_estimate,
    rademacher_average,
)
from orlicz_kit.geometry import (
    is_disjoint,
    khintchine_ratio,
    probe_ratio,
    rademacher_monte_carlo,
    sign_patterns,
    square_function_ratio,
)

from conftest import SMALL_TOL, orlicz_functions


def _family(rows, measures=None):
    rows = np.asarray(rows, dtype=float)
    space = MeasureSpace.discrete(rows.shape[1]) if measures is None else MeasureSpace.step(measures)
    return [StepFunction(space, r) for r in rows]


def test_sign_patterns():
    S = sign_patterns(4)
    assert S.shape == (8, 4)
    assert np.all(S[:, 0] == 1)
    assert len({tuple(r) for r in S}) == 8
    assert np.array_equal(sign_patterns(4, 2, 5), S[2:5])


def test_khintchine_two_terms():
    assert khintchine_ratio([1, 1], 1) == pytest.approx(1 / math.sqrt(2))
    assert khintchine_ratio([1, 2, 3], 2) == pytest.approx(1.0)


def test_l1_cotype_two_constant_of_hilbert_space():
    # two equal vectors: E||x1 +- x2|| = 1 but (||x1||**2 + ||x2||**2)**(1/2) = sqrt 2
    fam = _family([[1.0], [1.0]])
    assert probe_ratio(Power(2), "cotype", 2, fam, moment=1) == pytest.approx(math.sqrt(2), rel=1e-13)
    assert probe_ratio(Power(2), "cotype", 2, fam, moment=2) == pytest.approx(1.0, rel=1e-13)


def test_disjoint_sign_average_is_norm_of_sum():
    fam = _family([[1, 0, 0], [0, 2, 0], [0, 0, 2]])
    avg = rademacher_average(Power(2), fam)
    assert avg.mean == pytest.approx(3.0) and avg.min == avg.max
    full = rademacher_average(Power(2), fam, disjoint_shortcut=False)
    assert full.mean == pytest.approx(3.0, rel=1e-13)
    assert full.mean_square == pytest.approx(9.0, rel=1e-13)


def test_enumeration_cap():
    fam = _family(np.ones((5, 2)))
    with pytest.raises(SizeError):
        rademacher_average(Power(2), fam, cap=4)
    # disjoint families use the shortcut regardless of size
    assert rademacher_average(Power(1), _family(np.eye(30)), cap=4).mean == pytest.approx(30.0)


def test_monte_carlo_agrees_with_enumeration():
    rng = np.random.default_rng(3)
    fam = _family(rng.normal(size=(8, 5)))
    exact = rademacher_average(MaxPowers(1, 2), fam).mean
    mean, se = rademacher_monte_carlo(MaxPowers(1, 2), fam, samples=20000, seed=1)
    assert abs(mean - exact) < 5 * se


def test_square_function_ratio_in_hilbert_space():
    fam = _family(np.eye(4))
    assert square_function_ratio(Power(2), fam) == pytest.approx(1.0)


def test_estimate_probes_reject_overlapping_families():
    fam = _family([[1, 1], [1, 0]])
    with pytest.raises(PreconditionError):
        probe_upper_estimate(Power(2), 2, None, [fam])
    with pytest.raises(PreconditionError):
        probe_lower_estimate(Power(2), 2, InstanceSpec(count=3))


def test_hilbert_space_probes():
    spec = InstanceSpec(count=60, seed=2)
    f = Power(2)
    assert probe_type(f, 2, spec, moment=2).best_ratio == pytest.approx(1.0, rel=1e-9)
    assert probe_cotype(f, 2, spec, moment=2).best_ratio == pytest.approx(1.0, rel=1e-9)
    assert probe_convexity(f, 2, spec).best_ratio == pytest.approx(1.0, rel=1e-9)
    assert probe_concavity(f, 2, spec).best_ratio == pytest.approx(1.0, rel=1e-9)
    assert probe_upper_estimate(f, 2, spec.disjoint_only()).best_ratio == pytest.approx(1.0, rel=1e-9)


def test_probe_witness_reproduces_ratio():
    f = MaxPowers(1, 2)
    spec = InstanceSpec(count=40, seed=11)
    a = probe_type(f, 1.5, spec)
    b = probe_type(f, 1.5, spec)
    assert a.best_ratio == b.best_ratio
    assert probe_ratio(f, "type", 1.5, a.witness) == pytest.approx(a.best_ratio, rel=1e-14)
    assert a.best_ratio == pytest.approx(np.max(a.ratios))


def test_lower_estimate_witness_for_square():
    n = 6
    w = build_lower_estimate_witness(Power(2), 1.0, n)
    assert w.meta["a_n"] == 2 ** n and w.meta["u_n"] == 1.0
    assert w.size == 2 ** n and w.disjoint
    # recompute from the stored vectors
    norms = [luxemburg_norm(Power(2), x) for x in w.vectors]
    assert norms == pytest.approx(list(np.repeat(w.norm_values, w.norm_counts)), rel=1e-12)
    assert w.power_sum(1.0) >= 0.5
    total = StepFunction(w.space, np.sum([x.coeffs for x in w.vectors], axis=0))
    assert luxemburg_norm(Power(2), total) == pytest.approx(w.sum_norm, rel=1e-12)
    assert w.sum_norm == pytest.approx(2 ** (-n / 2), rel=1e-12)


def test_lower_estimate_witness_not_found_when_estimate_holds():
    with pytest.raises(SearchFailed):
        build_lower_estimate_witness(Power(1), 2.0, 3, tol=SMALL_TOL)


def test_type_failure_witness_for_l1():
    f = Power(1)
    for n in (1, 2, 3):
        w = build_type_failure_witness(f, 2.0, 1.0, n)
        assert w.meta["a_n"] == 4 ** n
        assert w.sum_norm == pytest.approx(1.0, rel=1e-12)
        assert w.power_sum(2.0) <= w.meta["power_sum_bound"] * (1 + 1e-12)
        assert w.meta["sum_modular"] >= 1 - 1e-12
        # type-2 ratio grows like 2**n
        assert probe_ratio(f, "type", 2.0, w) == pytest.approx(2.0 ** n, rel=1e-9)


def test_linfty_witness_for_exponential():
    f = ExpMinusOne()
    w = build_linfty_witness(f, 4)
    assert w.meta["cell_equation_error"] < 1e-9
    for i, (x, mod) in enumerate(zip(w.vectors, w.meta["modulars"]), start=1):
        assert mod <= 2.0 ** -i * (1 + 1e-9)
        assert modular(f, x) == pytest.approx(mod, rel=1e-12)
    assert np.all(w.norm_values <= 1 + 1e-12)
    assert np.all(w.norm_values >= 1 - w.meta["delta"] - 1e-12)
    assert w.meta["delta"] < 0.1
    assert w.sum_norm <= 1 + 1e-9


def test_linfty_witness_fails_for_doubling_function():
    with pytest.raises(SearchFailed):
        build_linfty_witness(Power(2), 3, tol=SMALL_TOL)


def test_cotype_blocks_of_max_powers_grow():
    f = MaxPowers(1, 2)
    ratios = [probe_ratio(f, "cotype", 1.5, build_lower_estimate_witness(f, 1.5, n)) for n in (4, 8)]
    assert ratios[1] > 2 * ratios[0]


# -- properties ---------------------------------------------------------------

families = arrays(float, st.tuples(st.integers(1, 5), st.integers(1, 4)),
                  elements=st.floats(-100, 100, allow_nan=False))


@given(orlicz_functions(with_exp=False), families, st.integers(0, 31))
@settings(max_examples=40)
def test_sign_symmetry(f, X, flips):
    # flipping the sign of any member permutes the sign vectors
    Y = X * np.where((flips >> np.arange(X.shape[0])) & 1, -1.0, 1.0)[:, None]
    a = rademacher_average(f, _family(X), disjoint_shortcut=False)
    b = rademacher_average(f, _family(Y), disjoint_shortcut=False)
    assert b.mean == pytest.approx(a.mean, rel=1e-9, abs=1e-300)
    assert b.max == pytest.approx(a.max, rel=1e-9, abs=1e-300)


@given(orlicz_functions(with_exp=False), families)
@settings(max_examples=40)
def test_shortcut_matches_enumeration_on_disjoint(f, X):
    k, cells = X.shape
    D = np.zeros((k, k * cells))
    for i in range(k):
        D[i, i * cells:(i + 1) * cells] = X[i]
    fam = _family(D)
    assert is_disjoint(fam)
    a = rademacher_average(f, fam)
    b = rademacher_average(f, fam, disjoint_shortcut=False)
    assert a.mean == pytest.approx(b.mean, rel=1e-9, abs=1e-300)


@given(st.floats(0.5, 3), st.floats(1, 3), st.floats(0, 2), st.integers(0, 1000))
@settings(max_examples=30)
def test_cotype_ratio_non_increasing_in_q(p, q, dq, seed):
    rng = np.random.default_rng(seed)
    fam = _family(rng.normal(size=(4, 3)) + 0.1)
    f = Power(p)
    r1 = probe_ratio(f, "cotype", q, fam)
    r2 = probe_ratio(f, "cotype", q + dq, fam)
    assert r2 <= r1 * (1 + 1e-12)


def test_sign_average_examples():
    fam = _family(np.eye(2))
    full = rademacher_average(Power(2), fam, disjoint_shortcut=False)
    assert full.mean == pytest.approx(math.sqrt(2)) and full.min == pytest.approx(full.max)
    x = _family([[1.0, -3.0]], [0.5, 2.0])
    assert rademacher_average(MaxPowers(1, 2), x).mean == pytest.approx(luxemburg_norm(MaxPowers(1, 2), x[0]))
    assert khintchine_ratio([1.0], 3.0) == pytest.approx(1.0)


def test_linfty_witness_sign_average_and_cotype_growth():
    f = ExpMinusOne()
    ratios = []
    for m in (2, 4, 8):
        w = build_linfty_witness(f, m)
        avg = rademacher_average(f, w.vectors, disjoint_shortcut=False)
        assert avg.mean == pytest.approx(1.0, abs=0.05)
        ratios.append(probe_ratio(f, "cotype", 2.0, w))
    # grows like m**(1/2)
    assert ratios == pytest.approx([math.sqrt(2), 2.0, math.sqrt(8)], rel=0.1)


def test_witness_cells_satisfy_defining_equalities():
    f = MaxPowers(1, 2)
    w = build_lower_estimate_witness(f, 1.5, 2)
    assert w.vectors is not None
    assert w.meta["cell_modular"] == pytest.approx(1.0, rel=1e-9)
    a, u = w.meta["a_n"], w.meta["u_n"]
    # mu(A_i) = 1 / phi(a**(1/q) u)
    assert float(f(a ** (1 / 1.5) * u)) * w.meta["cell_measure"] == pytest.approx(1.0, rel=1e-9)
    for x in w.vectors:
        assert modular(f, x) == pytest.approx(float(f(u)) * w.meta["cell_measure"], rel=1e-12)
    # too long to store: norms come from one cell and stay exact
    big = build_lower_estimate_witness(f, 1.5, 4)
    assert big.vectors is None and big.size == 4096
    assert big.power_sum(1.5) == pytest.approx(1.0, rel=1e-9)
    t = build_type_failure_witness(Power(1), 2.0, 1.0, 3)
    lv = float(Power(1)(2 ** 3 * math.sqrt(t.meta["a_n"]) * t.meta["u_n"]))
    assert lv * t.meta["cell_measure"] == pytest.approx(1.0, rel=1e-9)


def test_type_failure_search_fails_when_lower_growth_holds():
    with pytest.raises(SearchFailed):
        build_type_failure_witness(Power(2), 2.0, 2.0, 2, tol=SMALL_TOL)


def test_l1_and_estimate_probes():
    spec = InstanceSpec(count=80, seed=6)
    assert probe_type(Power(1), 1.0, spec).best_ratio <= 1 + 1e-9
    assert probe_upper_estimate(Power(3), 3.0, spec.disjoint_only()).best_ratio == pytest.approx(1.0)
    assert probe_lower_estimate(Power(3), 3.0, spec.disjoint_only()).best_ratio == pytest.approx(1.0)
    assert probe_upper_estimate(MaxPowers(1, 2), 1.0, spec.disjoint_only()).best_ratio <= 10


def test_lower_estimate_ratio_diverges_along_blocks():
    f = MaxPowers(1, 2)
    r = [probe_ratio(f, "lower_estimate", 1.5, build_lower_estimate_witness(f, 1.5, n)) for n in (2, 6, 10)]
    assert r[0] < r[1] < r[2] and r[2] > 10


def test_square_function_bounds_for_convex_concave_norm():
    # 1-convex and 2-concave: the sign average is comparable to the square function
    f = MaxPowers(1, 2)
    rng = np.random.default_rng(9)
    for _ in range(20):
        fam = _family(rng.normal(size=(5, 6)) * 10 ** rng.uniform(-2, 2, (5, 1)))
        r = square_function_ratio(f, fam)
        assert 1 / math.sqrt(2) - 1e-12 <= r <= math.sqrt(2) + 1e-12


@given(st.floats(0.5, 3), st.floats(1, 3), st.floats(0, 2), st.integers(0, 1000))
@settings(max_examples=30)
def test_type_ratio_non_decreasing_in_p(p, e, de, seed):
    rng = np.random.default_rng(seed)
    fam = _family(rng.normal(size=(4, 3)) + 0.1)
    f = Power(p)
    assert probe_ratio(f, "type", e + de, fam) >= probe_ratio(f, "type", e, fam) * (1 - 1e-12)
