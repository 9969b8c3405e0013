import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orlicz_kit import (
    DomainError,
    ExpMinusOne,
    IndexZeroError,
    LogPerturbedPower,
    MaxPowers,
    MinPowers,
    Power,
    Regime,
    SmallExtension,
    Table,
    ToleranceConfig,
    concavity_check,
    convexity_check,
    equivalence_check,
    evaluate,
    function_from_spec,
    halving_constant,
    inverse,
    power_compose,
)
from orlicz_kit.functions import PowerComposed, regime_grid, regime_log_grid

from conftest import SMALL_TOL, exponents, orlicz_functions, positive


# -- oracles ----------------------------------------------------------------


def test_max_powers_values():
    f = MaxPowers(1, 2)
    assert evaluate(f, [0.5, 2.0]) == pytest.approx([0.5, 4.0], rel=1e-15)
    assert evaluate(f, 0.0) == 0.0


def test_log_perturbed_power_at_inverse_e():
    f = LogPerturbedPower(2)
    assert float(f(1 / math.e)) == pytest.approx(math.exp(-2), rel=1e-13)
    assert float(f(0.0)) == 0.0


def test_exp_minus_one_small_argument_accuracy():
    f = ExpMinusOne()
    assert float(f(1e-12)) == pytest.approx(1e-12, rel=1e-12)
    assert float(f(1.0)) == pytest.approx(math.e - 1, rel=1e-15)


def test_inverse_values():
    assert inverse(MaxPowers(1, 2), 4.0) == pytest.approx(2.0, rel=1e-12)
    assert inverse(Power(2), 0.0) == 0.0
    assert inverse(Power(0.5), math.sqrt(2)) == pytest.approx(2.0, rel=1e-12)


def test_negative_argument_rejected():
    with pytest.raises(DomainError):
        evaluate(Power(2), -1.0)
    with pytest.raises(DomainError):
        inverse(Power(2), -1.0)


def test_invalid_parameters_rejected():
    with pytest.raises(DomainError):
        Power(0)
    with pytest.raises(DomainError):
        MaxPowers(2, -1)
    with pytest.raises(DomainError):
        Table([1, 2, 3], [1, 1, 2])


def test_halving_constants():
    # u**p halves at K = 2**(1/p)
    assert halving_constant(Power(2)) == pytest.approx(math.sqrt(2), rel=1e-9)
    assert halving_constant(Power(1)) == pytest.approx(2, rel=1e-9)
    assert halving_constant(Power(0.5)) == pytest.approx(4, rel=1e-9)
    assert halving_constant(MaxPowers(1, 2)) == pytest.approx(2, rel=1e-9)


def test_halving_constant_fails_without_lower_growth():
    u = np.geomspace(1e-8, 1e8, 50)
    flat = Table(u, 1 + 1e-6 * np.arange(50))
    with pytest.raises(IndexZeroError):
        halving_constant(flat, Regime.all(), SMALL_TOL)


def test_power_compose_closed_forms():
    # composition is u -> f(u**(1/s))
    assert power_compose(Power(2), 2) == Power(1.0)
    assert power_compose(MaxPowers(1, 3), 0.5) == MaxPowers(2, 6)
    assert power_compose(Power(2), 1) == Power(2)
    lpp = LogPerturbedPower(2)
    g = power_compose(lpp, 3)
    assert isinstance(g, PowerComposed)
    assert float(g(0.2)) == pytest.approx(float(lpp(0.2 ** (1 / 3))), rel=1e-14)


def test_table_interpolates_power_laws_exactly():
    u = np.array([1e-2, 1.0, 1e2])
    t = Table(u, u ** 3)
    x = np.array([0.05, 0.3, 7.0])
    assert t.value(x) == pytest.approx(x ** 3, rel=1e-12)
    # boundary chords continue past the nodes
    assert float(t(1e4)) == pytest.approx(1e12, rel=1e-12)


def test_shape_checks():
    assert convexity_check(Power(2)).holds
    assert not convexity_check(Power(0.5)).holds
    assert concavity_check(Power(0.5)).holds
    assert convexity_check(ExpMinusOne(), Regime.large(1)).holds
    assert not convexity_check(MinPowers(1, 2)).holds


def test_equivalence_of_comparable_functions():
    eq = equivalence_check(MaxPowers(1, 2), Power(2), Regime.large(1))
    assert eq is not None
    assert eq.K1 == pytest.approx(1, rel=1e-6)
    assert eq.K2 >= 1
    assert equivalence_check(Power(1), Power(2)) is None


def test_regime_parse_round_trip():
    for r in (Regime.all(), Regime.large(2.5), Regime.small(0.25)):
        assert Regime.parse(str(r)) == r
    with pytest.raises(DomainError):
        Regime.parse("medium:1")


def test_small_regime_grid_ends_at_cutoff():
    g = regime_grid(Regime.small(0.3), SMALL_TOL)
    assert g[-1] == 0.3
    assert np.all(np.diff(g) > 0)


def test_wide_grid_nests_base_grid():
    base = regime_log_grid(Regime.all(), SMALL_TOL)
    wide = regime_log_grid(Regime.all(), SMALL_TOL, wide=True)
    assert wide[0] < base[0] and wide[-1] > base[-1]
    assert np.all(np.isin(np.round(base, 9), np.round(wide, 9)))


def test_small_extension_matches_on_small_and_is_continuous():
    f = LogPerturbedPower(2)
    v = 1 / math.e
    ext = SmallExtension(f, 3.0, v, float(f(v)) / v ** 3)
    u = np.array([0.01, 0.2, v])
    assert ext.value(u) == pytest.approx(f.value(u), rel=1e-13)
    assert float(ext(v * (1 + 1e-9))) == pytest.approx(float(f(v)), rel=1e-7)


# -- properties ---------------------------------------------------------------


@given(orlicz_functions(), positive, positive)
def test_monotone(f, a, b):
    lo, hi = sorted((a, b))
    assert f.value(lo) <= f.value(hi)


@given(orlicz_functions(with_exp=False), st.floats(min_value=1e-3, max_value=1e3))
def test_inverse_of_evaluate(f, u):
    assert inverse(f, float(f(u))) == pytest.approx(u, rel=1e-9)


@given(orlicz_functions(), exponents, st.floats(min_value=1e-2, max_value=10))
def test_compose_round_trip(f, s, u):
    g = power_compose(power_compose(f, s), 1 / s)
    assert float(g(u)) == pytest.approx(float(f(u)), rel=1e-9)


@given(orlicz_functions(), st.floats(min_value=0, max_value=1), positive, positive)
def test_two_point_subadditivity(f, lam, t, s):
    # monotonicity alone gives phi(lam t + (1-lam) s) <= phi(max) <= phi(t) + phi(s)
    lhs = float(f(lam * t + (1 - lam) * s))
    assert lhs <= (float(f(t)) + float(f(s))) * (1 + 1e-12)


@given(orlicz_functions())
@settings(max_examples=30)
def test_json_round_trip(f):
    g = function_from_spec(f.to_spec())
    u = np.geomspace(1e-3, 1e3, 17)
    assert g.value(u) == pytest.approx(f.value(u), rel=1e-14)


@given(exponents, exponents)
@settings(max_examples=30)
def test_power_equivalence_only_for_equal_exponents(p, q):
    eq = equivalence_check(Power(p), Power(q), Regime.all(), SMALL_TOL)
    if abs(p - q) > 0.05:
        assert eq is None
    if p == q:
        assert eq is not None and eq.K1 == pytest.approx(1) and eq.K2 == pytest.approx(1)


def integral_minorant_of_min_powers(u):
    """int_0^u min(t, t**2)/t dt in closed form."""
    u = np.asarray(u, dtype=float)
    return np.where(u <= 1, u ** 2 / 2, u - 0.5)


def test_more_compose_examples():
    assert power_compose(Power(1), 0.5) == Power(2.0)
    assert power_compose(MaxPowers(1, 2), 2) == MaxPowers(0.5, 1.0)


def test_min_powers_nonconvex_near_one():
    rep = convexity_check(MinPowers(1, 2))
    assert not rep.holds
    assert 0.5 < rep.witness < 2.0


def test_integral_minorant_is_equivalent():
    f = MinPowers(1, 2)
    u = np.geomspace(1e-6, 1e6, 400)
    phi_int = Table(u, integral_minorant_of_min_powers(u))
    x = np.geomspace(1e-5, 1e5, 300)
    Phi = phi_int.value(x)
    assert np.all(f.value(x / 2) <= Phi * (1 + 1e-9))
    assert np.all(Phi <= f.value(x) * (1 + 1e-9))
    assert equivalence_check(f, phi_int, Regime.all(), SMALL_TOL) is not None
