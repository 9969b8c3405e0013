import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orlicz_kit import (
    ExpMinusOne,
    MaxPowers,
    Power,
    PreconditionError,
    Regime,
    Table,
    ToleranceConfig,
    biconjugate,
    convexity_check,
    duality_transfer_check,
    young_conjugate,
)
from orlicz_kit.conjugation import power_table

TOL = ToleranceConfig(grid_points=512, grid_span=(1e-4, 1e4))


def test_power_table_conjugates_to_dual_power():
    c = young_conjugate(power_table(3.0, TOL), TOL)
    ok = c.resolved & (c.u > 0)
    q = 1.5
    assert c.values[ok] == pytest.approx(c.u[ok] ** q / q, rel=1e-9)


def test_square_is_self_conjugate_up_to_factor():
    # (u**2)* = u**2 / 4
    c = young_conjugate(Power(2), TOL)
    ok = c.resolved & (c.u > 0)
    assert c.values[ok] == pytest.approx(c.u[ok] ** 2 / 4, rel=1e-9)
    assert np.all(c.resolved)


def test_unreachable_slopes_are_flagged_growing():
    # the slope of u**1.2 at the top node is about 7.2, so larger duals keep growing
    c = young_conjugate(Power(1.2), TOL)
    top_slope = 1.2 * 1e4 ** 0.2
    assert np.all(c.resolved[c.u < 0.99 * top_slope])
    assert not np.any(c.resolved[c.u > 1.01 * top_slope])
    assert np.all(np.isnan(c.values[~c.resolved]))


def test_linear_function_has_finite_domain():
    c = young_conjugate(Power(1), TOL)
    assert c.u_inf == pytest.approx(1.0)
    assert np.all(c.values[c.resolved] == pytest.approx(0.0, abs=1e-12))
    assert c.to_spec()["u_inf"] == pytest.approx(1.0)


def test_superlinear_has_infinite_domain_edge():
    assert young_conjugate(ExpMinusOne(), TOL).u_inf == math.inf


def test_biconjugate_recovers_convex_function():
    b = biconjugate(MaxPowers(1.5, 3), TOL)
    assert b.minorant_holds
    assert b.convex_input
    assert b.gap_holds
    assert b.max_rel_gap < 1e-4


def test_biconjugate_of_concave_function_is_a_minorant():
    b = biconjugate(Power(0.5), TOL)
    assert b.minorant_holds
    assert not b.convex_input
    assert b.gap_holds is None
    assert np.all(b.values <= b.phi * (1 + 1e-9) + 1e-12)


def test_duality_transfer_for_powers():
    rep = duality_transfer_check(power_table(2.0, TOL), 2.0, TOL)
    assert rep.q == 2.0
    assert rep.primal.holds and rep.dual.holds
    assert rep.agree
    assert rep.dual_dilation == pytest.approx(rep.primal.witness[0])


def test_duality_transfer_preconditions():
    with pytest.raises(PreconditionError):
        duality_transfer_check(Power(2), 1.0, TOL)
    with pytest.raises(PreconditionError):
        duality_transfer_check(Power(0.5), 2.0, TOL)


def test_conjugate_at_matches_table():
    c = young_conjugate(Power(3), TOL)
    idx = np.flatnonzero(c.resolved)[10:400:37]
    assert c.at(c.u[idx]) == pytest.approx(c.values[idx], rel=1e-12)


convex_kinds = st.builds(
    lambda p, d: MaxPowers(p, p + d),
    st.floats(min_value=1.05, max_value=3),
    st.floats(min_value=0, max_value=1.5),
)


@given(convex_kinds, st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-3, max_value=10))
@settings(max_examples=40)
def test_young_inequality(f, u, v):
    c = young_conjugate(f, TOL)
    cv = c.at(v)[0]
    if np.isfinite(cv):
        assert u * v <= float(f(u)) + cv + 1e-9 * (1 + u * v)


@given(st.floats(min_value=1.1, max_value=3), st.floats(min_value=0.1, max_value=2))
@settings(max_examples=20)
def test_order_reversal(p, d):
    # u**p <= max(u**p, u**(p+d)) pointwise, so the conjugates compare the other way
    small = young_conjugate(Power(p), TOL)
    big = young_conjugate(MaxPowers(p, p + d), TOL)
    v = np.geomspace(1e-2, 1e2, 25)
    a, b = small.at(v), big.at(v)
    ok = np.isfinite(a) & np.isfinite(b)
    assert np.all(b[ok] <= a[ok] * (1 + 1e-12) + 1e-15)


@given(convex_kinds)
@settings(max_examples=15)
def test_conjugate_is_convex(f):
    g = young_conjugate(f, TOL).as_function()
    assert convexity_check(g, Regime.all(), TOL.with_span(g.u[0], g.u[-1])).holds


def test_self_conjugate_half_square():
    c = young_conjugate(power_table(2.0, TOL), TOL)
    assert c.at(1.0)[0] == pytest.approx(0.5, abs=1e-6)


def test_biconjugate_of_min_powers_and_integral_minorant():
    from orlicz_kit import MinPowers

    b = biconjugate(MinPowers(1, 2), TOL)
    u = b.u[(b.u > 1e-3) & (b.u < 1e3)]
    bb = b.as_function()
    Phi = np.where(u <= 1, u ** 2 / 2, u - 0.5)
    # the largest convex minorant of min(u, u**2) is u**2 up to 1/2, then u - 1/4
    closed = np.where(u <= 0.5, u ** 2, u - 0.25)
    assert bb.value(u) == pytest.approx(closed, rel=1e-4)
    assert np.all(bb.value(u / 2) <= Phi * (1 + 1e-6))
    assert np.all(Phi <= bb.value(u) * (1 + 1e-6))


def test_duality_on_cubic_and_log_growth():
    rep = duality_transfer_check(power_table(3.0, TOL), 3.0, TOL)
    assert rep.q == pytest.approx(1.5)
    assert rep.primal.holds and rep.dual.holds
    u = np.geomspace(1e-4, 1e4, 512)
    ulog = Table(u, u * np.log1p(u))
    rep = duality_transfer_check(ulog, 2.0, TOL)
    assert not rep.primal.holds and not rep.dual.holds and rep.agree
