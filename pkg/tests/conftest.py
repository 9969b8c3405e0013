import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from orlicz_kit import (
    ExpMinusOne,
    LogPerturbedPower,
    MaxPowers,
    MinPowers,
    Power,
    Table,
    ToleranceConfig,
)

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# coarse grid for property tests that sweep a whole regime
SMALL_TOL = ToleranceConfig(grid_points=256, grid_span=(1e-6, 1e6))

exponents = st.floats(min_value=0.3, max_value=4.0, allow_nan=False)
positive = st.floats(min_value=1e-4, max_value=1e4, allow_nan=False)


@st.composite
def orlicz_functions(draw, with_exp=True):
    """A random function of one of the closed-form kinds or a table."""
    kind = draw(st.sampled_from(["power", "max", "min", "lpp", "exp", "table"] if with_exp
                                else ["power", "max", "min", "lpp", "table"]))
    if kind == "power":
        return Power(draw(exponents))
    if kind in ("max", "min"):
        p = draw(exponents)
        q = draw(st.floats(min_value=p, max_value=p + 3))
        return MaxPowers(p, q) if kind == "max" else MinPowers(p, q)
    if kind == "lpp":
        return LogPerturbedPower(draw(st.floats(min_value=1.0, max_value=4.0)))
    if kind == "exp":
        return ExpMinusOne()
    p = draw(exponents)
    q = draw(st.floats(min_value=p, max_value=p + 2))
    u = np.geomspace(1e-3, 1e3, 40)
    return Table(u, MaxPowers(p, q).value(u))


@pytest.fixture
def small_tol():
    return SMALL_TOL
