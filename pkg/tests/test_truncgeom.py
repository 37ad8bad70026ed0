"""Truncated shifted geometric law: exact quantiles and domination."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wanderlines.truncgeom import TruncGeom, quantile_array


def test_pmf_sums_to_one_on_finite_window():
    d = TruncGeom(2, 7, 0.6)
    assert sum(d.pmf(x) for x in range(2, 8)) == pytest.approx(1.0)
    assert d.pmf(1) == 0.0 and d.pmf(8) == 0.0


def test_cdf_matches_cumulative_pmf():
    d = TruncGeom(0, 5, 0.3)
    acc = 0.0
    for x in range(0, 6):
        acc += d.pmf(x)
        assert d.cdf(x) == pytest.approx(acc)
    assert d.cdf(-1) == 0.0 and d.cdf(99) == 1.0


def test_point_mass_cases():
    assert TruncGeom(3, 3, 0.5).quantile(0.9) == 3
    assert TruncGeom(4, math.inf, 0.0).quantile(0.001) == 4


def test_validation_errors():
    with pytest.raises(ValueError):
        TruncGeom(0, 5, 1.0)
    with pytest.raises(ValueError):
        TruncGeom(5, 2, 0.3)
    with pytest.raises(ValueError):
        TruncGeom(0, 2.5, 0.3)


@settings(max_examples=300, deadline=None)
@given(
    a=st.integers(-5, 20),
    width=st.one_of(st.none(), st.integers(0, 40)),
    q=st.floats(0.0, 0.999, allow_nan=False),
    u=st.floats(1e-12, 1.0, exclude_max=True),
    t=st.integers(-10, 80),
)
def test_quantile_cdf_inversion_property(a, width, q, u, t):
    b = math.inf if width is None else a + width
    d = TruncGeom(a, b, q)
    # generalized-inverse equivalence: Q(u) <= t  <=>  u <= F(t)
    assert (d.quantile(u) <= t) == (u <= d.cdf(t))


@settings(max_examples=200, deadline=None)
@given(
    a1=st.integers(0, 10),
    da=st.integers(0, 5),
    w1=st.integers(0, 20),
    dw=st.integers(0, 10),
    q1=st.floats(0.0, 0.95),
    dq=st.floats(0.0, 0.04),
    u=st.floats(1e-9, 1.0, exclude_max=True),
)
def test_domination_implies_pathwise_monotone_quantiles(a1, da, w1, dw, q1, dq, u):
    d1 = TruncGeom(a1, a1 + w1, q1)
    d2 = TruncGeom(a1 + da, a1 + da + w1 + dw, min(q1 + dq, 0.9999))
    assert d1.dominates(d2)
    assert d1.quantile(u) <= d2.quantile(u)
    # cdf domination F2 <= F1 pointwise
    for t in range(a1 - 1, a1 + da + w1 + dw + 2):
        assert d2.cdf(t) <= d1.cdf(t) + 1e-12


def test_quantile_array_matches_scalar():
    rng = np.random.default_rng(5)
    a = rng.integers(0, 10, size=200)
    width = rng.integers(-1, 20, size=200)  # -1 encodes infinite cap
    b = np.where(width < 0, -1, a + width)
    q = rng.uniform(0.0, 0.99, size=200)
    u = rng.uniform(1e-9, 1.0 - 1e-9, size=200)
    got = quantile_array(a, b, q, u)
    for i in range(200):
        cap = math.inf if b[i] < 0 else int(b[i])
        assert got[i] == TruncGeom(int(a[i]), cap, float(q[i])).quantile(float(u[i]))
