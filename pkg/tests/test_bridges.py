"""Brownian bridges, avoidance sampling, and Gibbs diagnostics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wanderlines.bridges import (
    BridgeSpec,
    RejectionBudgetExceeded,
    bridge_crossing_estimate,
    crossing_probability,
    gibbs_resample_check,
    sample_avoiding,
    sample_bridge,
    time_grid,
)


def test_time_grid_resolution():
    grid = time_grid(0.0, 2.0, resolution=4)
    assert grid[0] == 0.0 and grid[-1] == 2.0
    assert len(grid) == 9
    assert np.allclose(np.diff(grid), 0.25)


def test_bridge_hits_endpoints_exactly():
    grid = time_grid(1.0, 3.0, resolution=16)
    rng = np.random.default_rng(0)
    path = sample_bridge(1.0, 3.0, 0.7, -0.4, grid, rng)
    assert path[0] == pytest.approx(0.7)
    assert path[-1] == pytest.approx(-0.4)


def test_bridge_midpoint_moments():
    # B(mid) ~ Normal((x + y)/2, (b - a)/4) for a standard bridge
    grid = time_grid(0.0, 1.0, resolution=16)
    rng = np.random.default_rng(7)
    n = 4000
    mids = np.array([sample_bridge(0.0, 1.0, 1.0, 2.0, grid, rng)[len(grid) // 2]
                     for _ in range(n)])
    assert np.mean(mids) == pytest.approx(1.5, abs=4 * 0.5 / math.sqrt(n))
    assert np.var(mids) == pytest.approx(0.25, rel=0.15)


def test_bridge_spec_validation():
    with pytest.raises(ValueError):
        BridgeSpec(a=1.0, b=0.0, x=(1.0,), y=(0.0,))
    with pytest.raises(ValueError):
        BridgeSpec(a=0.0, b=1.0, x=(0.0, 1.0), y=(1.0, 0.0))  # not decreasing
    with pytest.raises(ValueError):
        BridgeSpec(a=0.0, b=1.0, x=(2.0,), y=(1.0,), f=0.5)  # barrier below start


def test_sample_avoiding_orders_curves():
    spec = BridgeSpec(a=0.0, b=1.0, x=(10.0, 0.0), y=(10.0, 0.0), resolution=32)
    rng = np.random.default_rng(3)
    grid, curves = sample_avoiding(spec, rng)
    assert curves.shape == (2, len(grid))
    assert np.all(curves[0] > curves[1])


def test_sample_avoiding_budget_exceeded():
    # nearly touching endpoints: acceptance is hopeless within 5 attempts
    spec = BridgeSpec(a=0.0, b=1.0, x=(1e-4, 0.0), y=(1e-4, 0.0), resolution=32)
    rng = np.random.default_rng(5)
    with pytest.raises(RejectionBudgetExceeded) as info:
        sample_avoiding(spec, rng, max_attempts=5)
    assert info.value.attempts == 5


def test_crossing_probability_formula():
    # reflection principle: P(cross) = exp(-2 d1 d2 / (sigma^2 (b-a)))
    assert crossing_probability(1.0, 1.0, 1.0) == pytest.approx(math.exp(-2.0))
    assert crossing_probability(1.0, 1.0, 1.0, diffusion=2.0) == pytest.approx(
        math.exp(-1.0))
    assert crossing_probability(0.0, 1.0, 1.0) == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(
    d1=st.floats(0.01, 5.0),
    d2=st.floats(0.01, 5.0),
    bump=st.floats(0.0, 3.0),
)
def test_crossing_probability_decreases_with_separation(d1, d2, bump):
    base = crossing_probability(d1, d2, 1.0)
    wider = crossing_probability(d1 + bump, d2, 1.0)
    assert wider <= base + 1e-12
    assert 0.0 <= base <= 1.0


def test_bridge_crossing_estimate_limits():
    grid = time_grid(0.0, 1.0, resolution=8)
    touching = np.zeros(len(grid)) + 1.0
    touching[3] = -0.1
    assert bridge_crossing_estimate(touching, grid) == 1.0
    wide = np.full(len(grid), 50.0)
    assert bridge_crossing_estimate(wide, grid) == pytest.approx(0.0, abs=1e-12)


def test_bridge_crossing_estimate_is_unbiased_for_two_bridges():
    # two independent standard bridges with endpoint gaps d1, d2: the gap
    # process is a bridge with diffusion 2, so P(cross) = exp(-d1 d2)
    rng = np.random.default_rng(21)
    a, b, d1, d2 = 0.0, 1.0, 1.0, 1.0
    grid = time_grid(a, b, resolution=64)
    n = 4000
    est = np.empty(n)
    for i in range(n):
        hi = sample_bridge(a, b, d1, d2, grid, rng)
        lo = sample_bridge(a, b, 0.0, 0.0, grid, rng)
        est[i] = bridge_crossing_estimate(hi - lo, grid, diffusion=2.0)
    predicted = math.exp(-d1 * d2)
    se = np.std(est, ddof=1) / math.sqrt(n)
    assert abs(np.mean(est) - predicted) <= 4 * se


def test_gibbs_resample_check_reports_per_curve_stats():
    spec = BridgeSpec(a=0.0, b=1.0, x=(4.0, 0.0), y=(4.0, 0.0), resolution=32)
    rng = np.random.default_rng(11)
    samples = []
    grid = spec.grid()
    for _ in range(60):
        _, curves = sample_avoiding(spec, rng)
        samples.append(curves)
    res = gibbs_resample_check(np.asarray(samples), grid, 1, 2, (0.25, 0.75),
                               rng, resolution=32)
    assert res["replicates"] == 60
    assert len(res["per_curve"]) == 2
    assert 0.0 <= res["min_p"] <= 1.0
