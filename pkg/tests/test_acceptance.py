"""End-to-end acceptance suite.

Each test covers one acceptance property of the toolkit, from exact
quantile inversion through sampling laws, couplings, kernel oracles,
moment limits, the slope experiment, and the Gibbs diagnostics.
"""

import math

import numpy as np
import pytest
from scipy.special import airy

from wanderlines import _engine, scaling
from wanderlines.bridges import (
    BridgeSpec,
    bridge_crossing_estimate,
    gibbs_resample_check,
    sample_avoiding,
    sample_bridge,
    time_grid,
)
from wanderlines.kernel import KernelQuery, kernel, kernel_value
from wanderlines.moments import (
    first_moment,
    first_moment_expanded,
    flat_first_moment,
    gap_probability,
    second_factorial_moment,
)
from wanderlines.params import ParamSet
from wanderlines.partitions import canonical, enumerate_support
from wanderlines.sampler import (
    NoiseField,
    SamplerConfig,
    check_hypothesis,
    mix_seed,
    sample_schur,
)
from wanderlines.truncgeom import TruncGeom, quantile_array


# -- 1. exact quantile inversion --------------------------------------------

def test_quantile_exactness_ten_thousand_triples():
    rng = np.random.default_rng(101)
    n = 10_000
    a = rng.integers(-10, 20, size=n)
    width = rng.integers(-1, 40, size=n)  # -1 encodes an infinite cap
    b = np.where(width < 0, -1, a + width)
    q = rng.uniform(0.0, 0.999, size=n)
    u = rng.uniform(1e-12, 1.0 - 1e-12, size=n)
    t = rng.integers(-15, 70, size=n)
    Q = quantile_array(a, b, q, u)
    # Q(u) <= t  <=>  u <= F(t), checked through the scalar cdf
    for i in range(n):
        cap = math.inf if b[i] < 0 else int(b[i])
        d = TruncGeom(int(a[i]), cap, float(q[i]))
        assert (Q[i] <= t[i]) == (u[i] <= d.cdf(int(t[i])))


# -- 2. monotone-coupling suite ----------------------------------------------

def test_domination_suite_thousand_pairs():
    rng = np.random.default_rng(202)
    n_pairs, n_unif = 1000, 1000
    u = rng.uniform(1e-9, 1.0 - 1e-9, size=n_unif)
    for _ in range(n_pairs):
        a1 = int(rng.integers(0, 10))
        da = int(rng.integers(0, 4))
        w1 = int(rng.integers(-1, 15))
        dw = int(rng.integers(0, 8))
        q1 = float(rng.uniform(0.0, 0.95))
        q2 = min(q1 + float(rng.uniform(0.0, 0.04)), 0.999)
        if w1 < 0:
            b1, b2 = -1, -1
            cap1 = cap2 = math.inf
        else:
            b1 = a1 + w1
            b2 = a1 + da + w1 + dw
            cap1, cap2 = b1, b2
        d1 = TruncGeom(a1, cap1, q1)
        d2 = TruncGeom(a1 + da, cap2, q2)
        assert d1.dominates(d2)
        q1v = quantile_array(a1, b1, q1, u)
        q2v = quantile_array(a1 + da, b2, q2, u)
        assert np.all(q1v <= q2v)
        # cdf domination F2 <= F1 on a spanning integer window
        hi = (a1 + da + max(w1, 0) + dw) + 2
        for x in range(a1 - 1, hi):
            assert d2.cdf(x) <= d1.cdf(x) + 1e-12


# -- 3. sampler law against exact enumeration --------------------------------

def test_sampler_total_variation_against_enumeration():
    X, Y = (0.3, 0.4), (0.2, 0.5)
    cap = 8
    support = enumerate_support(2, list(X), list(Y), cap=cap)
    probs = {seq: p for seq, p in support}
    z = sum(probs.values())

    n = 1_000_000
    x_arr, y_arr = np.array(X), np.array(Y)
    counts: dict = {}
    kept = 0
    for r in range(n):
        out = _engine.push_block(x_arr, y_arr, mix_seed(303, r))
        key = (canonical(out[0]), canonical(out[1]))
        if max((key[0] + key[1]) or (0,)) <= cap:
            counts[key] = counts.get(key, 0) + 1
            kept += 1
    tv = 0.0
    for seq, p in probs.items():
        emp = counts.pop(seq, 0) / kept
        tv += abs(emp - p / z)
    tv += sum(c / kept for c in counts.values())  # sampled but unenumerated
    assert tv / 2.0 <= 0.01


# -- 4. coupled domination at the prelimit level ------------------------------

def test_coupling_zero_violations_at_n_500():
    N = 500
    q = 0.5
    p_big = ParamSet(a_plus=(2.0, 1.0), b_plus=(1.0,))
    p_small = ParamSet(a_plus=(1.0,))
    Xb, Yb, _, _ = scaling.build_parameter_sequences(p_big, q, N)
    Xs, Ys, _, _ = scaling.build_parameter_sequences(p_small, q, N)

    # hypothesis for the unshifted (small below big) coupling and for the
    # index-shifted one (big, shifted by one, below small)
    assert check_hypothesis(Xs, Ys, Xb, Yb, 0, 0)
    assert check_hypothesis(Xb, Yb, Xs, Ys, 1, 1)

    def draws(seed, K):
        big = _engine.push_block(Xb, Yb, seed, max_parts=K + 1)
        small0 = _engine.push_block(Xs, Ys, seed, max_parts=K)
        small1 = _engine.push_block(Xs, Ys, seed, nshift=1, mshift=1,
                                    kshift=1, max_parts=K)
        return big, small0, small1

    coupling_paths_differ = False
    for r in range(10_000):
        big, small0, small1 = draws(mix_seed(404, r), 1)
        # A = B = 0: the richer ensemble dominates curve-by-curve
        assert np.all(small0[:, 0] <= big[:, 0])
        # A = B = 1: the big ensemble shifted down one index is dominated
        assert np.all(big[1:, 1] <= small1[:-1, 0])
        if not coupling_paths_differ and not np.array_equal(small0, small1):
            coupling_paths_differ = True
    assert coupling_paths_differ  # the two couplings are genuinely different

    # full-depth spot checks
    for r in range(50):
        big, small0, small1 = draws(mix_seed(405, r), 15)
        assert np.all(small0 <= big[:, :15])
        assert np.all(big[1:, 1:] <= small1[:-1, :])


# -- 5. kernel anchor invariance ----------------------------------------------

def test_kernel_anchor_invariance():
    p = ParamSet(a_plus=(2.0, 1.0), b_plus=(1.0,))
    queries = [
        (0.0, 0.0, 0.0, 0.5),
        (0.3, -0.2, 0.3, 0.4),
        (-0.2, 0.1, 0.4, -0.3),
        (0.1, 0.5, 0.2, 0.5),
        (-0.4, -0.1, -0.1, 0.2),
    ]
    anchor_pairs = [(0.05, 0.0), (0.0, -0.4), (-0.3, 0.3)]
    for t1, x1, t2, x2 in queries:
        vals = [
            complex(kernel(KernelQuery(t1=t1, x1=x1, t2=t2, x2=x2,
                                       alpha=al, beta=be), p))
            for al, be in anchor_pairs
        ]
        scale = max(1e-30, max(abs(v) for v in vals))
        spread = max(abs(v - vals[0]) for v in vals)
        assert spread / scale <= 1e-6


# -- 6. Airy-kernel oracle ------------------------------------------------------

def test_zero_parameter_kernel_matches_airy_oracle_on_grid():
    xs = np.linspace(-2.0, 2.0, 5)
    p0 = ParamSet()
    for x in xs:
        for y in xs:
            ai_x, aip_x, _, _ = airy(x)
            ai_y, aip_y, _, _ = airy(y)
            if x == y:
                oracle = aip_x ** 2 - x * ai_x ** 2
            else:
                oracle = (ai_x * aip_y - aip_x * ai_y) / (x - y)
            got = kernel_value(p0, 0.0, float(x), 0.0, float(y))
            assert abs(got - oracle) <= 1e-6


# -- 7. translation and reflection identities ----------------------------------

def test_symmetry_identities_on_randomized_queries():
    p = ParamSet(a_plus=(2.0, 1.0), b_plus=(1.0,))
    pr = p.reflected()
    rng = np.random.default_rng(707)
    for _ in range(8):
        t1, t2 = sorted(rng.uniform(-0.4, 0.4, size=2))
        x1, x2 = rng.uniform(-0.8, 0.8, size=2)
        v = float(rng.uniform(0.05, 0.5))
        base = kernel_value(p, t1, x1, t2, x2)
        scale = max(1.0, abs(base))
        # translation: K(t1, x1 - v; t2, x2 - v) = e^{v(t2-t1)} K_{c+v}(t1, x1; t2, x2)
        lhs = kernel_value(p, t1, x1 - v, t2, x2 - v)
        rhs = math.exp(v * (t2 - t1)) * kernel_value(
            p.translated(v), t1, x1, t2, x2)
        assert abs(lhs - rhs) <= 1e-6 * max(1.0, abs(lhs))
        # reflection: K(-t2, x2; -t1, x1) = K_{b,a,c}(t1, x1; t2, x2)
        lhs2 = kernel_value(p, -t2, x2, -t1, x1)
        rhs2 = kernel_value(pr, t1, x1, t2, x2)
        assert abs(lhs2 - rhs2) <= 1e-6 * scale


# -- 8. moment limits -----------------------------------------------------------

def test_first_and_second_moment_limits():
    p = ParamSet(a_plus=(1.0,))
    # inside the one-wanderer window (threshold below -2/a_1) the expected
    # count approaches 1 monotonically
    errs = [abs(first_moment(-3.0, t, p) - 1.0) for t in (2.0, 4.0, 6.0)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 0.05
    # at threshold -1 the window is empty and the count decays instead
    assert abs(first_moment(-1.0, 6.0, p)) <= 0.1
    # second factorial moment on the same window
    assert abs(second_factorial_moment(-3.0, -0.2, 6.0, p)) <= 0.05
    # expanded residue form agrees with direct quadrature throughout
    for alpha_hat, t in [(-3.0, 2.0), (-3.0, 4.0), (-3.0, 6.0), (-1.0, 4.0)]:
        d = first_moment(alpha_hat, t, p)
        e = first_moment_expanded(alpha_hat, t, p)
        assert abs(d - e) <= 1e-6 * max(1.0, abs(d))


# -- 9. flat-threshold moment -----------------------------------------------------

def test_flat_moment_counts_one_wanderer():
    p = ParamSet(a_plus=(1.0,))
    assert abs(flat_first_moment(5.0, 8.0, p) - 1.0) <= 0.05


# -- 10. gap-probability self-consistency ----------------------------------------

def test_gap_probability_stability_under_refinement():
    p0 = ParamSet()
    base = gap_probability(0.0, 0.0, p0)
    refined = gap_probability(0.0, 0.0, p0, order=14, grid_panels=10,
                              nodes_per_panel=24)
    assert abs(base - refined) <= 1e-4


# -- 11. slope experiment ----------------------------------------------------------

def test_slope_statistic_converges_to_wanderer_drift():
    p = ParamSet(a_plus=(1.0,))
    q, t = 0.5, 2.0
    reps = 200
    medians = {}
    drift_fits = []
    fit_ts = np.array([1.0, 1.5, 2.0])
    for N in (500, 1000, 2000):
        M = scaling.default_grid_length(N, t_max_airy=2.2, q=q)
        X, Y, _, _ = scaling.build_parameter_sequences(p, q, N, M)
        cfg = SamplerConfig(tuple(X), tuple(Y))
        stats = np.empty(reps)
        for r in range(reps):
            seq = sample_schur(cfg, NoiseField(mix_seed(1111, r)), max_parts=3)
            ens = scaling.embed_line_ensemble(seq, N, max_curves=3, q=q)
            airy_ens = scaling.to_airy(scaling.rescale(ens, q, N), q)
            stats[r] = scaling.slope_statistic(airy_ens, 1, t)
            if N == 2000:
                # second curve: parabola-removed values against time
                y = np.array([airy_ens.evaluate(2, s) - s * s for s in fit_ts])
                drift_fits.append(np.polyfit(fit_ts, y, 1)[0])
        medians[N] = float(np.median(stats))

    # medians approach -2 monotonically and land within +/- 0.4
    drift_fits = np.asarray(drift_fits)
    mean = drift_fits.mean()
    half = 2.0 * drift_fits.std(ddof=1) / math.sqrt(len(drift_fits))
    failures = []
    if not (abs(medians[1000] + 2.0) < abs(medians[500] + 2.0)
            and abs(medians[2000] + 2.0) < abs(medians[1000] + 2.0)):
        failures.append(f"medians not monotone toward -2: {medians}")
    if not abs(medians[2000] + 2.0) <= 0.4:
        failures.append(
            f"|median(N=2000) + 2| = {abs(medians[2000] + 2.0):.4f} > 0.4"
        )
    # the second curve is tight: fitted drift CI contains 0
    if not (mean - half <= 0.0 <= mean + half):
        failures.append(
            f"curve-2 drift CI [{mean - half:.4f}, {mean + half:.4f}] excludes 0"
        )
    assert not failures, "; ".join(failures)


# -- 12. Gibbs suite -----------------------------------------------------------------

def test_gibbs_fixed_point_and_crossing_estimator():
    # fixed point: resampling the interior of avoiding bridges leaves the
    # window marginals unchanged
    rng = np.random.default_rng(1212)
    spec = BridgeSpec(a=0.0, b=1.0, x=(2.0, 0.0), y=(2.0, 0.0), resolution=64)
    grid = spec.grid()
    samples = np.asarray([sample_avoiding(spec, rng)[1] for _ in range(400)])
    res = gibbs_resample_check(samples, grid, 1, 2, (0.25, 0.75), rng,
                               resolution=64)
    assert res["min_p"] > 0.01

    # crossing estimator for two independent bridges: the gap process has
    # diffusion coefficient 2, so P(cross) = exp(-2 d1 d2 / (2 (b - a)))
    d1, d2 = 1.0, 1.2
    cross_grid = time_grid(0.0, 1.0, resolution=128)
    n = 100_000
    est = np.empty(n)
    rng2 = np.random.default_rng(2121)
    for i in range(n):
        hi = sample_bridge(0.0, 1.0, d1, d2, cross_grid, rng2)
        lo = sample_bridge(0.0, 1.0, 0.0, 0.0, cross_grid, rng2)
        est[i] = bridge_crossing_estimate(hi - lo, cross_grid, diffusion=2.0)
    predicted = math.exp(-d1 * d2)
    se = float(np.std(est, ddof=1) / math.sqrt(n))
    assert abs(float(np.mean(est)) - predicted) <= 3.0 * se
