"""Push-block sampler: determinism, laws, interlacing, and couplings."""

import os
import subprocess
import sys

import numpy as np
import pytest

from wanderlines.partitions import interlaces
from wanderlines.sampler import (
    InvalidParams,
    NoiseField,
    SamplerConfig,
    check_hypothesis,
    coupling_violations,
    mix_seed,
    noise_at,
    sample_coupled,
    sample_schur,
    sample_sequence,
)


def test_invalid_params():
    with pytest.raises(InvalidParams):
        SamplerConfig((2.0,), (0.6,))
    with pytest.raises(InvalidParams):
        SamplerConfig((), (0.5,))
    with pytest.raises(InvalidParams):
        SamplerConfig((-0.1,), (0.5,))


def test_noise_is_deterministic_and_seed_sensitive():
    f = NoiseField(123)
    assert f.at(3, 4, 5) == f.at(3, 4, 5)
    assert 0.0 < f.at(3, 4, 5) < 1.0
    assert f.at(3, 4, 5) != f.at(3, 4, 6)
    assert NoiseField(124).at(3, 4, 5) != f.at(3, 4, 5)
    assert noise_at(f, 1, 2, 3) == f.at(1, 2, 3)


def test_shifted_view_reads_shifted_indices():
    f = NoiseField(9)
    g = f.shifted_view(2, 3)
    assert g(1, 1, 1) == f.at(1 + 2, 1 + 3, 1 + max(2, 3))


def test_mix_seed_distinct_replicates():
    seeds = {mix_seed(7, r) for r in range(1000)}
    assert len(seeds) == 1000


def test_sample_is_reproducible():
    cfg = SamplerConfig((0.3, 0.4), (0.2, 0.5))
    a = sample_schur(cfg, NoiseField(42))
    b = sample_schur(cfg, NoiseField(42))
    assert np.array_equal(a, b)


def test_single_level_law_is_geometric():
    # M = N = 1: the single part is geometric(x*y)
    q = 0.3 * 0.5
    cfg = SamplerConfig((0.3,), (0.5,))
    n = 20000
    draws = np.array(
        [sample_schur(cfg, NoiseField(mix_seed(11, r)))[0, 0] for r in range(n)]
    )
    for k in range(5):
        expected = (1 - q) * q ** k
        got = np.mean(draws == k)
        se = np.sqrt(expected * (1 - expected) / n)
        assert abs(got - expected) < 5 * se + 1e-9


def test_sequence_interlaces():
    cfg = SamplerConfig((0.5, 0.6, 0.4), (0.3, 0.5, 0.2))
    for r in range(50):
        seq = sample_sequence(cfg, NoiseField(mix_seed(3, r)))
        prev = ()
        for lam in seq:
            assert interlaces(lam, prev)
            prev = lam


def test_max_parts_is_a_prefix_of_the_full_sample():
    cfg = SamplerConfig((0.5, 0.6, 0.4), (0.3, 0.5, 0.2))
    full = sample_schur(cfg, NoiseField(8))
    top = sample_schur(cfg, NoiseField(8), max_parts=2)
    assert np.array_equal(top, full[:, :2])


def test_python_fallback_matches_numba_bitwise():
    code = (
        "import numpy as np\n"
        "from wanderlines.sampler import NoiseField, SamplerConfig, sample_schur\n"
        "cfg = SamplerConfig((0.3, 0.6, 0.4), (0.2, 0.5))\n"
        "print(sample_schur(cfg, NoiseField(987)).tolist())\n"
    )
    outputs = []
    for flag in ("", "1"):
        env = dict(os.environ, WANDERLINES_NO_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        outputs.append(res.stdout)
    assert outputs[0] == outputs[1]


def test_check_hypothesis():
    assert check_hypothesis((0.3,), (0.4,), (0.5,), (0.6,), 0, 0)
    assert not check_hypothesis((0.5,), (0.6,), (0.3,), (0.4,), 0, 0)


def test_coupled_draws_dominate():
    lo = SamplerConfig((0.3, 0.2), (0.4, 0.1))
    hi = SamplerConfig((0.5, 0.4), (0.6, 0.3))
    assert check_hypothesis(lo.X, lo.Y, hi.X, hi.Y, 0, 0)
    for r in range(200):
        assert coupling_violations(lo, hi, 0, 0, NoiseField(mix_seed(2, r))) == 0


def test_coupled_marginal_matches_direct_sample():
    lo = SamplerConfig((0.3, 0.2), (0.4, 0.1))
    hi = SamplerConfig((0.5, 0.4), (0.6, 0.3))
    f = NoiseField(77)
    a, b = sample_coupled(lo, hi, 0, 0, f)
    assert np.array_equal(a, sample_schur(lo, f))
    assert np.array_equal(b, sample_schur(hi, f))
