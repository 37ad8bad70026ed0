"""KPZ rescaling: constants, spiked weights, and coordinate maps."""

import math

import numpy as np
import pytest

from wanderlines.params import ParamSet
from wanderlines.sampler import NoiseField, SamplerConfig, sample_schur
from wanderlines.scaling import (
    GridTooShort,
    LineEnsembleSample,
    build_parameter_sequences,
    default_grid_length,
    embed_line_ensemble,
    rescale,
    scaling_constants,
    slope_statistic,
    to_airy,
)


def test_scaling_constants_at_half():
    sc = scaling_constants(0.5)
    assert sc.p == pytest.approx(1.0)
    assert sc.sigma == pytest.approx(math.sqrt(2.0))
    assert sc.sigma_q == pytest.approx(0.75 ** (1.0 / 3.0) / 0.5)
    assert sc.f_q == pytest.approx(0.5 ** (1.0 / 3.0) / (2.0 * 1.5 ** (2.0 / 3.0)))
    with pytest.raises(ValueError):
        scaling_constants(1.0)


def test_default_grid_length_covers_airy_window():
    N = 200
    base = default_grid_length(N)
    assert base >= N + N ** 0.75
    assert default_grid_length(N, t_max_airy=2.0) > base


def test_build_parameter_sequences_spikes():
    p = ParamSet(a_plus=(2.0, 1.0), b_plus=(1.0,))
    N = 500
    X, Y, A_N, B_N = build_parameter_sequences(p, 0.5, N)
    assert len(Y) == N and len(X) == default_grid_length(N)
    # the spike count cap is floor(N^(1/12)) = 1 at N = 500
    assert A_N == 1 and B_N == 1
    sc = scaling_constants(0.5)
    assert Y[0] == pytest.approx(1.0 - 1.0 / (N ** (1 / 3) * 2.0 * sc.sigma_q))
    assert np.all(Y[1:] == 0.5) and np.all(X[1:] == 0.5)
    # still a valid sampler configuration
    SamplerConfig(tuple(X), tuple(Y))


def test_scaling_requires_positive_class():
    with pytest.raises(ValueError):
        build_parameter_sequences(ParamSet(a_minus=(0.5,)), 0.5, 100)


def test_grid_too_short():
    with pytest.raises(GridTooShort):
        build_parameter_sequences(ParamSet(a_plus=(1.0,)), 0.5, 400, M_N=401)


def test_coordinate_pipeline_shapes_and_kinds():
    p = ParamSet(a_plus=(1.0,))
    N = 60
    X, Y, _, _ = build_parameter_sequences(p, 0.5, N)
    seq = sample_schur(SamplerConfig(tuple(X), tuple(Y)), NoiseField(1), max_parts=3)
    raw = embed_line_ensemble(seq, N, max_curves=3, q=0.5)
    assert raw.kind == "raw" and raw.n_curves == 3
    assert raw.times[0] == -N + 1
    resc = rescale(raw, 0.5, N)
    airy = to_airy(resc, 0.5)
    assert resc.kind == "rescaled" and airy.kind == "airy"
    assert airy.data.shape == raw.data.shape
    with pytest.raises(ValueError):
        rescale(resc, 0.5, N)
    with pytest.raises(ValueError):
        to_airy(raw, 0.5)


def test_evaluate_interpolates_and_guards_range():
    ens = LineEnsembleSample(
        times=np.array([0.0, 1.0, 2.0]),
        data=np.array([[0.0, 2.0, 4.0]]),
        kind="airy", N=10, q=0.5,
    )
    assert ens.evaluate(1, 0.5) == pytest.approx(1.0)
    with pytest.raises(GridTooShort):
        ens.evaluate(1, 3.0)


def test_slope_statistic_identity():
    # a curve equal to t^2 - 2t has slope statistic exactly -2
    ts = np.linspace(0.0, 3.0, 31)
    ens = LineEnsembleSample(
        times=ts, data=(ts * ts - 2 * ts)[None, :], kind="airy", N=10, q=0.5,
    )
    assert slope_statistic(ens, 1, 2.0) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        slope_statistic(ens, 1, 0.0)
