"""KPZ rescaling: spiked parameter sequences, embedding, Airy coordinates.

The pipeline: positive-class parameters (a, b) plus a base ratio q in (0,1)
define spiked sampler weights near 1 for the leading indices and q for the
bulk.  The sampled partition sequence is embedded as a line ensemble
L_i(s) = lambda_i^{N+s} (constant extension, linear interpolation), then
centered and scaled

    rescaled_i(t) = sigma^{-1} N^{-1/3} (L_i(t N^{2/3}) - p t N^{2/3} - 2 p N),

which converges to { f_q^{-1/2} parabolic_i(f_q t) }.  Airy coordinates are
recovered via  airy_i(s) = sqrt(2) * f_q^{1/2} * rescaled_i(s / f_q) + s^2,
and the slope statistic  t^{-1} (airy_k(t) - t^2)  targets -2 / a_k for
k <= J_a and stays tight for k > J_a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from wanderlines.params import ParamSet


class GridTooShort(ValueError):
    """The requested time falls outside the embedded column range."""


@dataclass(frozen=True)
class ScalingConstants:
    q: float
    sigma_q: float
    p: float
    sigma: float
    f_q: float


def scaling_constants(q: float) -> ScalingConstants:
    if not (0.0 < q < 1.0):
        raise ValueError("q must lie in (0,1)")
    sigma_q = q ** (1.0 / 3.0) * (1.0 + q) ** (1.0 / 3.0) / (1.0 - q)
    p = q / (1.0 - q)
    sigma = math.sqrt(p * (1.0 + p))
    f_q = q ** (1.0 / 3.0) / (2.0 * (1.0 + q) ** (2.0 / 3.0))
    return ScalingConstants(q, sigma_q, p, sigma, f_q)


def default_grid_length(N: int, t_max_airy: float = 0.0, q: float = 0.5) -> int:
    """Smallest admissible M_N, enlarged to cover Airy times up to t_max_airy."""
    base = math.ceil(N + N**0.75) + 1
    if t_max_airy > 0:
        sc = scaling_constants(q)
        need = N + math.ceil((t_max_airy / sc.f_q) * N ** (2.0 / 3.0)) + 2
        return max(base, need)
    return base


def build_parameter_sequences(p: ParamSet, q: float, N: int, M_N: int | None = None):
    """Spiked sampler weights (X of length M_N, Y of length N, A_N, B_N).

    x_i = 1 - 1/(N^{1/3} b_i sigma_q) for the leading B_N indices, else q;
    y_i likewise from a_i with cap A_N.  The caps are the largest counts
    <= min(floor(N^{1/12}), J) keeping the spiked entries >= q.
    """
    if not p.is_positive_class():
        raise ValueError("scaling requires a positive-class ParamSet")
    sc = scaling_constants(q)
    if M_N is None:
        M_N = default_grid_length(N, 0.0, q)
    if M_N < N + N**0.75:
        raise GridTooShort(f"M_N={M_N} below N + N^(3/4) + 1")
    cap = int(math.floor(N ** (1.0 / 12.0)))

    def spikes(seq, count_cap, length):
        vals = np.full(length, q, dtype=np.float64)
        count = 0
        for i in range(min(count_cap, len(seq), length)):
            if seq[i] <= 0:
                break
            v = 1.0 - 1.0 / (N ** (1.0 / 3.0) * seq[i] * sc.sigma_q)
            if v < q:
                break
            vals[i] = v
            count = i + 1
        return vals, count

    s = p.support_indices()
    X, B_N = spikes(p.b_plus, min(cap, s.J_b_plus), M_N)
    Y, A_N = spikes(p.a_plus, min(cap, s.J_a_plus), N)
    return X, Y, A_N, B_N


@dataclass(frozen=True)
class LineEnsembleSample:
    """Curves evaluated on a time grid; `kind` records the coordinate system.

    data[i, j] = curve i at times[j]; kind in {"raw", "rescaled", "airy"}.
    Raw samples carry the integer column offsets s = m - N in `times`.
    """

    times: np.ndarray
    data: np.ndarray
    kind: str
    N: int
    q: float

    @property
    def n_curves(self) -> int:
        return self.data.shape[0]

    def curve(self, k: int) -> np.ndarray:
        return self.data[k - 1]

    def evaluate(self, k: int, t: float) -> float:
        """Linear interpolation of curve k (1-based) at time t."""
        ts = self.times
        if t < ts[0] or t > ts[-1]:
            raise GridTooShort(f"time {t} outside [{ts[0]}, {ts[-1]}]")
        return float(np.interp(t, ts, self.data[k - 1]))


def embed_line_ensemble(seq: np.ndarray, N: int, max_curves: int | None = None,
                        q: float = 0.5) -> LineEnsembleSample:
    """Embed sampled columns as curves L_i(s) = lambda_i^{N+s}.

    seq is the sampler output of shape (M_N, P): row m-1 holds the parts of
    lambda^m.  The time grid is the integer window s in [-N+1, M_N-N].
    """
    M_N, P = seq.shape
    k = P if max_curves is None else min(max_curves, P)
    times = np.arange(-N + 1, M_N - N + 1, dtype=np.float64)
    data = seq[:, :k].T.astype(np.float64)
    return LineEnsembleSample(times=times, data=data, kind="raw", N=N, q=q)


def rescale(ens: LineEnsembleSample, q: float, N: int) -> LineEnsembleSample:
    """Center and scale the raw embedding into the convergent coordinates."""
    if ens.kind != "raw":
        raise ValueError("rescale expects a raw ensemble")
    sc = scaling_constants(q)
    s = ens.times  # integer offsets
    t = s / N ** (2.0 / 3.0)
    data = (ens.data - sc.p * s[None, :] - 2.0 * sc.p * N) / (sc.sigma * N ** (1.0 / 3.0))
    return LineEnsembleSample(times=t, data=data, kind="rescaled", N=N, q=q)


def to_airy(ens: LineEnsembleSample, q: float) -> LineEnsembleSample:
    """Airy coordinates: airy_i(s) = sqrt(2) f_q^{1/2} rescaled_i(s/f_q) + s^2."""
    if ens.kind != "rescaled":
        raise ValueError("to_airy expects a rescaled ensemble")
    sc = scaling_constants(q)
    s = ens.times * sc.f_q
    data = math.sqrt(2.0) * math.sqrt(sc.f_q) * ens.data + s[None, :] ** 2
    return LineEnsembleSample(times=s, data=data, kind="airy", N=ens.N, q=q)


def slope_statistic(ens: LineEnsembleSample, k: int, t: float) -> float:
    """t^{-1} (airy_k(t) - t^2); targets -2/a_k for wanderer indices."""
    if ens.kind != "airy":
        raise ValueError("slope_statistic expects airy coordinates")
    if t == 0:
        raise ValueError("t must be nonzero")
    return (ens.evaluate(k, t) - t * t) / t
