"""Push-block sampling of Schur processes and the shifted-noise coupling.

``sample_schur`` runs the sequential dynamics: starting from empty
partitions, for each new row parameter y_{n+1} and column m = 1..M the i-th
part of lambda(n+1, m) is drawn from a truncated shifted geometric with
ratio x_m * y_{n+1}, confined between the neighboring parts

    a_i = max(lambda_i(n+1, m-1), lambda_i(n, m)),
    b_i = min(lambda_{i-1}(n+1, m-1), lambda_{i-1}(n, m)),   b_1 = inf,

using the uniform noise_at(n+1, m, i).  The output is the final row
(lambda(N,1), ..., lambda(N,M)), distributed as the Schur process.

``sample_coupled`` runs two samplers off the same noise field, the second
reading shifted indices (n+A, m+B, k+max(A,B)).  When the parameter
hypothesis x_{i+B} y_{j+A} <= xt_i yt_j holds, the outputs satisfy
lambda_{k+max(A,B)}^j <= lambdat_k^j for every column j and part k,
deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wanderlines import _engine
from wanderlines.partitions import canonical


class InvalidParams(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


@dataclass(frozen=True)
class NoiseField:
    seed: int

    def at(self, n: int, m: int, k: int) -> float:
        if n < 1 or m < 1 or k < 1:
            raise ValueError("indices must be >= 1")
        return _engine.noise_unit(self.seed, n, m, k)

    def shifted_view(self, A: int, B: int):
        shift = max(A, B)
        return lambda n, m, k: self.at(n + A, m + B, k + shift)


def noise_at(f: NoiseField, n: int, m: int, k: int) -> float:
    return f.at(n, m, k)


@dataclass(frozen=True)
class SamplerConfig:
    X: tuple[float, ...]
    Y: tuple[float, ...]

    def __post_init__(self):
        X = tuple(float(v) for v in self.X)
        Y = tuple(float(v) for v in self.Y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if not X or not Y:
            raise InvalidParams("X and Y must be nonempty")
        if any(v < 0 for v in X) or any(v < 0 for v in Y):
            raise InvalidParams("parameters must be nonnegative")
        mx, my = max(X), max(Y)
        if mx * my >= 1.0:
            raise InvalidParams("need x_i * y_j < 1 for all i, j")

    @property
    def M(self) -> int:
        return len(self.X)

    @property
    def N(self) -> int:
        return len(self.Y)


def sample_schur(cfg: SamplerConfig, f: NoiseField, max_parts: int | None = None) -> np.ndarray:
    """Final row of the dynamics: array (M, P) with row m-1 = lambda(N, m)."""
    return _engine.push_block(
        np.array(cfg.X), np.array(cfg.Y), f.seed, max_parts=max_parts
    )


def sample_sequence(cfg: SamplerConfig, f: NoiseField) -> list[tuple[int, ...]]:
    """Same as sample_schur but as a list of canonical partitions."""
    arr = sample_schur(cfg, f)
    return [canonical(row) for row in arr]


def check_hypothesis(XA, YA, XB, YB, A: int, B: int) -> bool:
    """True iff x_{i+B} y_{j+A} <= xt_i yt_j for all applicable i, j.

    (XA, YA) is the lower ensemble (shifted indices in the conclusion),
    (XB, YB) the upper one.
    """
    XA, YA, XB, YB = map(np.asarray, (XA, YA, XB, YB))
    for i in range(len(XB)):
        if i + B >= len(XA):
            continue
        for j in range(len(YB)):
            if j + A >= len(YA):
                continue
            if XA[i + B] * YA[j + A] > XB[i] * YB[j] + 1e-15:
                return False
    return True


def sample_coupled(cfgA: SamplerConfig, cfgB: SamplerConfig, A: int, B: int, f: NoiseField):
    """Coupled draw; returns (sampleA, sampleB) arrays of shape (M, P).

    sampleA is driven by U(n,m,k), sampleB by U(n+A, m+B, k+max(A,B)).
    Marginally each is an exact Schur-process sample.
    """
    if cfgA.M != cfgB.M or cfgA.N != cfgB.N:
        raise InvalidParams("coupled configs must share M and N")
    bad, outA, outB = _engine.coupled_violations(
        np.array(cfgA.X), np.array(cfgA.Y), np.array(cfgB.X), np.array(cfgB.Y),
        A, B, f.seed,
    )
    return outA, outB


def coupling_violations(cfgA: SamplerConfig, cfgB: SamplerConfig, A: int, B: int, f: NoiseField) -> int:
    """Number of (column, part) violations of the coupled domination."""
    if cfgA.M != cfgB.M or cfgA.N != cfgB.N:
        raise InvalidParams("coupled configs must share M and N")
    bad, _, _ = _engine.coupled_violations(
        np.array(cfgA.X), np.array(cfgA.Y), np.array(cfgB.X), np.array(cfgB.Y),
        A, B, f.seed,
    )
    return bad


def mix_seed(seed: int, r: int) -> int:
    """Replicate seed derivation (counter-based, no shared state)."""
    return _engine.mix_seed(seed, r)
