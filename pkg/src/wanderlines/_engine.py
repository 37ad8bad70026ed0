"""Hot kernels: counter-based noise and the push-block sampler core.

Two execution paths provide identical results:

- the default numba path compiles the cores with ``@njit``;
- setting ``WANDERLINES_NO_NUMBA=1`` in the environment selects a pure
  Python/numpy fallback (same algorithms, same bit-exact noise stream).

The noise field is a counter-based construction: a splitmix-style 64-bit
mix of (seed, n, m, k) mapped into (0,1) with denominator 2^53 and offset
half an ulp so 0 and 1 never occur.  Random access by index is what the
shifted-index monotone coupling requires — two samplers must read the same
uniforms at different (n, m, k) offsets.
"""

from __future__ import annotations

import math
import os

import numpy as np

USE_NUMBA = os.environ.get("WANDERLINES_NO_NUMBA", "").lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

_MASK = (1 << 64) - 1
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB
_SEED_GAMMA = 0x9E3779B97F4A7C15
_KN = 0xD1342543DE82EF95
_KM = 0xAF251AF3B0F025B5
_KK = 0x9E6C63D0876A9A75
_TWO53_INV = 2.0**-53


# ---------------------------------------------------------------------------
# pure-python noise primitives (reference implementation)
# ---------------------------------------------------------------------------

def _mix64_py(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * _C1) & _MASK
    z ^= z >> 27
    z = (z * _C2) & _MASK
    z ^= z >> 31
    return z


def _noise_bits_py(seed: int, n: int, m: int, k: int) -> int:
    h = _mix64_py((seed + _SEED_GAMMA) & _MASK)
    h = _mix64_py(h ^ ((n * _KN) & _MASK))
    h = _mix64_py(h ^ ((m * _KM) & _MASK))
    h = _mix64_py(h ^ ((k * _KK) & _MASK))
    return h


def _noise_unit_py(seed: int, n: int, m: int, k: int) -> float:
    return ((_noise_bits_py(seed, n, m, k) >> 11) + 0.5) * _TWO53_INV


def _mix_seed_py(seed: int, r: int) -> int:
    return _mix64_py((seed ^ ((r * _KN) & _MASK)) & _MASK)


if USE_NUMBA:
    _U64_C1 = np.uint64(_C1)
    _U64_C2 = np.uint64(_C2)
    _U64_GAMMA = np.uint64(_SEED_GAMMA)
    _U64_KN = np.uint64(_KN)
    _U64_KM = np.uint64(_KM)
    _U64_KK = np.uint64(_KK)
    _S30 = np.uint64(30)
    _S27 = np.uint64(27)
    _S31 = np.uint64(31)
    _S11 = np.uint64(11)

    @njit(cache=True, inline="always")
    def _mix64(z):
        z = (z ^ (z >> _S30)) * _U64_C1
        z = (z ^ (z >> _S27)) * _U64_C2
        return z ^ (z >> _S31)

    @njit(cache=True, inline="always")
    def _noise_bits(seed, n, m, k):
        h = _mix64(seed + _U64_GAMMA)
        h = _mix64(h ^ (np.uint64(n) * _U64_KN))
        h = _mix64(h ^ (np.uint64(m) * _U64_KM))
        h = _mix64(h ^ (np.uint64(k) * _U64_KK))
        return h

    @njit(cache=True, inline="always")
    def _noise_unit(seed, n, m, k):
        return (np.float64(_noise_bits(seed, n, m, k) >> _S11) + 0.5) * _TWO53_INV

    @njit(cache=True)
    def _mix_seed(seed, r):
        return _mix64(seed ^ (np.uint64(r) * _U64_KN))

else:
    _noise_unit = _noise_unit_py
    _mix_seed = _mix_seed_py


def noise_unit(seed: int, n: int, m: int, k: int) -> float:
    """Uniform in (0,1), a pure function of (seed, n, m, k)."""
    if USE_NUMBA:
        return _noise_unit(np.uint64(seed & _MASK), n, m, k)
    return _noise_unit_py(seed & _MASK, n, m, k)


def mix_seed(seed: int, r: int) -> int:
    """Derived seed for replicate r (seed partitioning, no shared state)."""
    if USE_NUMBA:
        return int(_mix_seed(np.uint64(seed & _MASK), r))
    return _mix_seed_py(seed & _MASK, r)


# ---------------------------------------------------------------------------
# sampler core (single source, compiled when numba is active)
# ---------------------------------------------------------------------------

def _tg_quantile_scalar(a, b, q, lq, u):
    """Exact quantile of the truncated shifted geometric.

    b < 0 encodes an infinite cap.  lq = log(q) precomputed by the caller.
    Returns the smallest integer t >= a with u <= F(t).
    """
    if q == 0.0 or b == a:
        return a
    if b < 0 or (b - a + 1) * lq < -36.7:
        mass = 1.0  # window mass indistinguishable from full geometric
    else:
        mass = -math.expm1((b - a + 1) * lq)
    r = math.log1p(-u * mass) / lq
    k = int(math.floor(r))
    frac = r - k
    guard = 1e-9 * (1.0 + r)
    if frac > guard and frac < 1.0 - guard:
        # floor is certainly correct: the floating-point error of r is
        # orders of magnitude below the distance to the nearest integer
        t = a + k
        if b >= 0 and t > b:
            t = b
        return t
    t = a + k
    if t < a:
        t = a
    if b >= 0 and t > b:
        t = b
    # local correction so that Q(u) <= t  <=>  u <= F(t) exactly
    while t > a:
        if u <= -math.expm1((t - a) * lq) / mass:
            t -= 1
        else:
            break
    while u > -math.expm1((t - a + 1) * lq) / mass:
        t += 1
    if b >= 0 and t > b:
        t = b
    return t


def _push_block_core(x, y, seed, nshift, mshift, kshift, out):
    """Run the push-block dynamics; fill out[m-1, i-1] = lambda_i(N, m).

    x: column weights (length M); y: row weights (length N).  The noise is
    read at (n + nshift, m + mshift, k + kshift), realizing the shifted
    coupling when the same seed is used with different shifts.
    """
    M = x.shape[0]
    N = y.shape[0]
    P = out.shape[1]  # max number of tracked parts
    cur = np.zeros((M + 1, P + 1), dtype=np.int64)
    nxt = np.zeros((M + 1, P + 1), dtype=np.int64)
    q_memo = -1.0
    lq = 0.0
    for n in range(1, N + 1):
        yn = y[n - 1]
        for m in range(1, M + 1):
            q = x[m - 1] * yn
            if q >= 1.0:
                raise ValueError("need x_i * y_j < 1")
            if q != q_memo:
                # x and y are constant away from the spiked leading entries,
                # so the logarithm is recomputed only at spike boundaries
                lq = math.log(q) if q > 0.0 else 0.0
                q_memo = q
            imax = min(m, n)
            if imax > P:
                imax = P
            for i in range(1, imax + 1):
                li = nxt[m - 1, i]
                ui = cur[m, i]
                a = li if li > ui else ui
                if i == 1:
                    b = -1  # infinite cap
                else:
                    lp = nxt[m - 1, i - 1]
                    up_ = cur[m, i - 1]
                    b = lp if lp < up_ else up_
                    if a > b:
                        raise ValueError("push-block well-posedness violated")
                    if b == 0:
                        # both neighbors vanish at depth i-1: everything
                        # deeper is deterministically zero
                        nxt[m, i] = 0
                        break
                    if a == b:
                        nxt[m, i] = a
                        continue
                if q == 0.0:
                    nxt[m, i] = a
                    continue
                u = _noise_unit(seed, n + nshift, m + mshift, i + kshift)
                gap = b - a
                if 0 < gap <= 8:
                    # small finite window: threshold scan over partial
                    # geometric sums, no transcendentals
                    sn = 1.0
                    pw = 1.0
                    for _ in range(gap):
                        pw *= q
                        sn += pw
                    target = u * sn
                    s = 1.0
                    pw = 1.0
                    j = 0
                    while s < target and j < gap:
                        pw *= q
                        s += pw
                        j += 1
                    nxt[m, i] = a + j
                else:
                    nxt[m, i] = _tg_quantile_scalar(a, b, q, lq, u)
        tmp = cur
        cur = nxt
        nxt = tmp
    for m in range(1, M + 1):
        for i in range(1, P + 1):
            out[m - 1, i - 1] = cur[m][i]
    return out


def _coupled_violations_core(xA, yA, xB, yB, shift, seedA, seedB, A, B, outA, outB):
    """Sample the coupled pair and count violations of the domination.

    Ensemble A (the lower one after index shift) reads noise at unshifted
    indices; ensemble B reads noise at (n+A, m+B, k+max(A,B)).  Returns the
    number of (column, part) pairs violating lambda^A_{k+shift} <= lambda^B_k.
    """
    _push_block_core(xA, yA, seedA, 0, 0, 0, outA)
    _push_block_core(xB, yB, seedB, A, B, shift, outB)
    M = outB.shape[0]
    P = outB.shape[1]
    bad = 0
    for m in range(M):
        for k in range(P):
            ks = k + shift
            av = outA[m, ks] if ks < outA.shape[1] else 0
            if av > outB[m, k]:
                bad += 1
    return bad


if USE_NUMBA:
    _tg_quantile_scalar = njit(cache=True, inline="always")(_tg_quantile_scalar)
    _push_block_core = njit(cache=True)(_push_block_core)
    _coupled_violations_core = njit(cache=True)(_coupled_violations_core)


def push_block(x, y, seed, nshift=0, mshift=0, kshift=0, max_parts=None):
    """Sample the Schur process; returns int64 array (M, P) of parts."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    M, N = x.shape[0], y.shape[0]
    P = min(M, N) if max_parts is None else min(max_parts, min(M, N))
    P = max(P, 1)
    out = np.zeros((M, P), dtype=np.int64)
    s = np.uint64(seed & _MASK) if USE_NUMBA else (seed & _MASK)
    _push_block_core(x, y, s, nshift, mshift, kshift, out)
    return out


def coupled_violations(xA, yA, xB, yB, A, B, seed):
    """One coupled draw; returns (violations, sampleA, sampleB)."""
    xA = np.ascontiguousarray(xA, dtype=np.float64)
    yA = np.ascontiguousarray(yA, dtype=np.float64)
    xB = np.ascontiguousarray(xB, dtype=np.float64)
    yB = np.ascontiguousarray(yB, dtype=np.float64)
    shift = max(A, B)
    MA, NA = xA.shape[0], yA.shape[0]
    MB, NB = xB.shape[0], yB.shape[0]
    outA = np.zeros((MA, min(MA, NA)), dtype=np.int64)
    outB = np.zeros((MB, min(MB, NB)), dtype=np.int64)
    s = np.uint64(seed & _MASK) if USE_NUMBA else (seed & _MASK)
    bad = _coupled_violations_core(xA, yA, xB, yB, shift, s, s, A, B, outA, outB)
    return int(bad), outA, outB
