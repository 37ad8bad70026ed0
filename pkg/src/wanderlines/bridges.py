"""Brownian bridges and barrier-avoiding bridge ensembles by rejection.

An avoiding ensemble on ``[a, b]`` is ``k`` independent Brownian bridges with
prescribed entrance/exit vectors, conditioned on staying strictly ordered
between an upper barrier ``f`` and a lower barrier ``g`` at every grid time.
Conditioning is implemented by rejection at a fixed grid resolution; the
resampling (Gibbs) property and boundary monotonicity are verified
empirically by the checks at the bottom of the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "RejectionBudgetExceeded",
    "BridgeSpec",
    "time_grid",
    "sample_bridge",
    "sample_avoiding",
    "crossing_probability",
    "bridge_crossing_estimate",
    "gibbs_resample_check",
    "coupled_avoiding_domination",
]

Barrier = Union[float, Callable[[np.ndarray], np.ndarray]]

#: Default grid resolution: points per unit of time.
DEFAULT_RESOLUTION = 128


class RejectionBudgetExceeded(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""

    def __init__(self, attempts: int, accepted: int):
        self.attempts = attempts
        self.accepted = accepted
        self.acceptance_rate = accepted / attempts if attempts else 0.0
        super().__init__(
            f"no acceptance in {attempts} attempts "
            f"(running acceptance rate {self.acceptance_rate:.3g})"
        )


def _barrier_values(f: Barrier, ts: np.ndarray, sign: float) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    if callable(f):
        return np.asarray(f(ts), dtype=float)
    return np.full(ts.shape, float(f))


@dataclass(frozen=True)
class BridgeSpec:
    """Entrance/exit data and barriers for an avoiding bridge ensemble."""

    a: float
    b: float
    x: Tuple[float, ...]
    y: Tuple[float, ...]
    f: Barrier = math.inf
    g: Barrier = -math.inf
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ValueError("time interval requires a < b")
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.size != y.size or x.size == 0:
            raise ValueError("entrance and exit vectors must share a positive length")
        if np.any(np.diff(x) >= 0) or np.any(np.diff(y) >= 0):
            raise ValueError("entrance and exit vectors must be strictly decreasing")
        fa = _barrier_values(self.f, np.array([self.a, self.b]), +1.0)
        ga = _barrier_values(self.g, np.array([self.a, self.b]), -1.0)
        if not (fa[0] > x[0] and fa[1] > y[0]):
            raise ValueError("top barrier must clear the first curve's endpoints")
        if not (ga[0] < x[-1] and ga[1] < y[-1]):
            raise ValueError("bottom barrier must clear the last curve's endpoints")
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2 points per unit time")

    @property
    def k(self) -> int:
        return len(self.x)

    def grid(self) -> np.ndarray:
        return time_grid(self.a, self.b, self.resolution)


def time_grid(a: float, b: float, resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
    """Uniform grid on ``[a, b]`` with ``resolution`` points per unit time."""
    n = max(2, int(round((b - a) * resolution)) + 1)
    return np.linspace(a, b, n)


def sample_bridge(
    a: float,
    b: float,
    x: float,
    y: float,
    grid: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """One Brownian bridge from ``(a, x)`` to ``(b, y)`` on ``grid``.

    Built from cumulative Gaussian increments pinned to the endpoint:
    ``B(t) = x + W(t-a) - (t-a)/(b-a) * (W(b-a) - (y-x))`` with ``W`` a
    standard Brownian motion, so the bridge covariance is exact on the grid.
    """
    grid = np.asarray(grid, dtype=float)
    increments = rng.normal(0.0, np.sqrt(np.diff(grid)))
    w = np.concatenate([[0.0], np.cumsum(increments)])
    frac = (grid - a) / (b - a)
    return x + w - frac * (w[-1] - (y - x))


def _avoids(curves: np.ndarray, top: np.ndarray, bottom: np.ndarray) -> bool:
    stacked = np.vstack([top, curves, bottom])
    return bool(np.all(stacked[:-1] > stacked[1:]))


def sample_avoiding(
    spec: BridgeSpec,
    rng: np.random.Generator,
    max_attempts: int = 100_000,
) -> Tuple[np.ndarray, np.ndarray]:
    """Rejection-sample an ordered barrier-avoiding bridge ensemble.

    Returns ``(grid, curves)`` with ``curves`` of shape ``(k, len(grid))``.
    Every accepted sample satisfies ``f > B_1 > ... > B_k > g`` strictly at
    all grid points.
    """
    grid = spec.grid()
    top = _barrier_values(spec.f, grid, +1.0)
    bottom = _barrier_values(spec.g, grid, -1.0)
    for attempt in range(1, max_attempts + 1):
        curves = np.vstack(
            [
                sample_bridge(spec.a, spec.b, xi, yi, grid, rng)
                for xi, yi in zip(spec.x, spec.y)
            ]
        )
        if _avoids(curves, top, bottom):
            return grid, curves
    raise RejectionBudgetExceeded(max_attempts, 0)


def crossing_probability(
    d1: float,
    d2: float,
    length: float,
    diffusion: float = 1.0,
) -> float:
    """Reflection-principle crossing probability for a bridge vs a line.

    A bridge with diffusion parameter ``diffusion`` started ``d1`` above a
    linear barrier and ending ``d2`` above it crosses with probability
    ``exp(-2 d1 d2 / (diffusion * length))``.  The gap between two
    independent standard bridges is itself a bridge with diffusion 2, so the
    two-bridge crossing probability uses ``diffusion=2``.
    """
    if d1 < 0 or d2 < 0 or length <= 0 or diffusion <= 0:
        raise ValueError("gaps must be nonnegative, length and diffusion positive")
    return math.exp(-2.0 * d1 * d2 / (diffusion * length))


def bridge_crossing_estimate(
    gap: np.ndarray,
    grid: np.ndarray,
    diffusion: float = 1.0,
) -> float:
    """Probability that the continuous gap process touches zero, given grid values.

    Checking only grid points systematically misses excursions between them;
    conditionally on the observed values the process is a Brownian bridge on
    each segment, whose touch probability is closed-form.  Averaging this
    estimator over replicates is therefore unbiased for the continuous
    crossing probability.
    """
    gap = np.asarray(gap, dtype=float)
    if np.any(gap <= 0):
        return 1.0
    seg = np.exp(-2.0 * gap[:-1] * gap[1:] / (diffusion * np.diff(np.asarray(grid, dtype=float))))
    return float(1.0 - np.prod(1.0 - seg))


# ---------------------------------------------------------------------------
# Empirical checks
# ---------------------------------------------------------------------------


def _interp_barrier(grid: np.ndarray, values: np.ndarray) -> Callable:
    return lambda ts: np.interp(ts, grid, values)


def gibbs_resample_check(
    samples: np.ndarray,
    grid: np.ndarray,
    k1: int,
    k2: int,
    window: Tuple[float, float],
    rng: np.random.Generator,
    resolution: int = DEFAULT_RESOLUTION,
    max_attempts: int = 100_000,
) -> dict:
    """Resample curves ``k1..k2`` (1-based) inside ``window`` and compare.

    For each input replicate the interior is redrawn as an avoiding ensemble
    with boundary data read off the replicate (curve ``k1 - 1`` as top
    barrier, curve ``k2 + 1`` as bottom, endpoint values as entrance/exit).
    Reports two-sample Kolmogorov-Smirnov statistics between original and
    resampled window-midpoint marginals, one per resampled curve.
    """
    from scipy.stats import ks_2samp

    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 3:
        raise ValueError("samples must have shape (replicates, curves, times)")
    wa, wb = window
    if not (grid[0] <= wa < wb <= grid[-1]):
        raise ValueError("window must lie inside the sampled time interval")
    n_curves = samples.shape[1]
    if not (1 <= k1 <= k2 <= n_curves):
        raise ValueError("curve indices out of range")
    mid = 0.5 * (wa + wb)

    originals = []
    resampled = []
    for rep in samples:
        x = tuple(float(np.interp(wa, grid, rep[i - 1])) for i in range(k1, k2 + 1))
        y = tuple(float(np.interp(wb, grid, rep[i - 1])) for i in range(k1, k2 + 1))
        top: Barrier = (
            _interp_barrier(grid, rep[k1 - 2]) if k1 >= 2 else math.inf
        )
        bottom: Barrier = (
            _interp_barrier(grid, rep[k2]) if k2 < n_curves else -math.inf
        )
        spec = BridgeSpec(wa, wb, x, y, f=top, g=bottom, resolution=resolution)
        sub_grid, redraw = sample_avoiding(spec, rng, max_attempts=max_attempts)
        originals.append([np.interp(mid, grid, rep[i - 1]) for i in range(k1, k2 + 1)])
        resampled.append([np.interp(mid, sub_grid, c) for c in redraw])

    originals = np.asarray(originals)
    resampled = np.asarray(resampled)
    stats = []
    for j in range(originals.shape[1]):
        res = ks_2samp(originals[:, j], resampled[:, j])
        stats.append({"curve": k1 + j, "ks": float(res.statistic), "p": float(res.pvalue)})
    return {
        "replicates": int(samples.shape[0]),
        "window": [float(wa), float(wb)],
        "per_curve": stats,
        "min_p": min(s["p"] for s in stats),
    }


def coupled_avoiding_domination(
    spec_low: BridgeSpec,
    spec_high: BridgeSpec,
    rng: np.random.Generator,
    replicates: int = 2_000,
    band_alpha: float = 1e-3,
    max_attempts: int = 100_000,
) -> dict:
    """Empirical stochastic-domination check between two avoiding ensembles.

    Requires the high spec to dominate the low one in entrance/exit data and
    barriers.  At each grid time and curve index the empirical cdf of the
    high ensemble must lie at or below that of the low ensemble, within a
    two-sided Dvoretzky-Kiefer-Wolfowitz band at level ``band_alpha``.
    """
    if spec_low.k != spec_high.k or spec_low.a != spec_high.a or spec_low.b != spec_high.b:
        raise ValueError("specs must share curve count and time interval")
    grid = spec_low.grid()
    for lo, hi, name in (
        (np.asarray(spec_low.x), np.asarray(spec_high.x), "entrance"),
        (np.asarray(spec_low.y), np.asarray(spec_high.y), "exit"),
        (
            _barrier_values(spec_low.g, grid, -1.0),
            _barrier_values(spec_high.g, grid, -1.0),
            "bottom barrier",
        ),
        (
            _barrier_values(spec_low.f, grid, +1.0),
            _barrier_values(spec_high.f, grid, +1.0),
            "top barrier",
        ),
    ):
        with np.errstate(invalid="ignore"):
            ok = np.all((hi >= lo) | (np.isinf(hi) & np.isinf(lo)))
        if not ok:
            raise ValueError(f"high spec does not dominate low spec in {name}")

    lows = np.stack(
        [sample_avoiding(spec_low, rng, max_attempts)[1] for _ in range(replicates)]
    )
    highs = np.stack(
        [sample_avoiding(spec_high, rng, max_attempts)[1] for _ in range(replicates)]
    )
    # DKW band for the difference of two empirical cdfs.
    eps = 2.0 * math.sqrt(math.log(2.0 / band_alpha) / (2.0 * replicates))
    # Empirical cdf comparison at pooled sample points, per curve and time.
    worst = -math.inf
    check_times = np.linspace(0, grid.size - 1, min(grid.size, 17)).astype(int)
    for j in range(spec_low.k):
        for ti in check_times:
            lo_vals = np.sort(lows[:, j, ti])
            hi_vals = highs[:, j, ti]
            # F_high(x) - F_low(x) evaluated at the low sample points.
            f_low = np.arange(1, replicates + 1) / replicates
            f_high = np.searchsorted(np.sort(hi_vals), lo_vals, side="right") / replicates
            worst = max(worst, float(np.max(f_high - f_low)))
    return {
        "replicates": replicates,
        "band": eps,
        "max_cdf_excess": worst,
        "dominated": worst <= eps,
    }
