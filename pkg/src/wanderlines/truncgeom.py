"""Truncated shifted geometric distributions.

``TruncGeom(a, b, q)`` is the geometric(q) law conditioned to the integer
window ``[a, b]`` (``b`` may be infinite): ``pmf(x) proportional to q**x`` for
integers ``a <= x <= b``.  Degenerate cases: ``q == 0`` is a point mass at
``a``; ``a == b`` is a point mass at ``a``.

The quantile function is exact in the sense that ``quantile(u) <= t`` holds
if and only if ``u <= cdf(t)`` — the closed-form logarithmic inversion is
followed by an integer correction step so the equivalence holds without
floating-point exceptions.  That exactness is what makes quantile coupling
across parameter choices pathwise monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_INF = float("inf")


@dataclass(frozen=True)
class TruncGeom:
    a: int
    b: float  # integer or math.inf
    q: float

    def __post_init__(self):
        if self.q < 0 or self.q >= 1:
            raise ValueError(f"q must lie in [0, 1), got {self.q}")
        if self.b != _INF and int(self.b) != self.b:
            raise ValueError("b must be an integer or inf")
        if self.b < self.a:
            raise ValueError(f"need a <= b, got a={self.a}, b={self.b}")
        if self.q == 0 and self.b == _INF:
            # point mass at a; keep b = inf allowed
            pass

    @property
    def finite_b(self) -> bool:
        return self.b != _INF

    # -- mass function ----------------------------------------------------

    def pmf(self, x: int) -> float:
        if x < self.a or x > self.b:
            return 0.0
        if self.q == 0.0:
            return 1.0 if x == self.a else 0.0
        if self.finite_b:
            n = int(self.b) - self.a + 1
            denom = (1.0 - self.q**n) / (1.0 - self.q)
        else:
            denom = 1.0 / (1.0 - self.q)
        return self.q ** (x - self.a) / denom

    def cdf(self, x: float) -> float:
        """P(X <= x) for real x."""
        if x < self.a:
            return 0.0
        if self.finite_b and x >= self.b:
            return 1.0
        k = math.floor(x) - self.a  # k >= 0
        if self.q == 0.0:
            return 1.0
        num = 1.0 - self.q ** (k + 1)
        if self.finite_b:
            n = int(self.b) - self.a + 1
            return num / (1.0 - self.q**n)
        return num

    def quantile(self, u: float) -> int:
        """Generalized inverse: smallest integer t with u <= cdf(t)."""
        if not (0.0 < u < 1.0):
            raise ValueError("u must lie in (0,1)")
        if self.q == 0.0 or self.a == self.b:
            return self.a
        lq = math.log(self.q)
        if self.finite_b:
            n = int(self.b) - self.a + 1
            mass = 1.0 - self.q**n
        else:
            mass = 1.0
        # solve 1 - q**(k+1) >= u * mass  =>  k >= log(1 - u*mass)/log q - 1
        t = self.a + int(math.floor(math.log1p(-u * mass) / lq))
        # integer correction: enforce Q(u) = min{t : u <= F(t)} exactly
        while t > self.a and u <= self.cdf(t - 1):
            t -= 1
        while u > self.cdf(t):
            t += 1
        if self.finite_b:
            t = min(t, int(self.b))
        return max(t, self.a)

    def dominates(self, other: "TruncGeom") -> bool:
        """True iff q1 <= q2, a1 <= a2 and b1 <= b2 componentwise.

        Under these hypotheses ``other`` stochastically dominates ``self``:
        ``other.cdf <= self.cdf`` pointwise and hence
        ``self.quantile(u) <= other.quantile(u)`` for every u.
        """
        return self.q <= other.q and self.a <= other.a and self.b <= other.b


def pmf(d: TruncGeom, x: int) -> float:
    return d.pmf(x)


def cdf(d: TruncGeom, x: float) -> float:
    return d.cdf(x)


def quantile(d: TruncGeom, u: float) -> int:
    return d.quantile(u)


def dominates(d1: TruncGeom, d2: TruncGeom) -> bool:
    return d1.dominates(d2)


def quantile_array(a, b, q, u):
    """Vectorized exact quantile for arrays (b = -1 encodes an infinite cap).

    Mirrors ``TruncGeom.quantile`` elementwise; used by the pure-numpy
    sampler path and by bulk test suites.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)  # -1 means infinite
    q = np.asarray(q, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    a, b, q, u = np.broadcast_arrays(a, b, q, u)
    out = np.array(a, dtype=np.int64, copy=True)
    live = (q > 0) & ((b < 0) | (b > a))
    if not np.any(live):
        return out
    al, bl, ql, ul = a[live], b[live], q[live], u[live]
    lq = np.log(ql)
    mass = np.where(bl < 0, 1.0, -np.expm1((bl - al + 1) * lq))
    k = np.floor(np.log1p(-ul * mass) / lq).astype(np.int64)
    t = al + np.maximum(k, 0)

    def _cdf(tv):
        # P(X <= tv), tv integer >= a
        num = -np.expm1((tv - al + 1) * lq)
        return num / mass

    # one step down / up suffices apart from pathological rounding; loop to be safe
    for _ in range(4):
        down = (t > al) & (ul <= _cdf(t - 1))
        if not down.any():
            break
        t = np.where(down, t - 1, t)
    for _ in range(4):
        up = ul > _cdf(t)
        if not up.any():
            break
        t = np.where(up, t + 1, t)
    t = np.where(bl >= 0, np.minimum(t, bl), t)
    t = np.maximum(t, al)
    out[live] = t
    return out
