"""Contour-quadrature evaluation of the wanderer-ensemble correlation kernel.

The correlation kernel of the Airy wanderer line ensemble splits into three
pieces, ``K = K1 + K2 + K3``:

* ``K1`` integrates an exponential over the vertical segment joining the two
  intersection points of the shifted ray contours (empty segment gives 0),
* ``K2`` is a closed-form heat-type term present only for ``t2 > t1``,
* ``K3`` is a double contour integral over 45-degree ray contours, weighted
  by the ratio ``phi(z + t1) / phi(w + t2)`` of the parameter generating
  function.

Quadrature uses fixed-order Gauss-Legendre panels along each ray, with
geometric grading towards the anchor (where the integrand peaks) and dyadic
refinement around the ray parameter at which the two shifted contours cross.
At the crossing the integrand of ``K3`` has an integrable ``1/r``
singularity; with panel breakpoints placed symmetrically around the crossing
parameter on both rays, the tensor-product quadrature annihilates the
antisymmetric singular part exactly, so no special-case subtraction is
required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .params import ParamSet, domain_edges

__all__ = [
    "PoleProximity",
    "Inadmissible",
    "ContourSpec",
    "KernelQuery",
    "phi",
    "phi_reciprocal",
    "gamma_segment",
    "k1",
    "k2",
    "k3",
    "kernel",
    "kernel_value",
    "default_anchors",
    "kernel_grid",
]

#: Default relative guard distance around poles of ``phi``.
DEFAULT_GUARD = 1e-8

#: Default quadrature tolerance driving the ray truncation radius.
DEFAULT_TOL = 1e-12

_SQRT2 = math.sqrt(2.0)


class PoleProximity(ValueError):
    """An evaluation point lies within the guard distance of a pole."""


class Inadmissible(ValueError):
    """Contour anchors violate the admissibility constraints."""


# ---------------------------------------------------------------------------
# The generating function phi
# ---------------------------------------------------------------------------


def phi(z, p: ParamSet, guard: float = DEFAULT_GUARD):
    """Evaluate the parameter generating function at ``z`` (scalar or array).

    ``phi(z) = exp(c+ z + c-/z) * prod (1 + b_i^+ z)(1 + b_i^-/z)
               / ((1 - a_i^+ z)(1 - a_i^-/z))``.

    Raises :class:`PoleProximity` if any point is within ``guard`` (relative)
    of a pole, or at the origin while the minus-side data is nontrivial.
    """
    z_arr = np.asarray(z, dtype=np.complex128)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    out = np.ones_like(z_arr)

    minus_active = p.c_minus != 0.0 or p.a_minus or p.b_minus
    if minus_active:
        if np.any(np.abs(z_arr) < guard):
            raise PoleProximity("evaluation point too close to the origin")
        z_inv = 1.0 / z_arr

    expo = np.zeros_like(z_arr)
    if p.c_plus != 0.0:
        expo = expo + p.c_plus * z_arr
    if p.c_minus != 0.0:
        expo = expo + p.c_minus * z_inv
    out = np.exp(expo)

    for a in p.a_plus:
        if a == 0.0:
            continue
        den = 1.0 - a * z_arr
        if np.any(np.abs(den) < guard * (1.0 + np.abs(a * z_arr))):
            raise PoleProximity(f"contour point too close to pole 1/{a}")
        out = out / den
    for b in p.b_plus:
        if b != 0.0:
            out = out * (1.0 + b * z_arr)
    for a in p.a_minus:
        if a == 0.0:
            continue
        den = 1.0 - a * z_inv
        if np.any(np.abs(den) < guard * (1.0 + np.abs(a * z_inv))):
            raise PoleProximity(f"contour point too close to pole {a}")
        out = out / den
    for b in p.b_minus:
        if b != 0.0:
            out = out * (1.0 + b * z_inv)

    return out[0] if scalar else out


def phi_reciprocal(z, p: ParamSet, guard: float = DEFAULT_GUARD):
    """Evaluate ``1 / phi(z)`` through the reflection identity.

    Uses ``1/phi_{a,b,c}(v) = phi_{b,a,c}(-v)``, whose poles sit at the zeros
    of ``phi`` -- exactly the points where the reciprocal genuinely blows up.
    Near a pole of ``phi`` itself the reciprocal evaluates gracefully to a
    small number instead of tripping the pole guard.
    """
    return phi(-np.asarray(z, dtype=np.complex128), p.reflected(), guard=guard)


# ---------------------------------------------------------------------------
# Contours
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _leggauss(order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_quadrature(breaks: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on each consecutive panel of ``breaks``."""
    x, w = _leggauss(order)
    lo = breaks[:-1]
    hi = breaks[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class ContourSpec:
    """A truncated two-ray contour emanating from ``anchor``.

    ``orientation = +1`` uses rays at angles +-45 degrees; ``-1`` uses
    +-135 degrees.  Both are oriented by increasing imaginary part.
    ``refine_at`` optionally requests dyadic panel refinement around a ray
    parameter (used where two contours cross).
    """

    anchor: float
    orientation: int
    truncation_radius: float
    panels_per_ray: int = 10
    nodes_per_panel: int = 24
    refine_at: Optional[float] = None
    refine_levels: int = 6
    max_panel_width: float = 0.75

    def __post_init__(self) -> None:
        if self.truncation_radius <= 0:
            raise ValueError("truncation_radius must be positive")
        if self.panels_per_ray <= 0 or self.nodes_per_panel <= 0:
            raise ValueError("panel and node counts must be positive")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def breakpoints(self) -> np.ndarray:
        """Panel breakpoints along the ray parameter in ``[0, R]``."""
        radius = self.truncation_radius
        pts = [0.0] + [
            radius * 2.0 ** (-(self.panels_per_ray - 1 - j))
            for j in range(self.panels_per_ray)
        ]
        if self.refine_at is not None and 0.0 < self.refine_at < radius:
            r0 = self.refine_at
            h = min(0.5 * r0, 0.5 * (radius - r0), 1.0)
            if h > 0:
                for j in range(self.refine_levels + 1):
                    step = h * 2.0 ** (-j)
                    pts.append(r0 - step)
                    pts.append(r0 + step)
                pts.append(r0)
        pts = np.array(sorted(pts))
        keep = np.concatenate([[True], np.diff(pts) > 1e-13 * radius])
        pts = pts[keep]
        # Bound the phase variation per panel: the cubic exponent oscillates
        # increasingly fast along the ray, so wide outer panels are split.
        refined = [pts[0]]
        for lo, hi in zip(pts[:-1], pts[1:]):
            width = hi - lo
            if width > self.max_panel_width:
                cuts = int(math.ceil(width / self.max_panel_width))
                refined.extend(lo + width * (j + 1) / cuts for j in range(cuts))
            else:
                refined.append(hi)
        return np.array(refined)

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Complex quadrature nodes and weights (with ``dz`` direction).

        Traversal by increasing imaginary part contributes ``+exp(i theta)``
        on the upper ray and ``-exp(-i theta)`` on the lower ray.
        """
        r, dr = _panel_quadrature(self.breakpoints(), self.nodes_per_panel)
        theta = 0.25 * math.pi if self.orientation == 1 else 0.75 * math.pi
        rot = complex(math.cos(theta), math.sin(theta))
        upper = self.anchor + r * rot
        lower = self.anchor + r * np.conj(rot)
        nodes = np.concatenate([upper, lower])
        weights = np.concatenate([dr * rot, -dr * np.conj(rot)])
        return nodes, weights


def ray_truncation_radius(lin_coeff: float, offset: float, tol: float = DEFAULT_TOL) -> float:
    """Radius at which cubic ray decay beats linear integrand growth.

    Solves ``lin * (r + offset) - r**3 / 12 = log(tol)`` for the largest
    root, with a safety margin; the cubic decay rate ``r**3/12`` is the
    conservative on-ray bound for ``|exp(z**3/3)|``.
    """
    target = -math.log(tol) + lin_coeff * offset + 10.0
    roots = np.roots([1.0 / 12.0, 0.0, -lin_coeff, -target])
    real = roots[np.abs(roots.imag) < 1e-9].real
    radius = float(real.max()) if real.size else 8.0
    return min(max(1.2 * radius, 8.0), 60.0)


# ---------------------------------------------------------------------------
# Kernel pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelQuery:
    """A single kernel evaluation request with explicit contour anchors."""

    t1: float
    x1: float
    t2: float
    x2: float
    alpha: float
    beta: float


def _check_admissible(q: KernelQuery, p: ParamSet) -> None:
    edges = domain_edges(p)
    if not (q.alpha + q.t1 < edges.underline_a and q.beta + q.t2 > edges.underline_b):
        raise Inadmissible(
            f"anchors alpha={q.alpha}, beta={q.beta} violate admissibility for "
            f"edges ({edges.underline_a}, {edges.underline_b}) at times "
            f"({q.t1}, {q.t2})"
        )


def gamma_segment(A: float, B: float) -> Optional[Tuple[complex, complex]]:
    """Intersection segment of the shifted ray contours, or ``None``.

    The plus-contour from ``A`` and minus-contour from ``B`` intersect in two
    conjugate points exactly when ``B > A``; the segment joining them is
    vertical with midpoint ``(A+B)/2``.
    """
    if B <= A:
        return None
    mid = 0.5 * (A + B)
    half = 0.5 * (B - A)
    return complex(mid, -half), complex(mid, half)


def k1(q: KernelQuery, order: int = 24) -> complex:
    """Vertical-segment piece of the kernel (0 when the segment is empty)."""
    seg = gamma_segment(q.alpha + q.t1, q.beta + q.t2)
    if seg is None:
        return 0.0 + 0.0j
    u_minus, u_plus = seg
    length = abs(u_plus - u_minus)
    scale = (
        abs(q.t2 - q.t1) * (abs(u_plus) + length) ** 2
        + abs(q.t1 * q.t1 - q.t2 * q.t2) * (abs(u_plus) + length)
        + abs(q.x2 - q.x1) * (abs(u_plus) + length)
    )
    npanels = max(2, int(math.ceil(length * (1.0 + scale) / 8.0)))
    npanels = min(npanels, 64)
    s, ds = _panel_quadrature(np.linspace(0.0, 1.0, npanels + 1), order)
    w = u_minus + s * (u_plus - u_minus)
    dw = ds * (u_plus - u_minus)
    expo = (
        (q.t2 - q.t1) * w * w
        + (q.t1 * q.t1 - q.t2 * q.t2) * w
        + w * (q.x2 - q.x1)
        + q.x1 * q.t1
        - q.x2 * q.t2
        - q.t1 ** 3 / 3.0
        + q.t2 ** 3 / 3.0
    )
    return complex(np.sum(np.exp(expo) * dw) / (2j * math.pi))


def k2(q: KernelQuery) -> float:
    """Closed-form heat-type piece; nonzero only for ``t2 > t1``."""
    if q.t2 <= q.t1:
        return 0.0
    dt = q.t2 - q.t1
    expo = (
        -((q.x2 - q.x1) ** 2) / (4.0 * dt)
        - dt * (q.x2 + q.x1) / 2.0
        + dt ** 3 / 12.0
    )
    return -math.exp(expo) / math.sqrt(4.0 * math.pi * dt)


def _k3_contours(
    q: KernelQuery,
    p: ParamSet,
    order: int,
    panels: int,
    tol: float,
) -> Tuple[ContourSpec, ContourSpec]:
    A = q.alpha + q.t1
    B = q.beta + q.t2
    rstar = (B - A) / _SQRT2 if B > A else None
    weight_sum = (
        sum(p.a_plus) + sum(p.b_plus) + sum(p.a_minus) + sum(p.b_minus)
        + abs(p.c_plus) + abs(p.c_minus)
    )
    lin = 5.0 * weight_sum + abs(q.x1) + abs(q.x2) + 1.0
    offset = abs(q.alpha) + abs(q.beta) + abs(q.t1) + abs(q.t2) + 1.0
    radius = ray_truncation_radius(lin, offset, tol)
    if rstar is not None:
        radius = max(radius, 2.0 * rstar + 4.0)
    zc = ContourSpec(q.alpha, 1, radius, panels, order, refine_at=rstar)
    wc = ContourSpec(q.beta, -1, radius, panels, order, refine_at=rstar)
    return zc, wc


def k3(
    q: KernelQuery,
    p: ParamSet,
    order: int = 24,
    panels: int = 10,
    tol: float = DEFAULT_TOL,
    guard: float = DEFAULT_GUARD,
) -> complex:
    """Double-contour piece, by tensor quadrature on the two ray contours."""
    _check_admissible(q, p)
    zc, wc = _k3_contours(q, p, order, panels, tol)
    z, wz = zc.nodes()
    w, ww = wc.nodes()
    fz = np.exp(z ** 3 / 3.0 - q.x1 * z) * phi(z + q.t1, p, guard=guard)
    gw = np.exp(-(w ** 3) / 3.0 + q.x2 * w) * phi_reciprocal(w + q.t2, p, guard=guard)
    denom = (z[:, None] + q.t1) - (w[None, :] + q.t2)
    if np.any(denom == 0):
        raise PoleProximity("contour node pair coincides at the crossing")
    total = (wz * fz) @ (1.0 / denom) @ (ww * gw)
    return complex(total / (2j * math.pi) ** 2)


def kernel(
    q: KernelQuery,
    p: ParamSet,
    order: int = 24,
    panels: int = 10,
    tol: float = DEFAULT_TOL,
) -> complex:
    """Full kernel ``K = K1 + K2 + K3`` for an explicit query."""
    _check_admissible(q, p)
    return k1(q, order=order) + k2(q) + k3(q, p, order=order, panels=panels, tol=tol)


def default_anchors(p: ParamSet, t1: float, t2: float) -> Tuple[float, float]:
    """Numerically comfortable admissible anchors for the given times.

    Prefers anchor pairs whose shifted contours do not cross (empty segment
    for ``K1``); when both domain edges coincide the crossing is unavoidable
    and anchors straddle the common edge symmetrically.
    """
    edges = domain_edges(p)
    ua, ub = edges.underline_a, edges.underline_b

    if p.klass == "positive" and t1 == t2 and math.isfinite(ua) and ua > t1 > ub:
        alpha = 0.5 * min(ua - t1, 1.0)
        beta = 0.0
        if alpha + t1 < ua and beta + t2 > ub:
            return alpha, beta

    if math.isfinite(ua) and math.isfinite(ub):
        gap = ua - ub
        if gap > 0:
            margin = 0.25 * min(1.0, gap)
            A, B = ua - margin, ub + margin
        else:
            A, B = ua - 0.5, ub + 0.5
    elif math.isfinite(ua):
        A = ua - 0.5
        B = A - 2.0
    elif math.isfinite(ub):
        B = ub + 0.5
        A = B + 2.0
    else:
        A, B = 1.0, -1.0
    return A - t1, B - t2


def kernel_value(
    p: ParamSet,
    t1: float,
    x1: float,
    t2: float,
    x2: float,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    order: int = 24,
    panels: int = 10,
    tol: float = DEFAULT_TOL,
) -> complex:
    """Convenience wrapper: evaluate ``K`` with default anchors if omitted."""
    if alpha is None or beta is None:
        d_alpha, d_beta = default_anchors(p, t1, t2)
        alpha = d_alpha if alpha is None else alpha
        beta = d_beta if beta is None else beta
    q = KernelQuery(t1=t1, x1=x1, t2=t2, x2=x2, alpha=alpha, beta=beta)
    return kernel(q, p, order=order, panels=panels, tol=tol)


# ---------------------------------------------------------------------------
# Equal-time grid evaluation (shared by the Fredholm series)
# ---------------------------------------------------------------------------


def kernel_grid(
    p: ParamSet,
    t: float,
    xs: np.ndarray,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    order: int = 24,
    panels: int = 10,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Matrix ``K(t, xs[i]; t, xs[j])`` via separable tensor quadrature.

    The ``x`` dependence of the ``K3`` integrand factors through
    ``exp(-x1 z)`` and ``exp(x2 w)``, so one contour-node evaluation serves
    the whole grid.  ``K2`` vanishes at equal times and ``K1`` has a closed
    form on the vertical segment.
    """
    xs = np.asarray(xs, dtype=float)
    if alpha is None or beta is None:
        d_alpha, d_beta = default_anchors(p, t, t)
        alpha = d_alpha if alpha is None else alpha
        beta = d_beta if beta is None else beta
    x_ref = float(np.max(np.abs(xs))) if xs.size else 0.0
    q = KernelQuery(t1=t, x1=x_ref, t2=t, x2=x_ref, alpha=alpha, beta=beta)
    _check_admissible(q, p)
    zc, wc = _k3_contours(q, p, order, panels, tol)
    z, wz = zc.nodes()
    w, ww = wc.nodes()
    fz = wz * np.exp(z ** 3 / 3.0) * phi(z + t, p)
    gw = ww * np.exp(-(w ** 3) / 3.0) * phi_reciprocal(w + t, p)
    denom = (z[:, None] + t) - (w[None, :] + t)
    if np.any(denom == 0):
        raise PoleProximity("contour node pair coincides at the crossing")
    ez = np.exp(-np.outer(xs, z))
    ew = np.exp(np.outer(w, xs))
    out = (ez * fz) @ (1.0 / denom) @ (gw[:, None] * ew)
    out = out / (2j * math.pi) ** 2

    seg = gamma_segment(alpha + t, beta + t)
    if seg is not None:
        u_minus, u_plus = seg
        c = xs[None, :] - xs[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            seg_int = np.where(
                c == 0.0,
                u_plus - u_minus,
                (np.exp(c * u_plus) - np.exp(c * u_minus)) / np.where(c == 0.0, 1.0, c),
            )
        out = out + np.exp(t * (-c)) * seg_int / (2j * math.pi)
    return out
