"""Large-time moment formulas and Fredholm gap probabilities.

The rescaled point measure at time ``t`` counts the values
``t**-1 * (A_i(t) - t**2)`` (slope coordinates), and the flat measure counts
``A_i(t)`` directly.  For positive-class parameters both are determinantal,
and their first/second factorial moments over half-lines reduce to double
(respectively four-fold) contour integrals with the weight
``Phi(z) = prod (1 + b_i z) / (1 - a_i z)``.

All quadratures here use ray contours at +-45 / +-135 degrees with adaptive
truncation: the real part of the exponent is profiled along each ray to find
where the integrand dies, and panel widths are chosen from the observed
phase-oscillation rate.  Anchors sit near the large-``t`` saddle ``-alpha/2``
of each pairing, clamped inside the pole-free window.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Tuple

import numpy as np

from .kernel import (
    ContourSpec,
    _panel_quadrature,
    kernel_grid,
    phi,
    phi_reciprocal,
)
from .params import ParamSet

__all__ = [
    "DegenerateParams",
    "SeriesNotConverged",
    "window_index",
    "scaled_kernel",
    "first_moment",
    "first_moment_expanded",
    "second_factorial_moment",
    "btilde",
    "flat_first_moment",
    "gap_probability",
]

_TWO_PI_I = 2j * math.pi
_SQRT2 = math.sqrt(2.0)


class DegenerateParams(ValueError):
    """Positive parameter entries are not distinct; residues are not simple."""


class SeriesNotConverged(RuntimeError):
    """The Fredholm series tail bound exceeds tolerance at maximum order."""


def _require_positive_class(p: ParamSet) -> Tuple[np.ndarray, np.ndarray]:
    if p.klass != "positive":
        raise ValueError("moment formulas require positive-class parameters")
    return np.asarray(p.a_plus, dtype=float), np.asarray(p.b_plus, dtype=float)


def window_index(alpha_hat: float, p: ParamSet) -> int:
    """Number of slope thresholds ``-2/a_i`` strictly above ``alpha_hat``."""
    a, _ = _require_positive_class(p)
    return int(np.sum(1.0 / a[a > 0] < -alpha_hat / 2.0)) if a.size else 0


# ---------------------------------------------------------------------------
# Adaptive ray quadrature
# ---------------------------------------------------------------------------


def _ray_nodes(
    anchor: float,
    orientation: int,
    exponent: Callable[[np.ndarray], np.ndarray],
    order: int = 24,
    inner: float = 1e-3,
    scan_radius: float = 60.0,
    drop_nats: float = 55.0,
    live_nats: float = 30.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes/weights on a two-ray contour, sized from ``exponent``.

    ``exponent`` maps complex points to the (complex) exponent of the
    integrand, excluding bounded prefactors.  The contour is truncated where
    the real part has dropped ``drop_nats`` below its running maximum, and
    panel widths inside the live region are chosen so each panel carries a
    bounded amount of phase.
    """
    theta = 0.25 * math.pi if orientation == 1 else 0.75 * math.pi
    rot = complex(math.cos(theta), math.sin(theta))

    rmax_total = 0.0
    live_total = 0.0
    rate = 1.0
    rs = np.linspace(0.0, scan_radius, 1201)
    for branch in (rot, np.conj(rot)):
        g = exponent(anchor + rs * branch)
        re = np.real(g)
        peak = float(np.max(re))
        alive = re > peak - drop_nats
        rmax = float(rs[alive][-1]) if np.any(alive) else 1.0
        live = re > peak - live_nats
        live_end = float(rs[live][-1]) if np.any(live) else 1.0
        im_rate = np.abs(np.gradient(np.imag(g), rs))
        rate = max(rate, float(np.max(im_rate[live])) if np.any(live) else 1.0)
        rmax_total = max(rmax_total, rmax)
        live_total = max(live_total, live_end)
    rmax_total = min(max(rmax_total + 1.0, 4.0), scan_radius)
    live_total = min(max(live_total + 0.5, 2.0), rmax_total)
    mid_width = min(max(12.0 / rate, 0.02), 0.75)

    pts = [0.0]
    r, width = 0.0, inner
    while r < rmax_total:
        cap = mid_width if r < live_total else 0.75
        step = min(width, cap)
        r += step
        pts.append(min(r, rmax_total))
        width *= 2.0
    breaks = np.array(pts)
    keep = np.concatenate([[True], np.diff(breaks) > 1e-14 * rmax_total])
    breaks = breaks[keep]

    s, ds = _panel_quadrature(breaks, order)
    upper = anchor + s * rot
    lower = anchor + s * np.conj(rot)
    nodes = np.concatenate([upper, lower])
    weights = np.concatenate([ds * rot, -ds * np.conj(rot)])
    return nodes, weights


def _double_contour(
    z: np.ndarray,
    wz: np.ndarray,
    w: np.ndarray,
    ww: np.ndarray,
    fz: np.ndarray,
    gw: np.ndarray,
    power: int,
) -> complex:
    denom = z[:, None] - w[None, :]
    return complex((wz * fz) @ (denom ** (-power)) @ (ww * gw) / _TWO_PI_I ** 2)


# ---------------------------------------------------------------------------
# Anchors near the saddle
# ---------------------------------------------------------------------------


def _z_cap(a: np.ndarray) -> float:
    return 0.92 / float(a[0]) if a.size else math.inf


def _saddle_anchor(alpha_hat: float, cap: float) -> float:
    target = -alpha_hat / 2.0
    lo = min(0.25, cap / 4.0) if math.isfinite(cap) else 0.25
    hi = cap if math.isfinite(cap) else max(target, 1.0)
    return min(max(target, lo), hi)


def _first_moment_anchors(alpha_hat: float, p: ParamSet) -> Tuple[float, float]:
    a, _ = _require_positive_class(p)
    v = _saddle_anchor(alpha_hat, _z_cap(a))
    sep = min(0.1, v / 4.0)
    u = max(0.0, min(-alpha_hat / 2.0, v - sep))
    return v, u


# ---------------------------------------------------------------------------
# Kernel of the rescaled measure and its first moment
# ---------------------------------------------------------------------------


def scaled_kernel(
    x: float,
    y: float,
    t: float,
    p: ParamSet,
    order: int = 24,
) -> float:
    """Correlation kernel of the slope-coordinate point measure at time ``t``.

    Equals ``t * K(t, t x + t**2; t, t y + t**2)`` in terms of the raw
    kernel, evaluated here in its dedicated single-shift contour form.
    """
    a, _ = _require_positive_class(p)
    if t <= 0:
        raise ValueError("t must be positive")
    alpha = 0.5 * min(_z_cap(a), 1.0)

    def ez(z):
        return z ** 3 / 3.0 - z * z * t - z * t * x

    def ew(w):
        return -(w ** 3) / 3.0 + w * w * t + w * t * y

    z, wz = _ray_nodes(alpha, 1, ez, order=order)
    w, ww = _ray_nodes(0.0, -1, ew, order=order)
    fz = np.exp(ez(z)) * phi(z, p)
    gw = np.exp(ew(w)) * phi_reciprocal(w, p)
    val = _double_contour(z, wz, w, ww, fz, gw, power=1)
    return float((t * math.exp(t * t * (x - y)) * val).real)


def first_moment(
    alpha_hat: float,
    t: float,
    p: ParamSet,
    order: int = 24,
) -> float:
    """Expected number of slope-coordinate points in ``[alpha_hat, inf)``."""
    _require_positive_class(p)
    if t <= 0:
        raise ValueError("t must be positive")
    v, u = _first_moment_anchors(alpha_hat, p)

    def ez(z):
        return z ** 3 / 3.0 - z * z * t - z * t * alpha_hat

    def ew(w):
        return -(w ** 3) / 3.0 + w * w * t + w * t * alpha_hat

    z, wz = _ray_nodes(v, 1, ez, order=order)
    w, ww = _ray_nodes(u, -1, ew, order=order)
    fz = np.exp(ez(z)) * phi(z, p)
    gw = np.exp(ew(w)) * phi_reciprocal(w, p)
    return float(_double_contour(z, wz, w, ww, fz, gw, power=2).real)


def _phi_hat(j: int, a: np.ndarray, b: np.ndarray) -> float:
    """Residue weight of ``Phi`` at the ``j``-th pole (0-based index)."""
    aj = a[j]
    num = float(np.prod(1.0 + b / aj)) if b.size else 1.0
    others = np.delete(a, j)
    den = float(np.prod(1.0 - others / aj)) if others.size else 1.0
    return num / (den * aj)


def first_moment_expanded(
    alpha_hat: float,
    t: float,
    p: ParamSet,
    order: int = 24,
) -> float:
    """Residue-expanded first moment ``k + A_t + sum_j A_jt``.

    Requires distinct positive ``a`` entries (simple poles).  Contour offsets
    are ``u = -alpha_hat/2 + delta`` and ``v = -alpha_hat/2 + 2 delta`` with
    ``delta`` an eighth of the distance from ``-alpha_hat/2`` to the nearest
    pole ``1/a_i``.
    """
    a, b = _require_positive_class(p)
    if a.size != np.unique(a).size:
        raise DegenerateParams("positive a-entries must be distinct")
    k = window_index(alpha_hat, p)
    center = -alpha_hat / 2.0
    if a.size:
        eps0 = 0.5 * float(np.min(np.abs(center - 1.0 / a)))
        if eps0 == 0.0:
            raise ValueError("alpha_hat sits exactly on a window boundary")
    else:
        eps0 = 1.0
    delta = eps0 / 8.0
    u = center + delta
    v = center + 2.0 * delta

    def ez(z):
        return z ** 3 / 3.0 - z * z * t - z * t * alpha_hat

    def ew(w):
        return -(w ** 3) / 3.0 + w * w * t + w * t * alpha_hat

    z, wz = _ray_nodes(v, 1, ez, order=order)
    w, ww = _ray_nodes(u, -1, ew, order=order)
    fz = np.exp(ez(z)) * phi(z, p)
    gw = np.exp(ew(w)) * phi_reciprocal(w, p)
    a_t = _double_contour(z, wz, w, ww, fz, gw, power=2).real

    a_jt = 0.0
    for j in range(k):
        aj = a[j]
        pref = math.exp(aj ** -3 / 3.0 - aj ** -2 * t - t * alpha_hat / aj)
        integ = (
            np.exp(-(w ** 3) / 3.0 + w * w * t + w * t * alpha_hat)
            / (1.0 / aj - w) ** 2
            * phi_reciprocal(w, p)
        )
        val = np.sum(ww * integ) / _TWO_PI_I
        a_jt += float((pref * _phi_hat(j, a, b) * val).real)

    return float(k + a_t + a_jt)


# ---------------------------------------------------------------------------
# Second factorial moment
# ---------------------------------------------------------------------------


def btilde(
    alpha_tilde: float,
    beta_tilde: float,
    t: float,
    p: ParamSet,
    order: int = 24,
) -> float:
    """Four-fold contour integral entering the second factorial moment.

    Symmetric in its two threshold arguments; converges to ``min(p, q)``
    where ``p`` and ``q`` index the windows containing the thresholds.
    Computed on separated contours (all ``w`` anchors strictly left of all
    ``z`` anchors) so the integrand is singularity-free.
    """
    a, _ = _require_positive_class(p)
    if alpha_tilde > beta_tilde:
        alpha_tilde, beta_tilde = beta_tilde, alpha_tilde
    cap = _z_cap(a)
    z1a = _saddle_anchor(alpha_tilde, cap)  # pairs alpha in the exponent
    z2a = _saddle_anchor(beta_tilde, cap)
    wcap = 0.75 * min(z1a, z2a)
    w1a = max(0.0, min(-beta_tilde / 2.0, wcap))
    w2a = max(0.0, min(-alpha_tilde / 2.0, wcap))

    def ez(thresh):
        return lambda z: z ** 3 / 3.0 - z * z * t - z * t * thresh

    def ew(thresh):
        return lambda w: -(w ** 3) / 3.0 + w * w * t + w * t * thresh

    z1, wz1 = _ray_nodes(z1a, 1, ez(alpha_tilde), order=order)
    z2, wz2 = _ray_nodes(z2a, 1, ez(beta_tilde), order=order)
    w1, ww1 = _ray_nodes(w1a, -1, ew(beta_tilde), order=order)
    w2, ww2 = _ray_nodes(w2a, -1, ew(alpha_tilde), order=order)

    az1 = wz1 * np.exp(ez(alpha_tilde)(z1)) * phi(z1, p)
    bw1 = ww1 * np.exp(ew(beta_tilde)(w1)) * phi_reciprocal(w1, p)
    cz2 = wz2 * np.exp(ez(beta_tilde)(z2)) * phi(z2, p)
    dw2 = ww2 * np.exp(ew(alpha_tilde)(w2)) * phi_reciprocal(w2, p)

    p11 = 1.0 / (z1[:, None] - w1[None, :])
    p12 = 1.0 / (z1[:, None] - w2[None, :])
    p21 = 1.0 / (z2[:, None] - w1[None, :])
    p22 = 1.0 / (z2[:, None] - w2[None, :])

    total = np.einsum(
        "i,j,k,l,ij,il,kj,kl->",
        az1, bw1, cz2, dw2, p11, p12, p21, p22,
        optimize=True,
    )
    return float((total / _TWO_PI_I ** 4).real)


def second_factorial_moment(
    alpha_hat: float,
    beta_hat: float,
    t: float,
    p: ParamSet,
    order: int = 24,
) -> float:
    """``E[M (M - 1)]`` for the count ``M`` of slope points in the window.

    Decomposes as ``A_t - B_t`` with ``A_t = (A1 - A2)**2`` built from first
    moments and ``B_t`` a signed combination of four-fold integrals.
    """
    if beta_hat <= alpha_hat:
        raise ValueError("window requires alpha_hat < beta_hat")
    a1 = first_moment(alpha_hat, t, p, order=order)
    a2 = first_moment(beta_hat, t, p, order=order)
    a_t = (a1 - a2) ** 2
    b_t = (
        btilde(alpha_hat, alpha_hat, t, p, order=order)
        + btilde(beta_hat, beta_hat, t, p, order=order)
        - 2.0 * btilde(alpha_hat, beta_hat, t, p, order=order)
    )
    return float(a_t - b_t)


# ---------------------------------------------------------------------------
# Flat first moment
# ---------------------------------------------------------------------------


def flat_first_moment(
    alpha_hat: float,
    t: float,
    p: ParamSet,
    order: int = 24,
) -> float:
    """Expected number of unscaled points in ``[alpha_hat, inf)``.

    Evaluated in residue-expanded form ``J_a + A_t + sum_j A_jt`` with the
    deformed contours anchored at 1 and 0 after re-centering at ``t``; the
    direct double-contour representation is numerically hopeless at large
    ``t`` (its integrand spans a dynamic range of order ``exp(t**3)``),
    while the expanded pieces are tame and individually vanish as ``t``
    grows.
    """
    a, b = _require_positive_class(p)
    j_a = int(np.sum(a > 0))
    if j_a and t <= 1.0 + 1.0 / float(a[a > 0].min()):
        raise ValueError("t must exceed 1 + 1/a_J for the deformed contours")
    if a.size != np.unique(a).size:
        raise DegenerateParams("positive a-entries must be distinct")

    def ez(z):
        return z ** 3 / 3.0 - z * alpha_hat

    def ew(w):
        return -(w ** 3) / 3.0 + w * alpha_hat

    z, wz = _ray_nodes(1.0, 1, ez, order=order)
    w, ww = _ray_nodes(0.0, -1, ew, order=order)
    fz = np.exp(ez(z)) * phi(z + t, p)
    gw = np.exp(ew(w)) * phi_reciprocal(w + t, p)
    a_t = _double_contour(z, wz, w, ww, fz, gw, power=2).real

    a_jt = 0.0
    for j in range(j_a):
        aj = a[j]
        pref = math.exp((1.0 / aj - t) ** 3 / 3.0 - (1.0 / aj - t) * alpha_hat)
        integ = (
            np.exp(-(w ** 3) / 3.0 + w * alpha_hat)
            / (1.0 / aj - w - t) ** 2
            * phi_reciprocal(w + t, p)
        )
        val = np.sum(ww * integ) / _TWO_PI_I
        a_jt += float((pref * _phi_hat(j, a, b) * val).real)

    return float(j_a + a_t + a_jt)


# ---------------------------------------------------------------------------
# Fredholm gap probability
# ---------------------------------------------------------------------------


def gap_probability(
    t: float,
    a_threshold: float,
    p: ParamSet,
    order: int = 12,
    grid_panels: int = 5,
    nodes_per_panel: int = 12,
    length: float = 10.0,
    tail_tol: float = 1e-8,
    quad_order: int = 24,
) -> float:
    """``P(top curve at time t >= a_threshold)`` by a truncated series.

    Discretizes the kernel on Gauss-Legendre nodes over
    ``[a_threshold, a_threshold + length]``, computes elementary symmetric
    functions of the spectrum (the series terms) by Newton's identities, and
    bounds the truncation tail with Hadamard's inequality.
    """
    breaks = np.linspace(a_threshold, a_threshold + length, grid_panels + 1)
    xs, wq = _panel_quadrature(breaks, nodes_per_panel)
    kmat = kernel_grid(p, t, xs, order=quad_order)
    if np.max(np.abs(kmat.imag)) > 1e-8 * (1.0 + np.max(np.abs(kmat.real))):
        raise SeriesNotConverged("kernel grid has a non-negligible imaginary part")
    sw = np.sqrt(wq)
    ktil = sw[:, None] * kmat.real * sw[None, :]
    eigs = np.linalg.eigvals(ktil)

    powers = [np.sum(eigs ** i) for i in range(1, order + 1)]
    elems = [1.0 + 0.0j]
    for n in range(1, order + 1):
        acc = 0.0 + 0.0j
        for i in range(1, n + 1):
            acc += (-1.0) ** (i - 1) * elems[n - i] * powers[i - 1]
        elems.append(acc / n)
    prob = sum((-1.0) ** (n - 1) * elems[n] for n in range(1, order + 1))

    hadamard_c = float(np.sum(wq * np.abs(np.diag(kmat.real))))
    tail = 0.0
    for n in range(order + 1, order + 61):
        term = n ** (n / 2.0) * hadamard_c ** n / math.factorial(n)
        tail += term
        if term < 1e-300:
            break
    if tail > tail_tol:
        raise SeriesNotConverged(
            f"Hadamard tail bound {tail:.3e} exceeds tolerance {tail_tol:.1e}"
        )
    return float(prob.real)
