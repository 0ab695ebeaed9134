"""Hot numeric kernels: the canonical distance solve and the ball-volume quadrature.

Scalar kernels are written once in numba-compatible Python and compiled with
``@njit`` unless ``NILPACK_DISABLE_NUMBA`` is set. Batch kernels have two
implementations, a compiled loop and a vectorised numpy version, and
``distances_from_origin`` dispatches on the same flag.

Coordinates follow the affine model: a point ``(x, y, z)`` has linearised
height ``z - x*y/2``. Geodesics from the origin project to circles through
the origin; in the frame where the target sits on the positive x-axis the
endpoint equations reduce to one monotone equation in the turning angle
``u = w*t`` (``w = sin(theta)``)::

    |z_lin| = u + r**2 * (u - sin u) / (8 sin(u/2)**2),   0 <= u < 2*pi

and the arc length is ``t = hypot(u, r * (u/2) / sin(u/2))``.
"""
from __future__ import annotations

import math

import numpy as np

from nilpack._jit import USE_NUMBA, njit

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# below this turning angle the closed forms lose digits to cancellation
_SERIES_CUTOFF = 0.1


@njit
def turn_ratio(u):
    """(u - sin u) / (8 sin^2(u/2)), smooth at u = 0."""
    if u < _SERIES_CUTOFF:
        u2 = u * u
        return u * (1.0 / 12.0 + u2 * (1.0 / 360.0 + u2 * (1.0 / 10080.0 + u2 / 302400.0)))
    s = math.sin(0.5 * u)
    return (u - math.sin(u)) / (8.0 * s * s)


@njit
def turn_ratio_deriv(u):
    if u < _SERIES_CUTOFF:
        u2 = u * u
        return 1.0 / 12.0 + u2 * (1.0 / 120.0 + u2 * (1.0 / 2016.0 + u2 / 43200.0))
    s = math.sin(0.5 * u)
    den = 8.0 * s * s
    num = u - math.sin(u)
    return (2.0 * s * s * den - 4.0 * num * math.sin(u)) / (den * den)


@njit
def half_angle_stretch(u):
    """(u/2) / sin(u/2): ratio of horizontal arc length to chord."""
    if u < _SERIES_CUTOFF:
        u2 = u * u
        return math.sqrt(1.0 + u2 * (1.0 / 12.0 + u2 * (1.0 / 240.0 + u2 / 6048.0)))
    return 0.5 * u / math.sin(0.5 * u)


@njit
def solve_turn(r, height):
    """Root u in (0, 2*pi) of u + r^2 turn_ratio(u) = height, height > 0, r > 0.

    Safeguarded Newton inside a shrinking bracket; the left side is strictly
    increasing and diverges at 2*pi, so the root is unique.
    """
    r2 = r * r
    lo = 0.0
    hi = TWO_PI
    u = min(height, math.pi)
    for _ in range(200):
        f = u + r2 * turn_ratio(u) - height
        if f == 0.0:
            return u
        if f > 0.0:
            hi = u
        else:
            lo = u
        step = f / (1.0 + r2 * turn_ratio_deriv(u))
        un = u - step
        if not (lo < un < hi):
            un = 0.5 * (lo + hi)
        if abs(un - u) <= 4e-16 * max(1.0, u) or hi - lo <= 4e-16 * max(1.0, u):
            return un
        u = un
    return u


@njit
def canonical_geodesic(r, zlin):
    """Minimal geodesic from the origin to a point at horizontal radius r >= 0
    and linearised height zlin.

    Returns ``(t, theta, u)``: arc length, elevation angle and signed turning
    angle ``w*t``. No cap is applied to ``t``.
    """
    height = abs(zlin)
    sign = 1.0 if zlin >= 0.0 else -1.0
    if r == 0.0:
        if height <= TWO_PI:
            return height, sign * HALF_PI, sign * height
        # vertical segment loses to the helix closing after one full turn
        t = math.sqrt(4.0 * math.pi * height - 4.0 * math.pi * math.pi)
        return t, sign * math.asin(TWO_PI / t), sign * TWO_PI
    if height == 0.0:
        return r, 0.0, 0.0
    u = solve_turn(r, height)
    horizontal = r * half_angle_stretch(u)
    return math.hypot(u, horizontal), sign * math.atan2(u, horizontal), sign * u


@njit
def distance_from_origin(x, y, z):
    """Arc length of the minimal geodesic from the origin to (x, y, z)."""
    r = math.hypot(x, y)
    t, _, _ = canonical_geodesic(r, z - 0.5 * x * y)
    return t


@njit
def _distances_loop(points):
    n = points.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = distance_from_origin(points[i, 0], points[i, 1], points[i, 2])
    return out


def _turn_ratio_np(u):
    u = np.asarray(u, dtype=float)
    small = u < _SERIES_CUTOFF
    u2 = u * u
    series = u * (1.0 / 12.0 + u2 * (1.0 / 360.0 + u2 * (1.0 / 10080.0 + u2 / 302400.0)))
    s = np.sin(0.5 * u)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (u - np.sin(u)) / (8.0 * s * s)
    return np.where(small, series, direct)


def _half_angle_stretch_np(u):
    small = u < _SERIES_CUTOFF
    u2 = u * u
    series = np.sqrt(1.0 + u2 * (1.0 / 12.0 + u2 * (1.0 / 240.0 + u2 / 6048.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = 0.5 * u / np.sin(0.5 * u)
    return np.where(small, series, direct)


def distances_from_origin_numpy(points):
    """Vectorised twin of the compiled loop: plain bisection on the turning angle."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    r = np.hypot(x, y)
    height = np.abs(z - 0.5 * x * y)
    out = np.empty(len(pts))

    vertical = r == 0.0
    flat = (height == 0.0) & ~vertical
    gen = ~(vertical | flat)

    hv = height[vertical]
    with np.errstate(invalid="ignore"):
        helix = np.sqrt(4.0 * np.pi * hv - 4.0 * np.pi ** 2)
    out[vertical] = np.where(hv <= TWO_PI, hv, helix)
    out[flat] = r[flat]

    rg, hg = r[gen], height[gen]
    r2 = rg * rg
    lo = np.zeros_like(rg)
    hi = np.full_like(rg, TWO_PI)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        above = mid + r2 * _turn_ratio_np(mid) > hg
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    u = 0.5 * (lo + hi)
    out[gen] = np.hypot(u, rg * _half_angle_stretch_np(u))
    return out


def distances_from_origin(points):
    """Minimal geodesic length from the origin to each row of an (n, 3) array."""
    pts = np.ascontiguousarray(points, dtype=float).reshape(-1, 3)
    if USE_NUMBA:
        return _distances_loop(pts)
    return distances_from_origin_numpy(pts)


# -- ball volume ------------------------------------------------------------

@njit
def ball_integrand(theta, radius):
    """X(theta)^2 * dZ/dtheta for the rotationally symmetric profile of the
    geodesic sphere, rewritten so that theta -> 0 needs no special casing.

    X is the horizontal radius and Z the linearised height of the sphere
    point at elevation theta.
    """
    w = math.sin(theta)
    c = math.cos(theta)
    v = w * radius
    if abs(v) < _SERIES_CUTOFF:
        v2 = v * v
        sinc_half = 1.0 - v2 / 24.0 + v2 * v2 / 1920.0 - v2 * v2 * v2 / 322560.0
        q = v * (1.0 / 6.0 - v2 * (1.0 / 120.0 - v2 * (1.0 / 5040.0 - v2 / 362880.0)))
        dg = 1.0 / 12.0 - v2 * (1.0 / 80.0 - v2 * (1.0 / 2016.0 - v2 / 103680.0))
    else:
        sinc_half = math.sin(0.5 * v) / (0.5 * v)
        q = (v - math.sin(v)) / (v * v)
        dg = (v * (1.0 - math.cos(v)) - 2.0 * (v - math.sin(v))) / (2.0 * v * v * v)
    r2 = radius * radius
    x_prof = c * radius * sinc_half
    # Z = w R + c^2 G(w), G = (wR - sin wR) / (2 w^2)
    w_g = 0.5 * r2 * w * q
    g_prime = r2 * radius * dg
    dz = c * (radius - 2.0 * w_g + c * c * g_prime)
    return x_prof * x_prof * dz


@njit
def _simpson(fa, fm, fb, a, b):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


@njit
def adaptive_simpson_ball(radius, a, b, tol, max_depth):
    """Adaptive Simpson integral of ``ball_integrand(., radius)`` over [a, b].

    Iterative with an explicit stack; each accepted panel gets the Richardson
    correction. Returns ``(value, n_evals)``.
    """
    cap = 2 * max_depth + 8
    st_a = np.empty(cap)
    st_b = np.empty(cap)
    st_fa = np.empty(cap)
    st_fm = np.empty(cap)
    st_fb = np.empty(cap)
    st_tol = np.empty(cap)
    st_depth = np.empty(cap, dtype=np.int64)

    fa = ball_integrand(a, radius)
    fb = ball_integrand(b, radius)
    fm = ball_integrand(0.5 * (a + b), radius)
    n_evals = 3
    top = 0
    st_a[0] = a
    st_b[0] = b
    st_fa[0] = fa
    st_fm[0] = fm
    st_fb[0] = fb
    st_tol[0] = tol
    st_depth[0] = 0
    total = 0.0
    while top >= 0:
        a0 = st_a[top]
        b0 = st_b[top]
        fa0 = st_fa[top]
        fm0 = st_fm[top]
        fb0 = st_fb[top]
        tol0 = st_tol[top]
        d0 = st_depth[top]
        top -= 1
        m = 0.5 * (a0 + b0)
        flm = ball_integrand(0.5 * (a0 + m), radius)
        frm = ball_integrand(0.5 * (m + b0), radius)
        n_evals += 2
        whole = _simpson(fa0, fm0, fb0, a0, b0)
        left = _simpson(fa0, flm, fm0, a0, m)
        right = _simpson(fm0, frm, fb0, m, b0)
        diff = left + right - whole
        if d0 >= max_depth or abs(diff) <= 15.0 * tol0:
            total += left + right + diff / 15.0
            continue
        top += 1
        st_a[top] = m
        st_b[top] = b0
        st_fa[top] = fm0
        st_fm[top] = frm
        st_fb[top] = fb0
        st_tol[top] = 0.5 * tol0
        st_depth[top] = d0 + 1
        top += 1
        st_a[top] = a0
        st_b[top] = m
        st_fa[top] = fa0
        st_fm[top] = flm
        st_fb[top] = fm0
        st_tol[top] = 0.5 * tol0
        st_depth[top] = d0 + 1
    return total, n_evals
