"""Geodesics, distance, geodesic spheres and ball volumes.

Every geodesic starts at the origin with unit speed and initial direction
``(cos(theta) cos(alpha), cos(theta) sin(alpha), sin(theta))``. Its horizontal
projection is a circle through the origin; its linearised height grows
monotonically with the turning angle ``sin(theta) * t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nilpack import kernels
from nilpack.core import ORIGIN, NilDomainError, NilIsometry, NilPoint, normalize_angle

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

VOLUME_ABS_TOL = 1e-9
QUADRATURE_EPS = 1e-8


class SphereNonexistenceError(ValueError):
    """Geodesic spheres and balls only exist for radii in [0, 2*pi]."""


class DistanceRangeError(ValueError):
    """The minimal geodesic is longer than the supported cap of 2*pi."""


@dataclass(frozen=True, slots=True)
class GeodesicParams:
    alpha: float
    theta: float
    t: float

    @property
    def w(self) -> float:
        return math.sin(self.theta)

    @property
    def c(self) -> float:
        return math.cos(self.theta)


@dataclass(frozen=True, slots=True)
class SphereProfile:
    """Horizontal radius X and linearised height Z of S(R) at elevation theta."""

    radius: float
    theta: float
    X: float
    Z: float


@dataclass(frozen=True, slots=True)
class DistanceSolution:
    params: GeodesicParams
    length: float
    residual: float


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray
    faces: np.ndarray

    def transformed(self, g: NilIsometry) -> TriangleMesh:
        return TriangleMesh(g.apply_array(self.vertices), self.faces.copy())

    @property
    def euler_characteristic(self) -> int:
        edges = np.sort(np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]],
                                        self.faces[:, [2, 0]]]), axis=1)
        n_edges = len(np.unique(edges, axis=0))
        return len(self.vertices) - n_edges + len(self.faces)

    def enclosed_volume(self) -> float:
        v = self.vertices[self.faces]
        return float(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum() / 6.0)


def _as_point(p) -> NilPoint:
    if isinstance(p, NilPoint):
        return p
    a, b, c = (float(v) for v in p)
    return NilPoint(a, b, c)


# -- stable pieces shared by the geodesic and sphere formulas ----------------

def _sinc_half(v):
    """sin(v/2) / (v/2)."""
    return np.sinc(np.asarray(v, dtype=float) / TWO_PI)


def _lift(v):
    """(v - sin v) / v**2, the vertical gain per unit c**2 t**2 / 2."""
    v = np.asarray(v, dtype=float)
    small = np.abs(v) < 0.1
    v2 = v * v
    series = v * (1.0 / 6.0 - v2 * (1.0 / 120.0 - v2 * (1.0 / 5040.0 - v2 / 362880.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (v - np.sin(v)) / v2
    return np.where(small, series, direct)


def _cos_sin(theta):
    theta = np.asarray(theta, dtype=float)
    c = np.where(np.abs(theta) == HALF_PI, 0.0, np.cos(theta))
    return c, np.sin(theta)


def geodesic_points(alpha, theta, t) -> np.ndarray:
    """Vectorised endpoints of unit-speed geodesics from the origin.

    Uses the helix form with the height written as
    ``z = wt + c^2 (wt - sin wt) / (2 w^2) + (c/w)^2 sin^2(wt/2) sin(wt + 2 alpha)``;
    near w = 0 the series of the same expression is used, which reduces to
    the straight-line geodesic at w = 0.
    """
    alpha, theta, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (alpha, theta, t)))
    c, w = _cos_sin(theta)
    v = w * t
    stretch = _sinc_half(v)
    radius = c * t * stretch
    phase = alpha + 0.5 * v
    ct2 = (c * t) ** 2
    z = v + 0.5 * ct2 * _lift(v) + 0.25 * ct2 * stretch ** 2 * np.sin(v + 2.0 * alpha)
    return np.stack([radius * np.cos(phase), radius * np.sin(phase), z], axis=-1)


def geodesic_point(alpha: float, theta: float, t: float) -> NilPoint:
    if t < 0:
        raise NilDomainError(f"arc length must be non-negative, got {t}")
    return NilPoint.from_array(geodesic_points(alpha, theta, t))


def sphere_exists(radius: float) -> bool:
    return 0.0 <= radius <= TWO_PI


def _check_radius(radius: float):
    if not sphere_exists(radius):
        raise SphereNonexistenceError(f"no geodesic sphere of radius {radius} (need 0 <= R <= 2*pi)")


def ball_convexity_bound() -> float:
    return HALF_PI


def is_convex(radius: float) -> bool:
    return 0.0 <= radius <= HALF_PI


def sphere_profiles(radius: float, theta) -> tuple[np.ndarray, np.ndarray]:
    """(X, Z) of the sphere of radius R at elevations theta (vectorised)."""
    c, w = _cos_sin(theta)
    v = w * radius
    X = c * radius * _sinc_half(v)
    Z = v + 0.5 * (c * radius) ** 2 * _lift(v)
    return X, Z


def sphere_profile(radius: float, theta: float) -> SphereProfile:
    _check_radius(radius)
    X, Z = sphere_profiles(radius, theta)
    return SphereProfile(radius, theta, float(X), float(Z))


def sphere_points(radius: float, theta, phi) -> np.ndarray:
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    X, Z = sphere_profiles(radius, theta)
    x = X * np.cos(phi)
    y = X * np.sin(phi)
    z = Z + 0.25 * X * X * np.sin(2.0 * phi)
    flat = theta == 0.0
    if np.any(flat):
        z = np.where(flat, 0.5 * radius * radius * np.cos(phi) * np.sin(phi), z)
    return np.stack([x, y, z], axis=-1)


def sphere_point(radius: float, theta: float, phi: float) -> NilPoint:
    """Point of the geodesic sphere S(R) about the origin.

    ``phi`` is the azimuth of the endpoint, i.e. ``alpha + w R / 2`` for the
    geodesic with initial azimuth ``alpha``.
    """
    _check_radius(radius)
    if not -HALF_PI <= theta <= HALF_PI:
        raise NilDomainError(f"theta must lie in [-pi/2, pi/2], got {theta}")
    return NilPoint.from_array(sphere_points(radius, theta, phi))


def _relative(p1: NilPoint, p2: NilPoint) -> tuple[float, float, float]:
    # p2 seen from p1: apply the inverse of translation_to(p1)
    da, db = p2.a - p1.a, p2.b - p1.b
    return da, db, p2.c - p1.c - p1.a * db


def distance(p1, p2=None) -> DistanceSolution:
    """Minimal geodesic from ``p1`` to ``p2`` (from the origin when ``p2`` is None).

    The problem is reduced to the origin by a translation; rotations about
    the z-axis leave both the horizontal radius and the linearised height of
    the target unchanged, and those two numbers determine the minimal
    geodesic through a single monotone equation in the turning angle.
    """
    if p2 is None:
        p1, p2 = ORIGIN, p1
    p1, p2 = _as_point(p1), _as_point(p2)
    x, y, z = _relative(p1, p2)
    r = math.hypot(x, y)
    t, theta, turn = kernels.canonical_geodesic(r, z - 0.5 * x * y)
    if t > TWO_PI * (1.0 + 1e-12):
        raise DistanceRangeError(f"minimal geodesic has length {t:.6g} > 2*pi")
    alpha = normalize_angle(math.atan2(y, x) - 0.5 * turn) if r > 0.0 else 0.0
    params = GeodesicParams(alpha, theta, t)
    end = geodesic_point(alpha, theta, t)
    residual = max(abs(end.a - x), abs(end.b - y), abs(end.c - z))
    return DistanceSolution(params, t, residual)


def dist(p1, p2=None) -> float:
    """Shorthand for ``distance(...).length``."""
    return distance(p1, p2).length


def ball_integrand(theta: float, radius: float) -> float:
    return kernels.ball_integrand(theta, radius)


def ball_volume(radius: float, tol: float = VOLUME_ABS_TOL) -> float:
    """Volume of the geodesic ball of radius R.

    Solid of revolution in the linearised model (the quadratic map preserves
    volume): ``2 pi * int_0^{pi/2} X^2 dZ/dtheta dtheta``. The sliver
    [0, eps] is taken from the analytic limit of the integrand, the rest by
    adaptive Simpson.
    """
    _check_radius(radius)
    if radius == 0.0:
        return 0.0
    eps = QUADRATURE_EPS
    # tiny balls: keep the tolerance well below the volume itself
    tol = min(tol, 1e-9 * radius ** 3)
    body, _ = kernels.adaptive_simpson_ball(radius, eps, HALF_PI, tol / TWO_PI, 50)
    r2 = radius * radius
    f0 = r2 * (radius + r2 * radius / 12.0)
    sliver = 0.5 * eps * (f0 + kernels.ball_integrand(eps, radius))
    return float(TWO_PI * (body + sliver))


def monte_carlo_ball_volume(radius: float, n_samples: int = 1_000_000, seed: int = 0,
                            chunk: int = 200_000) -> tuple[float, float]:
    """Hit-or-miss estimate of the ball volume from the distance function alone.

    Samples uniformly in linearised coordinates inside a box that provably
    contains the ball (|x|, |y| <= R and |z_lin| <= R + R^2/4, since the
    linearised height changes at most at rate sqrt(1 + s^2/4) along a unit
    speed path at distance s). Returns ``(estimate, standard_error)``.
    """
    _check_radius(radius)
    rng = np.random.default_rng(seed)
    hz = radius + 0.25 * radius * radius
    box = (2.0 * radius) ** 2 * 2.0 * hz
    hits = 0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        pts = rng.uniform(-1.0, 1.0, size=(m, 3)) * np.array([radius, radius, hz])
        pts[:, 2] += 0.5 * pts[:, 0] * pts[:, 1]
        hits += int(np.count_nonzero(kernels.distances_from_origin(pts) <= radius))
        done += m
    frac = hits / n_samples
    return box * frac, box * math.sqrt(frac * (1.0 - frac) / n_samples)


def sphere_mesh(radius: float, n_theta: int = 32, n_phi: int = 64) -> TriangleMesh:
    """Closed triangulation of S(R).

    ``n_theta - 1`` latitude rings of ``n_phi`` vertices plus one vertex per
    pole; an even ``n_theta`` puts a ring exactly on theta = 0.
    """
    _check_radius(radius)
    if n_theta < 4 or n_phi < 4:
        raise ValueError("n_theta and n_phi must both be at least 4")
    # symmetric grid so the middle ring lands on theta = 0 exactly
    thetas = HALF_PI * (2.0 * np.arange(1, n_theta) - n_theta) / n_theta
    phis = -math.pi + TWO_PI * np.arange(1, n_phi + 1) / n_phi
    th, ph = np.meshgrid(thetas, phis, indexing="ij")
    rings = sphere_points(radius, th, ph).reshape(-1, 3)
    south = sphere_points(radius, -HALF_PI, 0.0)
    north = sphere_points(radius, HALF_PI, 0.0)
    vertices = np.vstack([rings, south[None], north[None]])

    n_rings = n_theta - 1
    i_south, i_north = n_rings * n_phi, n_rings * n_phi + 1
    j = np.arange(n_phi)
    jn = (j + 1) % n_phi
    faces = []
    for k in range(n_rings - 1):
        lo, hi = k * n_phi, (k + 1) * n_phi
        faces.append(np.stack([lo + j, lo + jn, hi + jn], axis=1))
        faces.append(np.stack([lo + j, hi + jn, hi + j], axis=1))
    faces.append(np.stack([np.full(n_phi, i_south), jn, j], axis=1))
    top = (n_rings - 1) * n_phi
    faces.append(np.stack([top + j, top + jn, np.full(n_phi, i_north)], axis=1))
    return TriangleMesh(vertices, np.vstack(faces).astype(np.int64))
