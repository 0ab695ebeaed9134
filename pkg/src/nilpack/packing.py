"""Geodesic ball packings generated by the prism groups pq2_1.

One ball sits at every image of the origin. Its largest admissible radius is
the smallest of d(O, A1), d(O, O^tau)/2 and d(O, O^ab)/2; the density is the
ball volume over the prism volume.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from nilpack.core import ORIGIN, compose
from nilpack.geodesics import DistanceRangeError, ball_volume, distance
from nilpack.tilings import (
    DEFAULT_WORD_DEPTH,
    PrismTiling,
    TilingError,
    build_tiling,
    orbit,
    prism_height,
    prism_volume,
    tiling_exists,
)

X_BRACKET = (0.05, 10.0)
DEFAULT_TOL = 1e-9
MAX_WORD_DEPTH = 12
TERM_NAMES = ("vertex", "fibre", "screw")


def default_tolerance() -> float:
    """Root tolerance for the balance equation; ``NILPACK_TOL`` overrides it."""
    raw = os.environ.get("NILPACK_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    tol = float(raw)
    if not tol > 0:
        raise ValueError(f"NILPACK_TOL must be positive, got {raw!r}")
    return tol


class SolverError(RuntimeError):
    """A root could not be bracketed; ``profile`` holds the scanned (x, value) pairs."""

    def __init__(self, message: str, profile=()):
        super().__init__(message)
        self.profile = list(profile)


def kissing_tolerance(r: float) -> float:
    return 1e-4 * (1.0 + 2.0 * r)


@dataclass(frozen=True)
class RadiusTerms:
    vertex: float
    fibre: float
    screw: float

    @property
    def r_opt(self) -> float:
        return min(self.vertex, self.fibre, self.screw)

    @property
    def active(self) -> tuple[str, ...]:
        r = self.r_opt
        vals = (self.vertex, self.fibre, self.screw)
        return tuple(n for n, v in zip(TERM_NAMES, vals) if v - r <= 1e-9 * max(1.0, r))


@dataclass(frozen=True)
class PackingResult:
    p: int
    q: int
    x: float
    r_opt: float
    prism_volume: float
    density: float
    kissing_number: int
    ball_volume: float = field(default=math.nan, compare=False)
    active_terms: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class BalancedSolution:
    x_star: float
    result: PackingResult
    residual: float


@dataclass(frozen=True)
class SweepPoint:
    x: float
    result: PackingResult | None
    error: str | None = None


def radius_terms(t: PrismTiling) -> RadiusTerms:
    screw_image = compose(t.gen_a, t.gen_b)(ORIGIN)
    return RadiusTerms(
        vertex=distance(ORIGIN, t.base_vertices[0]).length,
        fibre=0.5 * prism_height(t),
        screw=0.5 * distance(ORIGIN, screw_image).length,
    )


def optimal_radius(t: PrismTiling) -> float:
    return radius_terms(t).r_opt


def _count_shell(t: PrismTiling, r: float, depth: int) -> int:
    tol = kissing_tolerance(r)
    return sum(1 for o in orbit(t, depth) if abs(o.distance - 2.0 * r) <= tol)


def kissing_number(t: PrismTiling, r: float | None = None,
                   word_depth: int = DEFAULT_WORD_DEPTH) -> int:
    """Orbit points at distance 2r from O; the word depth grows by 2 until the count repeats."""
    r_opt = optimal_radius(t)
    if r is None:
        r = r_opt
    elif abs(r - r_opt) > 1e-9 * max(1.0, r_opt):
        warnings.warn(f"kissing radius {r} differs from the optimal radius {r_opt}", stacklevel=2)
    count = _count_shell(t, r, word_depth)
    depth = word_depth
    while depth + 2 <= MAX_WORD_DEPTH:
        depth += 2
        nxt = _count_shell(t, r, depth)
        if nxt == count:
            break
        count = nxt
    return count


def packing_density(t: PrismTiling, with_kissing: bool = True) -> PackingResult:
    terms = radius_terms(t)
    r = terms.r_opt
    vol_ball = ball_volume(r)
    vol_prism = prism_volume(t)
    kiss = kissing_number(t, r) if with_kissing else -1
    return PackingResult(t.p, t.q, t.x, r, vol_prism, vol_ball / vol_prism, kiss,
                         ball_volume=vol_ball, active_terms=terms.active)


def packing_at(p: int, q: int, x: float, with_kissing: bool = True) -> PackingResult:
    return packing_density(build_tiling(p, q, x), with_kissing)


def balance_gap(p: int, q: int, x: float) -> float:
    """d(O, O^ab) - d(O, O^tau); zero at the balanced parameter."""
    terms = radius_terms(build_tiling(p, q, x))
    return 2.0 * (terms.screw - terms.fibre)


def _check_pair(p, q):
    if not tiling_exists(p, q):
        raise TilingError(f"no regular prism tiling with (p, q) = ({p}, {q})")


def _scan(fn, lo, hi, n=240):
    """Evaluate fn on a geometric grid until it leaves the distance cap."""
    profile = []
    for x in np.geomspace(lo, hi, n):
        try:
            profile.append((float(x), fn(float(x))))
        except DistanceRangeError:
            break
    return profile


def solve_balanced(p: int, q: int, tol: float | None = None,
                   bracket: tuple[float, float] = X_BRACKET) -> BalancedSolution:
    """Find x* with d(O, O^ab) = d(O, O^tau) and return the packing there."""
    _check_pair(p, q)
    tol = default_tolerance() if tol is None else tol

    def gap(x):
        return balance_gap(p, q, x)

    profile = _scan(gap, *bracket)
    for (x0, g0), (x1, g1) in zip(profile, profile[1:]):
        if g0 == 0.0:
            x_star = x0
            break
        if g0 * g1 < 0.0:
            x_star = brentq(gap, x0, x1, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            break
    else:
        raise SolverError(f"no sign change of the balance gap for ({p}, {q}) in {bracket}", profile)
    residual = abs(gap(x_star))
    if residual > tol:
        raise SolverError(f"balance residual {residual:.3g} exceeds {tol:.3g}", profile)
    return BalancedSolution(x_star, packing_at(p, q, x_star), residual)


def _sweep_one(p, q, x, with_kissing):
    try:
        return SweepPoint(float(x), packing_at(p, q, float(x), with_kissing))
    except (DistanceRangeError, ValueError) as exc:
        return SweepPoint(float(x), None, f"{type(exc).__name__}: {exc}")


def sweep(p: int, q: int, x_lo: float, x_hi: float, steps: int,
          with_kissing: bool = True, max_workers: int | None = None) -> list[SweepPoint]:
    """Packing results on an even x grid; failures are recorded, not raised."""
    _check_pair(p, q)
    if not 0 < x_lo < x_hi:
        raise ValueError(f"need 0 < x_lo < x_hi, got {x_lo}, {x_hi}")
    if steps < 2:
        raise ValueError("steps must be at least 2")
    xs = np.linspace(x_lo, x_hi, steps)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(lambda x: _sweep_one(p, q, x, with_kissing), xs))
    return [_sweep_one(p, q, x, with_kissing) for x in xs]


class TableMatchError(ValueError):
    """Requested prism volume is outside the attainable range."""


def match_table_row(p: int, q: int, prism_volume_target: float,
                    rel_tol: float = 1e-4) -> PackingResult:
    """Packing at the x whose prism volume equals the target."""
    _check_pair(p, q)

    def vol(x):
        return prism_volume(build_tiling(p, q, x))

    profile = _scan(vol, *X_BRACKET)
    if len(profile) < 2:
        raise TableMatchError("prism volume could not be evaluated on the x bracket")
    vols = np.array([v for _, v in profile])
    if not np.all(np.diff(vols) > 0):
        raise TableMatchError("prism volume is not monotone on the scanned bracket")
    if not vols[0] <= prism_volume_target <= vols[-1]:
        raise TableMatchError(
            f"target {prism_volume_target} outside attainable range [{vols[0]:.6g}, {vols[-1]:.6g}]")
    i = int(np.searchsorted(vols, prism_volume_target))
    lo = profile[max(i - 1, 0)][0]
    hi = profile[min(i, len(profile) - 1)][0]
    if lo == hi:
        x = lo
    else:
        x = brentq(lambda s: vol(s) - prism_volume_target, lo, hi, xtol=1e-15, rtol=1e-15)
    res = packing_at(p, q, x)
    if abs(res.prism_volume - prism_volume_target) > rel_tol * prism_volume_target:
        raise TableMatchError(f"volume match failed at x={x}")
    return res


TABLE_STEP = 0.05
TABLE_HALF_WIDTH = 3


def table_rows(p: int, q: int, step: float = TABLE_STEP,
               half_width: int = TABLE_HALF_WIDTH) -> list[PackingResult]:
    """Packings at x* + k*step for |k| <= half_width, ordered by x."""
    x_star = solve_balanced(p, q).x_star
    return [packing_at(p, q, x_star + k * step) for k in range(-half_width, half_width + 1)]
