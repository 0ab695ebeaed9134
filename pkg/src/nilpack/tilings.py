"""Regular prism tilings T_p(q) and their rotation groups pq2_1.

The group is generated by ``a``, the rotation by 2*pi/p about the z-axis, and
``b``, the rotation by 2*pi/q about the fibre line through the base vertex
A2. ``tau = abab`` is a fibre translation; its length is the prism height.
All words act on the right: ``abab`` applies ``a`` first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from nilpack import kernels
from nilpack.core import (
    ORIGIN,
    NilDomainError,
    NilIsometry,
    NilPoint,
    compose,
    rotate_about_origin,
    rotation_about_fibre,
)
from nilpack.geodesics import TWO_PI, distance

TILING_PAIRS = ((3, 6), (4, 4), (6, 3))
DEDUP_TOL = 1e-8
DEFAULT_WORD_DEPTH = 6


class TilingError(ValueError):
    """No regular prism tiling for the requested parameters."""


def tiling_exists(p: int, q: int) -> bool:
    """True iff cos^2(pi/p) + cos^2(pi/q) = 1."""
    if int(p) != p or int(q) != q:
        raise NilDomainError("p and q must be integers")
    if p < 3 or q < 3:
        raise NilDomainError(f"p and q must be at least 3, got ({p}, {q})")
    if (p, q) in TILING_PAIRS:
        return True
    return abs(math.cos(math.pi / p) ** 2 + math.cos(math.pi / q) ** 2 - 1.0) <= 1e-14


def base_vertices(p: int, x: float) -> list[NilPoint]:
    """A1 = (x, 0, 0) and its images under repeated rotation by 2*pi/p."""
    if p not in (3, 4, 6):
        raise NilDomainError(f"no regular prism tiling with p = {p}")
    if not x > 0:
        raise NilDomainError(f"x must be positive, got {x}")
    verts = [NilPoint(x, 0.0, 0.0)]
    for _ in range(p - 1):
        verts.append(rotate_about_origin(verts[-1], TWO_PI / p))
    return verts


@dataclass(frozen=True)
class PrismTiling:
    p: int
    q: int
    x: float
    gen_a: NilIsometry
    gen_b: NilIsometry
    tau: NilIsometry
    base_vertices: tuple[NilPoint, ...]
    top_vertices: tuple[NilPoint, ...]

    @property
    def generators(self) -> dict[str, NilIsometry]:
        return {"a": self.gen_a, "b": self.gen_b,
                "A": self.gen_a.inverse(), "B": self.gen_b.inverse()}

    def word(self, letters: str) -> NilIsometry:
        """Compose a word over a, b and their inverses A, B (left to right)."""
        gens = self.generators
        g = NilIsometry.identity()
        for ch in letters:
            g = compose(g, gens[ch])
        return g


def build_tiling(p: int, q: int, x: float) -> PrismTiling:
    if not tiling_exists(p, q):
        raise TilingError(f"no regular prism tiling with (p, q) = ({p}, {q})")
    base = base_vertices(p, x)
    a = NilIsometry.rotation(TWO_PI / p)
    b = rotation_about_fibre(base[1], TWO_PI / q)
    ab = compose(a, b)
    tau = compose(ab, ab)
    top = tuple(tau(v) for v in base)
    return PrismTiling(p, q, float(x), a, b, tau, tuple(base), top)


@dataclass(frozen=True)
class RelationReport:
    """Largest pointwise deviations from the identity (max-norm)."""

    a_power: float
    b_power: float
    commutator: float
    tau_symmetry: float
    fibre_condition: float
    samples: int = field(default=0)

    @property
    def max_relator_deviation(self) -> float:
        return max(self.a_power, self.b_power, self.commutator)


def _run_word(t: PrismTiling, letters: str, pts: np.ndarray) -> np.ndarray:
    gens = t.generators
    for ch in letters:
        pts = gens[ch].apply_array(pts)
    return pts


def _deviation(t: PrismTiling, letters: str, pts: np.ndarray) -> float:
    return float(np.max(np.abs(_run_word(t, letters, pts) - pts))) if len(pts) else 0.0


def fibre_condition_residual(t: PrismTiling) -> float:
    """A2 rotated by a and A1 rotated by b^-1 must lie on one fibre line."""
    a2, a1 = t.base_vertices[1], t.base_vertices[0]
    lhs = t.gen_a(a2)
    rhs = t.gen_b.inverse()(a1)
    return max(abs(lhs.a - rhs.a), abs(lhs.b - rhs.b))


def verify_relations(t: PrismTiling, samples: int = 100, seed: int = 0,
                     box: float = 2.0) -> RelationReport:
    """Evaluate a^p, b^q and abab a^-1 b^-1 a^-1 b^-1 pointwise on random points.

    Each word is applied one generator at a time, so the check does not rely
    on the composition law.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-box, box, size=(samples, 3))
    abab = _run_word(t, "abab", pts)
    baba = _run_word(t, "baba", pts)
    return RelationReport(
        a_power=_deviation(t, "a" * t.p, pts),
        b_power=_deviation(t, "b" * t.q, pts),
        commutator=_deviation(t, "ababABAB", pts),
        tau_symmetry=float(np.max(np.abs(abab - baba))) if samples else 0.0,
        fibre_condition=fibre_condition_residual(t),
        samples=samples,
    )


def prism_height(t: PrismTiling) -> float:
    """Geodesic length from O to its image under tau."""
    return distance(ORIGIN, t.tau(ORIGIN)).length


def base_area(p: int, x: float) -> float:
    """Area of the regular p-gon with circumradius x."""
    return 0.5 * p * x * x * math.sin(TWO_PI / p)


def prism_volume(t: PrismTiling) -> float:
    return base_area(t.p, t.x) * prism_height(t)


@dataclass(frozen=True)
class OrbitPoint:
    point: NilPoint
    element: NilIsometry
    distance: float


def _element_key(g: NilIsometry) -> tuple:
    tr = g.trans
    return (round(math.cos(g.omega), 9), round(math.sin(g.omega), 9),
            round(tr.x, 9), round(tr.y, 9), round(tr.z, 9))


def _group_elements(t: PrismTiling, word_depth: int) -> list[NilIsometry]:
    gens = list(t.generators.values())
    ident = NilIsometry.identity()
    seen = {_element_key(ident): ident}
    frontier = [ident]
    for _ in range(word_depth):
        nxt = []
        for g in frontier:
            for s in gens:
                h = compose(g, s)
                k = _element_key(h)
                if k not in seen:
                    seen[k] = h
                    nxt.append(h)
        frontier = nxt
    return list(seen.values())


def orbit(t: PrismTiling, word_depth: int = DEFAULT_WORD_DEPTH,
          tol: float = DEDUP_TOL) -> list[OrbitPoint]:
    """Images of O under all words of length <= word_depth, O itself excluded.

    Points closer than ``tol`` in max-norm are merged. Sorted by distance from
    O, then by coordinates; points farther than 2*pi get distance ``inf``.
    """
    if word_depth < 1:
        raise ValueError("word_depth must be at least 1")
    cells: dict[tuple[int, int, int], list[int]] = {}
    kept: list[tuple[np.ndarray, NilIsometry]] = []
    for g in _group_elements(t, word_depth):
        v = np.array([g.trans.x, g.trans.y, g.trans.z])  # g(O)
        if np.max(np.abs(v)) <= tol:
            continue
        key = tuple(np.floor(v / tol).astype(np.int64))
        dup = False
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for dk in (-1, 0, 1):
                    for idx in cells.get((key[0] + di, key[1] + dj, key[2] + dk), ()):
                        if np.max(np.abs(kept[idx][0] - v)) <= tol:
                            dup = True
                            break
                    if dup:
                        break
                if dup:
                    break
            if dup:
                break
        if dup:
            continue
        cells.setdefault(key, []).append(len(kept))
        kept.append((v, g))
    if not kept:
        return []
    pts = np.array([v for v, _ in kept])
    d = kernels.distances_from_origin(pts)
    d = np.where(d <= TWO_PI * (1.0 + 1e-12), d, np.inf)
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0], d))
    return [OrbitPoint(NilPoint.from_array(pts[i]), kept[i][1], float(d[i])) for i in order]


def orbit_points(t: PrismTiling, word_depth: int = DEFAULT_WORD_DEPTH) -> list[NilPoint]:
    return [o.point for o in orbit(t, word_depth)]
