"""Closed-form arithmetic in the affine model of Nil.

Points are row vectors acted on from the right: a translation ``(x, y, z)``
sends ``(a, b, c)`` to ``(x + a, y + b, z + b*x + c)``. An isometry is stored
as a rotation about the z-axis followed by a translation, and
``compose(g1, g2)`` means "apply g1 first".
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class NilDomainError(ValueError):
    """Non-finite coordinates or otherwise invalid input."""


def _finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise NilDomainError(f"non-finite coordinate {v!r}")


def normalize_angle(omega: float) -> float:
    """Map an angle to (-pi, pi]."""
    w = math.remainder(omega, TWO_PI)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True, slots=True)
class NilPoint:
    a: float
    b: float
    c: float

    def __post_init__(self):
        _finite(self.a, self.b, self.c)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @classmethod
    def from_array(cls, v) -> NilPoint:
        return cls(float(v[0]), float(v[1]), float(v[2]))


ORIGIN = NilPoint(0.0, 0.0, 0.0)


@dataclass(frozen=True, slots=True)
class NilTranslation:
    x: float
    y: float
    z: float

    def __post_init__(self):
        _finite(self.x, self.y, self.z)

    def inverse(self) -> NilTranslation:
        return NilTranslation(-self.x, -self.y, -self.z + self.x * self.y)


IDENTITY_TRANSLATION = NilTranslation(0.0, 0.0, 0.0)


def nil_multiply(t1: NilTranslation, t2: NilTranslation) -> NilTranslation:
    """Heisenberg matrix product t1 * t2."""
    return NilTranslation(t2.x + t1.x, t2.y + t1.y, t2.z + t1.x * t2.y + t1.z)


def apply_translation(p: NilPoint, t: NilTranslation) -> NilPoint:
    return NilPoint(t.x + p.a, t.y + p.b, t.z + p.b * t.x + p.c)


def translation_to(p: NilPoint) -> NilTranslation:
    """The translation carrying the origin to ``p``."""
    return NilTranslation(p.a, p.b, p.c)


def rotate_about_origin(p: NilPoint, omega: float) -> NilPoint:
    """Rotation by ``omega`` about the z-axis; quadratic in the height."""
    co, so = math.cos(omega), math.sin(omega)
    x, y, z = p.a, p.b, p.c
    zr = (z - 0.5 * x * y + 0.25 * (x * x - y * y) * math.sin(2.0 * omega)
          + 0.5 * x * y * math.cos(2.0 * omega))
    return NilPoint(x * co - y * so, x * so + y * co, zr)


def to_linearized(p: NilPoint) -> NilPoint:
    return NilPoint(p.a, p.b, p.c - 0.5 * p.a * p.b)


def from_linearized(p: NilPoint) -> NilPoint:
    return NilPoint(p.a, p.b, p.c + 0.5 * p.a * p.b)


def rotate_points(pts: np.ndarray, omega: float) -> np.ndarray:
    """Vectorised rotate_about_origin on an (n, 3) array."""
    co, so = math.cos(omega), math.sin(omega)
    x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
    out = np.empty_like(pts, dtype=float)
    out[..., 0] = x * co - y * so
    out[..., 1] = x * so + y * co
    out[..., 2] = (z - 0.5 * x * y + 0.25 * (x * x - y * y) * math.sin(2.0 * omega)
                   + 0.5 * x * y * math.cos(2.0 * omega))
    return out


def translate_points(pts: np.ndarray, t: NilTranslation) -> np.ndarray:
    out = np.empty_like(pts, dtype=float)
    out[..., 0] = pts[..., 0] + t.x
    out[..., 1] = pts[..., 1] + t.y
    out[..., 2] = pts[..., 2] + pts[..., 1] * t.x + t.z
    return out


@dataclass(frozen=True, slots=True)
class NilIsometry:
    """Rotate about the z-axis by ``omega``, then translate by ``trans``."""

    omega: float
    trans: NilTranslation

    def __post_init__(self):
        _finite(self.omega)
        object.__setattr__(self, "omega", normalize_angle(self.omega))

    @classmethod
    def identity(cls) -> NilIsometry:
        return cls(0.0, IDENTITY_TRANSLATION)

    @classmethod
    def rotation(cls, omega: float) -> NilIsometry:
        return cls(omega, IDENTITY_TRANSLATION)

    @classmethod
    def translation(cls, t: NilTranslation) -> NilIsometry:
        return cls(0.0, t)

    def __call__(self, p: NilPoint) -> NilPoint:
        return apply(self, p)

    def apply_array(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.omega != 0.0:
            pts = rotate_points(pts, self.omega)
        return translate_points(pts, self.trans)

    def then(self, other: NilIsometry) -> NilIsometry:
        return compose(self, other)

    def inverse(self) -> NilIsometry:
        return inverse(self)

    def power(self, n: int) -> NilIsometry:
        g = NilIsometry.identity()
        step = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            g = compose(g, step)
        return g


def apply(g: NilIsometry, p: NilPoint) -> NilPoint:
    q = rotate_about_origin(p, g.omega) if g.omega != 0.0 else p
    return apply_translation(q, g.trans)


def _rotate_translation(t: NilTranslation, omega: float) -> NilTranslation:
    # rotations about the origin are automorphisms of the translation group
    p = rotate_about_origin(NilPoint(t.x, t.y, t.z), omega)
    return NilTranslation(p.a, p.b, p.c)


def compose(g1: NilIsometry, g2: NilIsometry) -> NilIsometry:
    """The isometry ``p -> g2(g1(p))``."""
    moved = _rotate_translation(g1.trans, g2.omega) if g2.omega != 0.0 else g1.trans
    return NilIsometry(g1.omega + g2.omega, nil_multiply(g2.trans, moved))


def inverse(g: NilIsometry) -> NilIsometry:
    return NilIsometry(-g.omega, _rotate_translation(g.trans.inverse(), -g.omega))


def rotation_about_fibre(center: NilPoint, omega: float) -> NilIsometry:
    """Rotation by ``omega`` about the fibre line through ``center``.

    Conjugates the origin rotation: move ``center`` to the origin, rotate,
    move back.
    """
    to_c = translation_to(center)
    g = compose(NilIsometry.translation(to_c.inverse()), NilIsometry.rotation(omega))
    return compose(g, NilIsometry.translation(to_c))


@dataclass(frozen=True, slots=True)
class FibreTranslation:
    """Central translation along the fibre direction."""

    z: float

    def __post_init__(self):
        _finite(self.z)

    def to_isometry(self) -> NilIsometry:
        return NilIsometry.translation(NilTranslation(0.0, 0.0, self.z))

    def __call__(self, p: NilPoint) -> NilPoint:
        return NilPoint(p.a, p.b, p.c + self.z)
