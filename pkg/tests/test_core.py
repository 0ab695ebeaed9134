import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from nilpack.core import (
    ORIGIN,
    FibreTranslation,
    IDENTITY_TRANSLATION,
    NilDomainError,
    NilIsometry,
    NilPoint,
    NilTranslation,
    apply,
    apply_translation,
    compose,
    from_linearized,
    inverse,
    nil_multiply,
    normalize_angle,
    rotate_about_origin,
    rotate_points,
    rotation_about_fibre,
    to_linearized,
    translate_points,
    translation_to,
)

coord = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
angle = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
points = st.builds(NilPoint, coord, coord, coord)
translations = st.builds(NilTranslation, coord, coord, coord)
isometries = st.builds(NilIsometry, angle, translations)


def close(p, q, tol):
    return max(abs(p.a - q.a), abs(p.b - q.b), abs(p.c - q.c)) <= tol


def heisenberg(t: NilTranslation) -> np.ndarray:
    return np.array([[1.0, t.x, t.z], [0.0, 1.0, t.y], [0.0, 0.0, 1.0]])


def metric(p) -> np.ndarray:
    """Invariant metric da^2 + db^2 + (dc - a db)^2 as a matrix."""
    a = p[0]
    return np.array([[1.0, 0.0, 0.0], [0.0, 1.0 + a * a, -a], [0.0, -a, 1.0]])


def jacobian(f, p, h=1e-6):
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        cols.append((f(p + e) - f(p - e)) / (2 * h))
    return np.stack(cols, axis=1)


# -- translations ---------------------------------------------------------

def test_nil_multiply_examples():
    t = NilTranslation(0.3, -1.2, 2.5)
    assert nil_multiply(IDENTITY_TRANSLATION, t) == t
    assert nil_multiply(NilTranslation(1, 0, 0), NilTranslation(0, 1, 0)) == NilTranslation(1, 1, 1)
    assert nil_multiply(NilTranslation(0, 1, 0), NilTranslation(1, 0, 0)) == NilTranslation(1, 1, 0)


def test_non_commutativity_is_a_fibre_shift():
    u, v = NilTranslation(1, 0, 0), NilTranslation(0, 1, 0)
    uv, vu = nil_multiply(u, v), nil_multiply(v, u)
    assert uv != vu
    assert (uv.x - vu.x, uv.y - vu.y, uv.z - vu.z) == (0, 0, 1)


@given(translations, translations)
def test_nil_multiply_is_heisenberg_matrix_product(t1, t2):
    expected = heisenberg(t1) @ heisenberg(t2)
    np.testing.assert_allclose(heisenberg(nil_multiply(t1, t2)), expected, atol=1e-12)


def test_apply_translation_examples():
    t = NilTranslation(0.5, 2.0, -1.0)
    assert apply_translation(ORIGIN, t) == NilPoint(0.5, 2.0, -1.0)
    assert apply_translation(NilPoint(1, 1, 0), NilTranslation(1, 0, 0)) == NilPoint(2, 1, 1)
    assert apply_translation(NilPoint(1, 1, 0), NilTranslation(0, 0, 1)) == NilPoint(1, 1, 1)


@given(points, translations)
def test_apply_translation_matches_projective_matrix(p, t):
    # row vector (1, a, b, c) times the 4x4 translation matrix
    m = np.array([[1.0, t.x, t.y, t.z], [0, 1, 0, 0], [0, 0, 1, t.x], [0, 0, 0, 1]])
    out = np.array([1.0, p.a, p.b, p.c]) @ m
    assert close(apply_translation(p, t), NilPoint(*out[1:]), 1e-12)


def test_translation_to_examples():
    assert translation_to(ORIGIN) == IDENTITY_TRANSLATION
    assert translation_to(NilPoint(2, 3, 5)) == NilTranslation(2, 3, 5)
    t = translation_to(NilPoint(2, 3, 5))
    assert nil_multiply(t, t.inverse()) == IDENTITY_TRANSLATION
    assert nil_multiply(t.inverse(), t) == IDENTITY_TRANSLATION


@given(points)
def test_translation_to_carries_origin(p):
    assert apply_translation(ORIGIN, translation_to(p)) == p


# -- rotations and the linearising map -------------------------------------

def test_rotate_about_origin_examples():
    p = NilPoint(0.7, -1.1, 0.4)
    assert rotate_about_origin(p, 0.0) == p
    assert close(rotate_about_origin(NilPoint(1, 0, 0), math.pi / 2), NilPoint(0, 1, 0), 1e-15)
    assert close(rotate_about_origin(NilPoint(1, 1, 0), math.pi / 2), NilPoint(-1, 1, -1), 1e-15)


def test_rotation_formula_symbolic():
    # exact evaluation of the closed form at (1, 1, 0), omega = pi/2
    x, y, z, w = sp.symbols("x y z omega")
    zbar = z - x * y / 2 + (x**2 - y**2) * sp.sin(2 * w) / 4 + x * y * sp.cos(2 * w) / 2
    xbar = x * sp.cos(w) - y * sp.sin(w)
    ybar = x * sp.sin(w) + y * sp.cos(w)
    subs = {x: 1, y: 1, z: 0, w: sp.pi / 2}
    exact = tuple(sp.nsimplify(e.subs(subs)) for e in (xbar, ybar, zbar))
    assert exact == (-1, 1, -1)


def test_linearized_examples():
    assert to_linearized(NilPoint(2, 3, 6)) == NilPoint(2, 3, 3)
    assert to_linearized(NilPoint(1.5, 0, -2)) == NilPoint(1.5, 0, -2)


@given(points)
def test_linearized_round_trip(p):
    assert close(from_linearized(to_linearized(p)), p, 1e-12)


@given(points, angle)
def test_rotation_is_linear_rotation_in_linearized_model(p, omega):
    q = to_linearized(p)
    co, so = math.cos(omega), math.sin(omega)
    rotated = NilPoint(q.a * co - q.b * so, q.a * so + q.b * co, q.c)
    assert close(rotate_about_origin(p, omega), from_linearized(rotated), 1e-12)


@settings(max_examples=50)
@given(points, angle)
def test_rotation_preserves_invariant_metric(p, omega):
    v = p.as_array()
    f = lambda u: rotate_about_origin(NilPoint.from_array(u), omega).as_array()  # noqa: E731
    j = jacobian(f, v)
    pulled = j.T @ metric(f(v)) @ j
    np.testing.assert_allclose(pulled, metric(v), atol=1e-6)


@settings(max_examples=50)
@given(points, translations)
def test_translation_preserves_invariant_metric(p, t):
    v = p.as_array()
    f = lambda u: apply_translation(NilPoint.from_array(u), t).as_array()  # noqa: E731
    j = jacobian(f, v)
    np.testing.assert_allclose(j.T @ metric(f(v)) @ j, metric(v), atol=1e-6)


def _rot_t(t, omega):
    p = rotate_about_origin(NilPoint(t.x, t.y, t.z), omega)
    return NilTranslation(p.a, p.b, p.c)


@given(angle, translations, translations)
def test_rotation_is_automorphism_of_translations(omega, t1, t2):
    lhs = _rot_t(nil_multiply(t1, t2), omega)
    rhs = nil_multiply(_rot_t(t1, omega), _rot_t(t2, omega))
    assert max(abs(lhs.x - rhs.x), abs(lhs.y - rhs.y), abs(lhs.z - rhs.z)) <= 1e-11


# -- isometries ------------------------------------------------------------

def test_normalize_angle_range():
    assert normalize_angle(math.pi) == math.pi
    assert normalize_angle(-math.pi) == math.pi
    assert normalize_angle(3 * math.pi) == pytest.approx(math.pi)
    assert normalize_angle(2 * math.pi) == pytest.approx(0.0, abs=1e-15)
    assert NilIsometry(7.0, IDENTITY_TRANSLATION).omega == pytest.approx(7.0 - 2 * math.pi)


@given(points)
def test_identity_is_exact(p):
    assert apply(NilIsometry.identity(), p) == p


@given(isometries)
def test_compose_with_identity(g):
    ident = NilIsometry.identity()
    assert compose(ident, g) == g
    assert compose(g, ident) == g


@given(isometries, isometries, points)
def test_compose_is_sequential_application(g1, g2, p):
    assert close(apply(compose(g1, g2), p), apply(g2, apply(g1, p)), 1e-10)


@given(isometries, isometries, isometries, points)
def test_associativity(g1, g2, g3, p):
    lhs = apply(compose(compose(g1, g2), g3), p)
    rhs = apply(compose(g1, compose(g2, g3)), p)
    assert close(lhs, rhs, 1e-11)


def test_compose_translations_agrees_with_nil_multiply():
    t1, t2 = NilTranslation(0.4, 1.3, -0.2), NilTranslation(-1.1, 0.6, 0.9)
    g = compose(NilIsometry.translation(t1), NilIsometry.translation(t2))
    assert g.omega == 0.0
    assert g.trans == nil_multiply(t2, t1)


def test_inverse_on_random_points():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = NilIsometry(rng.uniform(-math.pi, math.pi), NilTranslation(*rng.normal(size=3)))
        pts = rng.uniform(-2, 2, size=(100, 3))
        back = inverse(g).apply_array(g.apply_array(pts))
        assert np.max(np.abs(back - pts)) < 1e-12
        both = compose(g, inverse(g)).apply_array(pts)
        assert np.max(np.abs(both - pts)) < 1e-12


@given(isometries, points)
def test_apply_array_matches_scalar_apply(g, p):
    arr = g.apply_array(p.as_array()[None])[0]
    assert close(NilPoint.from_array(arr), apply(g, p), 1e-12)


def test_vectorised_helpers_match_scalar():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(50, 3))
    t = NilTranslation(0.2, -0.7, 1.3)
    for v, w, u in zip(pts, rotate_points(pts, 0.9), translate_points(pts, t)):
        p = NilPoint.from_array(v)
        assert close(NilPoint.from_array(w), rotate_about_origin(p, 0.9), 1e-14)
        assert close(NilPoint.from_array(u), apply_translation(p, t), 1e-14)


def test_power_and_then():
    g = NilIsometry(0.3, NilTranslation(1, 2, 3))
    assert g.then(g.inverse()).omega == 0.0
    p = NilPoint(0.1, 0.2, 0.3)
    assert close(g.power(3)(p), g(g(g(p))), 1e-12)
    assert close(g.power(-2)(g.power(2)(p)), p, 1e-12)


@given(isometries, st.floats(-5, 5), points)
def test_fibre_translation_is_central(g, z, p):
    k = FibreTranslation(z).to_isometry()
    assert close(apply(compose(k, g), p), apply(compose(g, k), p), 1e-12)
    assert close(FibreTranslation(z)(p), apply(k, p), 0.0)


# -- rotation about a fibre line -------------------------------------------

@given(angle, points)
def test_rotation_about_origin_fibre(omega, p):
    g = rotation_about_fibre(ORIGIN, omega)
    assert close(apply(g, p), rotate_about_origin(p, omega), 1e-12)


@given(points, angle)
def test_rotation_about_fibre_fixes_its_line(a, omega):
    g = rotation_about_fibre(a, omega)
    assert close(apply(g, a), a, 1e-12)
    for z in (-2.0, 0.5, 3.0):
        on_line = FibreTranslation(z)(a)
        assert close(apply(g, on_line), on_line, 1e-11)


def test_full_turn_about_side_fibre_is_identity():
    g = rotation_about_fibre(NilPoint(1, 0, 0), 2 * math.pi)
    pts = np.random.default_rng(5).uniform(-3, 3, size=(100, 3))
    assert np.max(np.abs(g.apply_array(pts) - pts)) < 1e-10


def test_rotation_about_fibre_conjugates():
    a = NilPoint(0.8, -0.4, 1.7)
    g = rotation_about_fibre(a, 1.1)
    to_a = translation_to(a)
    p = NilPoint(0.3, 0.9, -0.2)
    step = apply_translation(p, to_a.inverse())
    step = rotate_about_origin(step, 1.1)
    assert close(apply(g, p), apply_translation(step, to_a), 1e-12)


def test_domain_errors():
    with pytest.raises(NilDomainError):
        NilPoint(math.nan, 0, 0)
    with pytest.raises(NilDomainError):
        NilTranslation(0, math.inf, 0)
    with pytest.raises(NilDomainError):
        NilIsometry(math.nan, IDENTITY_TRANSLATION)
