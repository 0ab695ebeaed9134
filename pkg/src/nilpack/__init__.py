"""Nil geometry: geodesic balls and the ball packings of the prism groups pq2_1."""
from nilpack.core import (
    ORIGIN,
    FibreTranslation,
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
    rotate_about_origin,
    rotation_about_fibre,
    to_linearized,
    translation_to,
)
from nilpack.geodesics import (
    DistanceRangeError,
    DistanceSolution,
    GeodesicParams,
    SphereNonexistenceError,
    ball_convexity_bound,
    ball_volume,
    distance,
    geodesic_point,
    is_convex,
    sphere_exists,
    sphere_mesh,
    sphere_point,
)

__version__ = "0.1.0"
