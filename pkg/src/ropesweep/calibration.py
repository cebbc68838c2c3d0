"""Lower bounds for swept-area distance and exact analytic oracles.

The projected signed area changes by at most the swept area along any
path, for every oriented plane.  Because the projected signed area of a
closed polygon is the dot product of the plane normal with the polygon's
vector area, the supremum of the bound over all planes is simply the
Euclidean norm of the vector-area difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import geometry
from .errors import ValidationError
from .geometry import OrientedPlane, PolygonalKnot


class BoundKind(str, Enum):
    LOWER_BOUND = "lower_bound"
    UPPER_BOUND = "upper_bound"
    EXACT = "exact"


@dataclass(frozen=True)
class Bound:
    value: float
    kind: BoundKind
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0.0:
            raise ValidationError(f"bound value must be finite and >= 0, got {self.value!r}")


def projected_area_bound(k0: PolygonalKnot, k1: PolygonalKnot, plane: OrientedPlane) -> Bound:
    """|signed projected area difference| onto one plane; a lower bound."""
    if k0.n != k1.n:
        raise ValidationError("endpoints must share the vertex count and labelling")
    a0 = geometry.projected_signed_area(k0, plane)
    a1 = geometry.projected_signed_area(k1, plane)
    return Bound(
        value=abs(a1 - a0),
        kind=BoundKind.LOWER_BOUND,
        witness={"plane_normal": plane.normal},
    )


def sup_plane_bound(k0: PolygonalKnot, k1: PolygonalKnot) -> Bound:
    """Supremum of the projected-area bound over all oriented planes.

    Equals |vector_area(k1) - vector_area(k0)| because the projected
    signed area is linear in the plane normal; the witness normal is the
    normalized difference (when nonzero).
    """
    if k0.n != k1.n:
        raise ValidationError("endpoints must share the vertex count and labelling")
    diff = geometry.vector_area(k1) - geometry.vector_area(k0)
    value = float(np.linalg.norm(diff))
    if value > 0.0:
        witness = {"plane_normal": tuple(diff / value)}
    else:
        witness = {"plane_normal": None, "note": "vector areas coincide; bound is trivial"}
    return Bound(value=value, kind=BoundKind.LOWER_BOUND, witness=witness)


def circle_distance_oracle(big_radius: float) -> Bound:
    """Exact swept-area distance between concentric round unknots.

    The value pi (R^2 - 1) holds for the smooth circles whenever the
    length budget allows the outer circle; it serves as the continuum
    target of the polygonal convergence studies.
    """
    r = float(big_radius)
    if r < 1.0:
        raise ValidationError(f"radius ratio must be >= 1, got {r}")
    return Bound(
        value=math.pi * (r * r - 1.0),
        kind=BoundKind.EXACT,
        witness={"formula": "pi*(R^2-1)", "valid_for": "lambda >= 2*pi*R", "R": r},
    )


def ellipse_distance_oracle(a: float, b: float, big_radius: float) -> Bound:
    """Exact swept-area distance between homothetic planar ellipses."""
    a = float(a)
    b = float(b)
    r = float(big_radius)
    if not (a >= b > 0.0):
        raise ValidationError(f"ellipse semi-axes must satisfy a >= b > 0, got a={a}, b={b}")
    if r < 1.0:
        raise ValidationError(f"radius ratio must be >= 1, got {r}")
    return Bound(
        value=math.pi * a * b * (r * r - 1.0),
        kind=BoundKind.EXACT,
        witness={
            "formula": "pi*a*b*(R^2-1)",
            "admissibility_hypothesis": f"b^2/a = {b * b / a!r} >= 1 and lambda >= R*Len(E_1)",
            "a": a,
            "b": b,
            "R": r,
        },
    )


def ellipse_thickness_oracle(a: float, b: float, r: float) -> float:
    """Thickness of the planar ellipse with semi-axes (r a, r b): r b^2 / a."""
    a = float(a)
    b = float(b)
    r = float(r)
    if not (a >= b > 0.0):
        raise ValidationError(f"ellipse semi-axes must satisfy a >= b > 0, got a={a}, b={b}")
    if r <= 0.0:
        raise ValidationError(f"scale must be positive, got {r}")
    return r * b * b / a
