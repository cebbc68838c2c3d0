"""Deterministic generators for the polygonal test families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .errors import NumericError, ValidationError
from .geometry import PolygonalKnot


class CorpusFamily(str, Enum):
    REGULAR_NGON = "regular_ngon"
    ELLIPSE_NGON = "ellipse_ngon"
    SQUARE_FAMILY = "square_family"
    TREFOIL_POLYGON = "trefoil_polygon"
    RANDOM_PERTURBED = "random_perturbed"


@dataclass(frozen=True)
class CorpusSpec:
    family: CorpusFamily
    parameters: Mapping[str, float] = field(default_factory=dict)
    seed: int = 0


def regular_ngon(n: int, radius: float = 1.0) -> PolygonalKnot:
    """Regular n-gon inscribed in a circle of the given radius, in z = 0."""
    n = int(n)
    if n < 3:
        raise ValidationError("regular_ngon needs n >= 3")
    if radius <= 0.0:
        raise ValidationError("regular_ngon needs radius > 0")
    theta = 2.0 * np.pi * np.arange(n) / n
    pts = np.stack([radius * np.cos(theta), radius * np.sin(theta), np.zeros(n)], axis=1)
    return PolygonalKnot(pts)


def unit_thickness_ngon(n: int, nominal_radius: float = 1.0) -> PolygonalKnot:
    """Regular n-gon rescaled so its polygonal thickness is the nominal radius.

    The inscribed n-gon of radius r has thickness r cos(pi/n); dividing by
    that factor restores the smooth-circle normalization.
    """
    return regular_ngon(n, nominal_radius / math.cos(math.pi / int(n)))


def ellipse_ngon(n: int, a: float, b: float) -> PolygonalKnot:
    """Parameter-sampled planar ellipse with semi-axes a >= b > 0."""
    n = int(n)
    if n < 3:
        raise ValidationError("ellipse_ngon needs n >= 3")
    if not (a >= b > 0.0):
        raise ValidationError(f"ellipse_ngon needs a >= b > 0, got a={a}, b={b}")
    theta = 2.0 * np.pi * np.arange(n) / n
    pts = np.stack([a * np.cos(theta), b * np.sin(theta), np.zeros(n)], axis=1)
    return PolygonalKnot(pts)


def square(half_side: float = 1.0) -> PolygonalKnot:
    """Axis-aligned square (+-h, +-h, 0) traversed counterclockwise."""
    h = float(half_side)
    if h <= 0.0:
        raise ValidationError("square needs half_side > 0")
    return PolygonalKnot([[h, -h, 0.0], [h, h, 0.0], [-h, h, 0.0], [-h, -h, 0.0]])


def trefoil_polygon(n: int = 64, scale: float = 1.0) -> PolygonalKnot:
    """Polygonal trefoil sampled from the (2, 3) torus-curve parametrization."""
    n = int(n)
    if n < 12:
        raise ValidationError("trefoil_polygon needs n >= 12")
    if scale <= 0.0:
        raise ValidationError("trefoil_polygon needs scale > 0")
    t = 2.0 * np.pi * np.arange(n) / n
    r = 2.0 + np.cos(3.0 * t)
    pts = scale * np.stack([r * np.cos(2.0 * t), r * np.sin(2.0 * t), np.sin(3.0 * t)], axis=1)
    return PolygonalKnot(pts)


def random_perturbed(n: int, radius: float, amplitude: float, seed: int) -> PolygonalKnot:
    """Regular n-gon with seeded Gaussian 3D noise; retries until embedded."""
    n = int(n)
    if n < 3:
        raise ValidationError("random_perturbed needs n >= 3")
    if radius <= 0.0 or amplitude < 0.0:
        raise ValidationError("random_perturbed needs radius > 0 and amplitude >= 0")
    rng = np.random.default_rng(int(seed))
    base = regular_ngon(n, radius).vertices
    for _ in range(200):
        candidate = base + amplitude * rng.standard_normal(base.shape)
        try:
            return PolygonalKnot(candidate)
        except Exception:
            continue
    raise NumericError(
        f"could not draw an embedded perturbation (n={n}, radius={radius}, amplitude={amplitude})"
    )


def generate(spec: CorpusSpec) -> PolygonalKnot:
    """Build the knot described by a corpus spec; deterministic per spec."""
    family = CorpusFamily(spec.family)
    p = dict(spec.parameters)

    def take(name, default=None):
        if name in p:
            return p.pop(name)
        if default is not None:
            return default
        raise ValidationError(f"{family.value} requires parameter {name!r}")

    if family is CorpusFamily.REGULAR_NGON:
        knot = regular_ngon(int(take("n", 64)), float(take("radius", 1.0)))
    elif family is CorpusFamily.ELLIPSE_NGON:
        knot = ellipse_ngon(int(take("n", 64)), float(take("a")), float(take("b")))
    elif family is CorpusFamily.SQUARE_FAMILY:
        knot = square(float(take("half_side", 1.0)))
    elif family is CorpusFamily.TREFOIL_POLYGON:
        knot = trefoil_polygon(int(take("n", 64)), float(take("scale", 1.0)))
    elif family is CorpusFamily.RANDOM_PERTURBED:
        knot = random_perturbed(
            int(take("n", 16)),
            float(take("radius", 3.0)),
            float(take("amplitude", 0.1)),
            spec.seed,
        )
    else:  # pragma: no cover
        raise ValidationError(f"unknown corpus family {spec.family!r}")
    if p:
        raise ValidationError(f"unknown parameters for {family.value}: {sorted(p)}")
    return knot
