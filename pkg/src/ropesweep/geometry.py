"""Polygonal knots and static per-curve functionals.

A knot is a labelled closed polygon in R^3: the vertex order is the
labelling, index arithmetic is cyclic.  All functionals here are pure
functions of the vertex array; nothing mutates shared state, so every
operation is safe to call concurrently.

Lengths are dimensionless: one unit equals one thickness radius.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidKnotError, ValidationError

#: Edges shorter than this are rejected at construction.
MIN_EDGE_LENGTH = 1e-12

#: Minimum allowed distance between non-adjacent edges (embeddedness).
EPS_EMBED = 1e-9


def as_vertex_array(vertices) -> np.ndarray:
    """Coerce input to a float64 (N, 3) array without validating it."""
    arr = np.asarray(vertices, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidKnotError(f"expected an (N, 3) vertex array, got shape {arr.shape}")
    return arr


class PolygonalKnot:
    """Closed labelled polygon with N >= 3 distinct, embedded edges.

    Construction validates the structural invariants once; the vertex
    array is then frozen so results can be shared freely.
    """

    __slots__ = ("_vertices",)

    def __init__(self, vertices):
        arr = as_vertex_array(vertices).copy()
        n = arr.shape[0]
        if n < 3:
            raise InvalidKnotError(f"a polygonal knot needs at least 3 vertices, got {n}")
        if not np.all(np.isfinite(arr)):
            raise InvalidKnotError("vertex coordinates must be finite")
        lengths = edge_lengths_of(arr)
        if np.any(lengths <= MIN_EDGE_LENGTH):
            bad = int(np.argmin(lengths))
            raise InvalidKnotError(
                f"edge {bad} has length {lengths[bad]:.3e} <= {MIN_EDGE_LENGTH:.0e}"
            )
        if n >= 4:
            dmin, pair = min_nonadjacent_edge_distance(arr)
            if dmin <= EPS_EMBED:
                raise InvalidKnotError(
                    f"edges {pair[0]} and {pair[1]} are {dmin:.3e} apart; "
                    f"polygon is not embedded at tolerance {EPS_EMBED:.0e}"
                )
        arr.setflags(write=False)
        self._vertices = arr

    @property
    def vertices(self) -> np.ndarray:
        """Read-only (N, 3) vertex array."""
        return self._vertices

    @property
    def n(self) -> int:
        return self._vertices.shape[0]

    def translated(self, offset) -> "PolygonalKnot":
        return PolygonalKnot(self._vertices + np.asarray(offset, dtype=float))

    def scaled(self, factor: float) -> "PolygonalKnot":
        return PolygonalKnot(self._vertices * float(factor))

    def transformed(self, rotation, offset=(0.0, 0.0, 0.0)) -> "PolygonalKnot":
        """Apply ``x -> R x + offset`` to every vertex."""
        rot = np.asarray(rotation, dtype=float)
        return PolygonalKnot(self._vertices @ rot.T + np.asarray(offset, dtype=float))

    def __repr__(self) -> str:  # pragma: no cover
        return f"PolygonalKnot(n={self.n})"


@dataclass(frozen=True)
class OrientedPlane:
    """Oriented projection plane given by its unit normal."""

    normal: tuple

    def __post_init__(self):
        vec = np.asarray(self.normal, dtype=float)
        if vec.shape != (3,):
            raise ValidationError("plane normal must be a 3-vector")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"plane normal must be unit length, |n| = {norm!r}")
        object.__setattr__(self, "normal", tuple(float(c) for c in vec))

    @classmethod
    def from_vector(cls, vec) -> "OrientedPlane":
        """Normalize an arbitrary nonzero vector into a plane normal."""
        arr = np.asarray(vec, dtype=float)
        norm = float(np.linalg.norm(arr))
        if not np.isfinite(norm) or norm == 0.0:
            raise ValidationError("cannot normalize a zero or non-finite normal")
        return cls(tuple(arr / norm))

    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Right-handed in-plane basis (e1, e2) with e1 x e2 = normal."""
        n = np.asarray(self.normal)
        axis = np.zeros(3)
        axis[int(np.argmin(np.abs(n)))] = 1.0
        e1 = np.cross(axis, n)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        return e1, e2


class SizeFunctionalKind(str, Enum):
    """Euclidean-invariant, scale-covariant size functionals."""

    DIAMETER = "diameter"
    MIN_ENCLOSING_BALL_RADIUS = "min_enclosing_ball_radius"


# ---------------------------------------------------------------------------
# raw-array helpers (shared with the thickness and isotopy machinery, where
# slices of a deforming polygon may not satisfy the knot invariants)

def edge_vectors_of(vertices: np.ndarray) -> np.ndarray:
    return np.roll(vertices, -1, axis=0) - vertices


def edge_lengths_of(vertices: np.ndarray) -> np.ndarray:
    return np.linalg.norm(edge_vectors_of(vertices), axis=1)


def length_of(vertices: np.ndarray) -> float:
    return float(edge_lengths_of(vertices).sum())


def exterior_angles_of(vertices: np.ndarray) -> np.ndarray:
    """Turning angle in [0, pi] at every vertex.

    The angle at vertex i is measured between the incoming edge direction
    (from vertex i-1) and the outgoing direction (to vertex i+1).
    """
    edges = edge_vectors_of(vertices)
    lengths = np.linalg.norm(edges, axis=1)
    dirs = edges / lengths[:, None]
    incoming = np.roll(dirs, 1, axis=0)
    cosines = np.clip(np.einsum("ij,ij->i", incoming, dirs), -1.0, 1.0)
    return np.arccos(cosines)


def vector_area_of(vertices: np.ndarray) -> np.ndarray:
    nxt = np.roll(vertices, -1, axis=0)
    return 0.5 * np.cross(vertices, nxt).sum(axis=0)


def nonadjacent_edge_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i, j), i < j, of edges that do not share a vertex."""
    if n < 4:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    return i[keep], j[keep]


def segment_pair_distances(p1, q1, p2, q2):
    """Vectorized minimum distance between segment batches [p1,q1], [p2,q2].

    Clamped closest-point computation; inputs are (..., 3) arrays.
    """
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = np.einsum("...i,...i->...", d1, d1)
    e = np.einsum("...i,...i->...", d2, d2)
    b = np.einsum("...i,...i->...", d1, d2)
    c = np.einsum("...i,...i->...", d1, r)
    f = np.einsum("...i,...i->...", d2, r)
    denom = a * e - b * b
    safe = denom > 1e-30 * np.maximum(a * e, 1e-300)
    s = np.where(safe, np.clip((b * f - c * e) / np.where(safe, denom, 1.0), 0.0, 1.0), 0.0)
    t = (b * s + f) / e
    t_clamped = np.clip(t, 0.0, 1.0)
    # re-optimize s wherever t was clamped
    reclamp = t != t_clamped
    s = np.where(reclamp, np.clip((b * t_clamped - c) / a, 0.0, 1.0), s)
    closest1 = p1 + s[..., None] * d1
    closest2 = p2 + t_clamped[..., None] * d2
    return np.linalg.norm(closest1 - closest2, axis=-1)


def min_nonadjacent_edge_distance(vertices: np.ndarray):
    """Smallest distance between non-adjacent edges and the attaining pair."""
    n = vertices.shape[0]
    i, j = nonadjacent_edge_pairs(n)
    if i.size == 0:
        return float("inf"), (-1, -1)
    nxt = np.roll(vertices, -1, axis=0)
    dists = segment_pair_distances(vertices[i], nxt[i], vertices[j], nxt[j])
    k = int(np.argmin(dists))
    return float(dists[k]), (int(i[k]), int(j[k]))


# ---------------------------------------------------------------------------
# public functionals

def length(knot: PolygonalKnot) -> float:
    """Total edge length."""
    return length_of(knot.vertices)


def exterior_angles(knot: PolygonalKnot) -> np.ndarray:
    return exterior_angles_of(knot.vertices)


def total_curvature(knot: PolygonalKnot) -> float:
    """Sum of the exterior turning angles."""
    return float(exterior_angles_of(knot.vertices).sum())


def vector_area(knot: PolygonalKnot) -> np.ndarray:
    """Half the sum of successive vertex cross products.

    For a closed polygon this is translation invariant, and its dot
    product with a unit normal equals the signed area of the projection
    onto the plane with that normal.
    """
    return vector_area_of(knot.vertices)


def projected_signed_area(knot: PolygonalKnot, plane: OrientedPlane) -> float:
    """Shoelace signed area of the orthogonal projection onto ``plane``."""
    e1, e2 = plane.basis()
    x = knot.vertices @ e1
    y = knot.vertices @ e2
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    return float(0.5 * np.sum(x * yn - xn * y))


def size(knot: PolygonalKnot, kind: SizeFunctionalKind) -> float:
    """Size functional value (always attained on the vertex set)."""
    kind = SizeFunctionalKind(kind)
    if kind is SizeFunctionalKind.DIAMETER:
        return diameter_of(knot.vertices)
    center, radius = min_enclosing_ball(knot.vertices)
    return radius


def density(knot: PolygonalKnot, kind: SizeFunctionalKind) -> float:
    """Length divided by size; the length-per-scale part of ropelength."""
    d = size(knot, kind)
    if d <= 0.0:
        raise ValidationError("size functional vanished; polygon is degenerate")
    return length(knot) / d


def compression_radius(knot: PolygonalKnot, kind: SizeFunctionalKind, thickness: float) -> float:
    """Size divided by thickness; the scale-per-tube part of ropelength."""
    if thickness <= 0.0:
        raise ValidationError("thickness must be positive")
    return size(knot, kind) / thickness


def diameter_of(vertices: np.ndarray) -> float:
    diffs = vertices[:, None, :] - vertices[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diffs, diffs))))


# ---------------------------------------------------------------------------
# exact smallest enclosing ball (Welzl-style cascade with move-to-front
# randomization; at most four support points in R^3)

def min_enclosing_ball(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact center and radius of the smallest ball containing ``points``."""
    pts = [np.asarray(p, dtype=float) for p in points]
    rng = random.Random(0x5EED)
    rng.shuffle(pts)
    ball = None
    for i, p in enumerate(pts):
        if ball is None or not _in_ball(p, ball):
            ball = _ball_with_1(pts[: i + 1], p)
    assert ball is not None
    return ball[0], ball[1]


def _in_ball(p, ball, slack=1e-10):
    center, radius = ball
    return np.linalg.norm(p - center) <= radius * (1.0 + slack) + slack


def _ball_with_1(pts, q1):
    ball = (q1, 0.0)
    for i, p in enumerate(pts):
        if not _in_ball(p, ball):
            ball = _ball_with_2(pts[: i + 1], q1, p)
    return ball


def _ball_with_2(pts, q1, q2):
    ball = _ball_from(q1, q2)
    for i, p in enumerate(pts):
        if not _in_ball(p, ball):
            ball = _ball_with_3(pts[: i + 1], q1, q2, p)
    return ball


def _ball_with_3(pts, q1, q2, q3):
    ball = _circumball_3(q1, q2, q3)
    for p in pts:
        if not _in_ball(p, ball):
            ball = _circumball_4(q1, q2, q3, p)
    return ball


def _ball_from(p, q):
    center = 0.5 * (p + q)
    return center, float(np.linalg.norm(p - center))


def _circumball_3(p1, p2, p3):
    """Smallest ball with three boundary points: the triangle circumcircle."""
    a = p2 - p1
    b = p3 - p1
    aa = a @ a
    bb = b @ b
    ab = a @ b
    det = aa * bb - ab * ab
    if det <= 1e-30 * max(aa * bb, 1e-300):
        # collinear: fall back to the widest two-point ball
        balls = [_ball_from(p1, p2), _ball_from(p1, p3), _ball_from(p2, p3)]
        return max(balls, key=lambda ball: ball[1])
    alpha = 0.5 * (aa * bb - bb * ab) / det
    beta = 0.5 * (aa * bb - aa * ab) / det
    center = p1 + alpha * a + beta * b
    return center, float(np.linalg.norm(center - p1))


def _circumball_4(p1, p2, p3, p4):
    """Ball through four points; falls back to three-point balls if coplanar."""
    mat = 2.0 * np.array([p2 - p1, p3 - p1, p4 - p1])
    rhs = np.array([p2 @ p2 - p1 @ p1, p3 @ p3 - p1 @ p1, p4 @ p4 - p1 @ p1])
    try:
        center = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError:
        candidates = [
            _circumball_3(p1, p2, p3),
            _circumball_3(p1, p2, p4),
            _circumball_3(p1, p3, p4),
            _circumball_3(p2, p3, p4),
        ]
        contained = [
            ball
            for ball in candidates
            if all(_in_ball(p, ball, slack=1e-9) for p in (p1, p2, p3, p4))
        ]
        pool = contained or candidates
        return min(pool, key=lambda ball: ball[1])
    return center, float(np.linalg.norm(center - p1))
