"""Polygonal thickness, ropelength, and admissibility at a length level.

Thickness is the minimum of two branches: the smallest inscribed-arc
radius over vertices (MinRad) and half the doubly-critical self-distance
(dcsd).  The dcsd candidates are enumerated in closed form per feature
pair; a chord qualifies when it is perpendicular to the edge at an
interior foot and lies in the normal cone at a vertex foot.  The normal
cone at a vertex is the set of directions with non-positive dot product
against both away-pointing adjacent edge directions, so a critical chord
leaving the vertex locally does not shrink.

Feature pairs whose supporting edges coincide or share a vertex are
excluded; that local interaction is what MinRad measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import InfeasibleError, NumericError
from .geometry import PolygonalKnot
from .isotopy import IsotopyPath

#: Slack used in admissibility comparisons so exact-boundary examples pass.
EPS_ADM = 1e-9

#: Thickness floor for admissibility.
THICKNESS_FLOOR = 1.0

#: |cosine| tolerance when validating perpendicularity / cone membership.
_COS_TOL = 1e-8

#: sin(angle) threshold below which an edge pair is treated as parallel.
_PARALLEL_TOL = 1e-9


@dataclass(frozen=True)
class ChordPoint:
    """One endpoint of a candidate doubly-critical chord."""

    kind: str  # "vertex" or "edge"
    index: int
    param: float | None
    point: tuple


@dataclass(frozen=True)
class ThicknessBreakdown:
    min_rad: float
    half_dcsd: float
    thickness: float
    argmin_vertex: int | None
    argmin_pair: tuple[ChordPoint, ChordPoint] | None


@dataclass(frozen=True)
class SliceCheck:
    time: float
    thickness: float
    length: float
    ok: bool


@dataclass(frozen=True)
class AdmissibilityReport:
    level_lambda: float
    per_slice: tuple[SliceCheck, ...]
    admissible: bool


def vertex_radius(knot: PolygonalKnot, i: int) -> float:
    """Inscribed-arc radius at vertex i: min adjacent edge / (2 tan(theta/2)).

    Returns +inf at a straight vertex (zero turning angle).
    """
    radii = vertex_radii_of(knot.vertices)
    return float(radii[i % knot.n])


def vertex_radii_of(vertices: np.ndarray) -> np.ndarray:
    lengths = geometry.edge_lengths_of(vertices)
    angles = geometry.exterior_angles_of(vertices)
    shorter = np.minimum(np.roll(lengths, 1), lengths)
    with np.errstate(divide="ignore"):
        radii = np.where(angles > 0.0, shorter / (2.0 * np.tan(angles / 2.0)), np.inf)
    return radii


def min_rad_of(vertices: np.ndarray) -> tuple[float, int | None]:
    radii = vertex_radii_of(vertices)
    if np.all(np.isinf(radii)):
        return math.inf, None
    k = int(np.argmin(radii))
    return float(radii[k]), k


def dcsd(knot: PolygonalKnot) -> float:
    """Doubly-critical self-distance; +inf when no candidate chord exists."""
    value, _ = dcsd_of(knot.vertices)
    return value


def dcsd_of(vertices: np.ndarray) -> tuple[float, tuple[ChordPoint, ChordPoint] | None]:
    """Enumerate candidate doubly-critical chords and return the shortest.

    Candidates:
      * interior-interior: common perpendicular of two non-adjacent edges,
        feet strictly inside both (parallel pairs contribute the constant
        perpendicular over the overlap of their projections);
      * edge-vertex: perpendicular foot of a vertex on a far edge, with
        the chord inside the vertex normal cone;
      * vertex-vertex: chord inside both normal cones.
    """
    n = vertices.shape[0]
    if n < 4:
        return math.inf, None

    best = math.inf
    best_pair: tuple[ChordPoint, ChordPoint] | None = None

    def offer(dist: float, p: ChordPoint, q: ChordPoint):
        nonlocal best, best_pair
        if dist < best:
            best = dist
            best_pair = (p, q)

    nxt = np.roll(vertices, -1, axis=0)
    edges = nxt - vertices
    lengths = np.linalg.norm(edges, axis=1)
    dirs = edges / lengths[:, None]
    # away-pointing unit directions at each vertex (toward both neighbours)
    away_fwd = dirs
    away_bwd = -np.roll(dirs, 1, axis=0)

    # --- interior-interior -------------------------------------------------
    I, J = geometry.nonadjacent_edge_pairs(n)
    if I.size:
        d1 = edges[I]
        d2 = edges[J]
        r = vertices[J] - vertices[I]
        a = np.einsum("ij,ij->i", d1, d1)
        b = np.einsum("ij,ij->i", d1, d2)
        c = np.einsum("ij,ij->i", d2, d2)
        dd = np.einsum("ij,ij->i", r, d1)
        ee = np.einsum("ij,ij->i", r, d2)
        cross_sq = np.einsum("ij,ij->i", np.cross(d1, d2), np.cross(d1, d2))
        parallel = cross_sq <= (_PARALLEL_TOL ** 2) * a * c

        # common perpendicular feet solve  a s - b t = dd ;  b s - c t = ee
        denom = b * b - a * c
        safe = np.where(parallel, 1.0, denom)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(parallel, np.nan, (b * ee - c * dd) / safe)
            t = np.where(parallel, np.nan, (a * ee - b * dd) / safe)
        interior = (~parallel) & (s > 0.0) & (s < 1.0) & (t > 0.0) & (t < 1.0)
        if np.any(interior):
            pi = vertices[I[interior]] + s[interior, None] * d1[interior]
            qi = vertices[J[interior]] + t[interior, None] * d2[interior]
            chord = qi - pi
            dist = np.linalg.norm(chord, axis=1)
            ok = dist > 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                unit = chord / np.where(dist[:, None] > 0.0, dist[:, None], 1.0)
            cos1 = np.abs(np.einsum("ij,ij->i", unit, dirs[I[interior]]))
            cos2 = np.abs(np.einsum("ij,ij->i", unit, dirs[J[interior]]))
            ok &= (cos1 <= _COS_TOL) & (cos2 <= _COS_TOL)
            # an exactly intersecting pair yields a zero-length chord
            ok |= dist <= 1e-15
            for k in np.nonzero(ok)[0]:
                ii = int(I[interior][k])
                jj = int(J[interior][k])
                offer(
                    float(dist[k]),
                    ChordPoint("edge", ii, float(s[interior][k]), tuple(pi[k])),
                    ChordPoint("edge", jj, float(t[interior][k]), tuple(qi[k])),
                )
        for k in np.nonzero(parallel)[0]:
            ii = int(I[k])
            jj = int(J[k])
            u = dirs[ii]
            tau0 = float((vertices[jj] - vertices[ii]) @ u)
            tau1 = float((nxt[jj] - vertices[ii]) @ u)
            lo = max(0.0, min(tau0, tau1))
            hi = min(float(lengths[ii]), max(tau0, tau1))
            if hi <= lo:
                continue
            sigma = 0.5 * (lo + hi)
            p = vertices[ii] + sigma * u
            w = dirs[jj]
            tj = float((p - vertices[jj]) @ w)
            if not (0.0 < tj < float(lengths[jj])):
                continue
            q = vertices[jj] + tj * w
            offer(
                float(np.linalg.norm(q - p)),
                ChordPoint("edge", ii, sigma / float(lengths[ii]), tuple(p)),
                ChordPoint("edge", jj, tj / float(lengths[jj]), tuple(q)),
            )

    # --- edge-vertex --------------------------------------------------------
    ei = np.arange(n)
    vj = np.arange(n)
    pairs_e, pairs_v = np.meshgrid(ei, vj, indexing="ij")
    pairs_e = pairs_e.ravel()
    pairs_v = pairs_v.ravel()
    gap = (pairs_v - pairs_e) % n
    # vertex j is excluded when one of its incident edges (j-1, j) equals or
    # neighbours edge i, i.e. j in {i-1, i, i+1, i+2}
    keep = (gap >= 3) & (gap <= n - 2)
    pairs_e = pairs_e[keep]
    pairs_v = pairs_v[keep]
    if pairs_e.size:
        base = vertices[pairs_e]
        u = dirs[pairs_e]
        vtx = vertices[pairs_v]
        sigma = np.einsum("ij,ij->i", vtx - base, u)
        interior = (sigma > 0.0) & (sigma < lengths[pairs_e])
        if np.any(interior):
            pe = pairs_e[interior]
            pv = pairs_v[interior]
            foot = base[interior] + sigma[interior, None] * u[interior]
            chord = foot - vertices[pv]
            dist = np.linalg.norm(chord, axis=1)
            ok = dist > 0.0
            unit = chord / np.where(dist[:, None] > 0.0, dist[:, None], 1.0)
            ok &= np.einsum("ij,ij->i", unit, away_fwd[pv]) <= _COS_TOL
            ok &= np.einsum("ij,ij->i", unit, away_bwd[pv]) <= _COS_TOL
            for k in np.nonzero(ok)[0]:
                offer(
                    float(dist[k]),
                    ChordPoint("edge", int(pe[k]), float(sigma[interior][k] / lengths[pe[k]]), tuple(foot[k])),
                    ChordPoint("vertex", int(pv[k]), None, tuple(vertices[pv[k]])),
                )

    # --- vertex-vertex -------------------------------------------------------
    vi, vk = np.triu_indices(n, k=3)
    keepvv = (vk - vi) <= n - 3
    vi = vi[keepvv]
    vk = vk[keepvv]
    if vi.size:
        chord = vertices[vk] - vertices[vi]
        dist = np.linalg.norm(chord, axis=1)
        ok = dist > 0.0
        unit = chord / np.where(dist[:, None] > 0.0, dist[:, None], 1.0)
        ok &= np.einsum("ij,ij->i", unit, away_fwd[vi]) <= _COS_TOL
        ok &= np.einsum("ij,ij->i", unit, away_bwd[vi]) <= _COS_TOL
        ok &= np.einsum("ij,ij->i", -unit, away_fwd[vk]) <= _COS_TOL
        ok &= np.einsum("ij,ij->i", -unit, away_bwd[vk]) <= _COS_TOL
        for k in np.nonzero(ok)[0]:
            offer(
                float(dist[k]),
                ChordPoint("vertex", int(vi[k]), None, tuple(vertices[vi[k]])),
                ChordPoint("vertex", int(vk[k]), None, tuple(vertices[vk[k]])),
            )

    return best, best_pair


def thickness(knot: PolygonalKnot) -> ThicknessBreakdown:
    """Thickness = min(MinRad, dcsd / 2), with the attaining features."""
    return thickness_breakdown_of(knot.vertices)


def thickness_breakdown_of(vertices: np.ndarray) -> ThicknessBreakdown:
    min_rad, arg_vertex = min_rad_of(vertices)
    d, pair = dcsd_of(vertices)
    half = d / 2.0
    value = min(min_rad, half)
    return ThicknessBreakdown(
        min_rad=min_rad,
        half_dcsd=half,
        thickness=value,
        argmin_vertex=arg_vertex,
        argmin_pair=pair,
    )


def thickness_value_of(vertices: np.ndarray) -> float:
    """Thickness of a raw vertex array; 0.0 for collapsed-edge slices.

    Used on interpolated slices of a deforming polygon, which need not be
    embedded: crossing edges produce a near-zero chord, so the value
    degrades continuously instead of raising.
    """
    lengths = geometry.edge_lengths_of(vertices)
    if np.any(lengths <= geometry.MIN_EDGE_LENGTH):
        return 0.0
    min_rad, _ = min_rad_of(vertices)
    d, _ = dcsd_of(vertices)
    return min(min_rad, d / 2.0)


def ropelength(knot: PolygonalKnot) -> float:
    """Length over thickness; scale invariant."""
    breakdown = thickness(knot)
    if not math.isfinite(breakdown.thickness) or breakdown.thickness <= 0.0:
        raise NumericError(f"degenerate thickness {breakdown.thickness!r}")
    return geometry.length(knot) / breakdown.thickness


def slice_ok(thickness_value: float, length_value: float, level_lambda: float) -> bool:
    return (
        thickness_value >= THICKNESS_FLOOR - EPS_ADM
        and length_value <= level_lambda + EPS_ADM
    )


def sample_times(path_times: np.ndarray, time_samples: int) -> np.ndarray:
    """Keyframe times united with a uniform grid of ``time_samples`` times."""
    grid = np.linspace(0.0, 1.0, int(time_samples))
    merged = np.union1d(np.asarray(path_times, dtype=float), grid)
    return merged


def check_admissible(path: IsotopyPath, level_lambda: float, time_samples: int) -> AdmissibilityReport:
    """Evaluate thickness and length bounds along a path.

    Slices are taken at every keyframe and at uniformly sampled times of
    the linear interpolation.  The report carries per-slice verdicts; it
    never raises for failing slices.
    """
    if level_lambda <= 0.0:
        raise InfeasibleError("admissibility level must be positive")
    if time_samples < len(path.times):
        raise InfeasibleError(
            f"time_samples={time_samples} is below the keyframe count {len(path.times)}"
        )
    times = sample_times(path.times, time_samples)
    checks = []
    for t in times:
        v = path.at(float(t))
        thi = thickness_value_of(v)
        ln = geometry.length_of(v)
        checks.append(SliceCheck(float(t), float(thi), float(ln), slice_ok(thi, ln, level_lambda)))
    return AdmissibilityReport(
        level_lambda=float(level_lambda),
        per_slice=tuple(checks),
        admissible=all(c.ok for c in checks),
    )
