"""Diagram projections, Reidemeister events, and swept-area weighted graphs.

A generic projection direction turns a polygonal knot into a diagram:
crossings of non-adjacent projected edges with over/under resolved by
depth and signs by the right-hand convention on the oriented strands.
Diagrams are identified by the lexicographically minimal rotation of
their signed Gauss code, which stands in for planar isotopy classes on
the corpus handled here.

Events along an isotopy are localized by bisection between sample times
whose codes differ, then classified by the crossing-count change: +-1 is
a first move, +-2 a second, 0 with a code change a third.  Edge weights
in the transition graph are swept areas of bracketing intervals running
from midpoint to midpoint of the neighbouring generic spans, so the
weights of distinct events along one path sum to at most the path's
total swept area.

The projection direction is exposed everywhere and never averaged over.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from . import geometry, isotopy
from .errors import NonGenericProjectionError, NumericError, ValidationError
from .geometry import PolygonalKnot
from .isotopy import IsotopyPath

#: Genericity tolerance for coincidences, tangencies, and depth ties.
EPS_GEN = 1e-9

#: Bisection width for localizing event times.
EVENT_TIME_TOL = 1e-9


@dataclass(frozen=True)
class Crossing:
    over_edge: int
    under_edge: int
    sign: int
    position: tuple


@dataclass(frozen=True)
class Diagram:
    crossings: tuple
    gauss_code: str


@dataclass(frozen=True)
class ReidemeisterEvent:
    time: float
    kind: str  # "R1" | "R2" | "R3"
    crossing_delta: int


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    weight: float
    witness_interval: tuple


@dataclass(frozen=True)
class DiagramGraph:
    nodes: tuple
    edges: tuple
    level_lambda: float | None = None


def projection_frame(u) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit direction u plus a right-handed in-plane basis (e1, e2, u)."""
    vec = np.asarray(u, dtype=float)
    if vec.shape != (3,):
        raise ValidationError("projection direction must be a 3-vector")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > 1e-9:
        raise ValidationError(f"projection direction must be unit length, |u| = {norm!r}")
    vec = vec / norm
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(vec)))] = 1.0
    e1 = np.cross(axis, vec)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(vec, e1)
    return e1, e2, vec


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _diagram_of_vertices(vertices: np.ndarray, frame) -> Diagram:
    e1, e2, u = frame
    pts = np.stack([vertices @ e1, vertices @ e2], axis=1)
    depth = vertices @ u
    n = vertices.shape[0]

    seg = np.roll(pts, -1, axis=0) - pts
    seg_len = np.linalg.norm(seg, axis=1)
    if np.any(seg_len <= EPS_GEN):
        k = int(np.argmin(seg_len))
        raise NonGenericProjectionError(
            f"edge {k} projects to length {seg_len[k]:.3e}; direction is tangent to it"
        )

    diffs = pts[:, None, :] - pts[None, :, :]
    vv = np.linalg.norm(diffs, axis=2)
    np.fill_diagonal(vv, np.inf)
    if np.min(vv) <= EPS_GEN:
        i, j = np.unravel_index(int(np.argmin(vv)), vv.shape)
        raise NonGenericProjectionError(
            f"projected vertices {i} and {j} coincide within {EPS_GEN:.0e}"
        )

    I, J = geometry.nonadjacent_edge_pairs(n)
    crossings = []
    if I.size:
        p = pts[I]
        q = pts[J]
        d = seg[I]
        f = seg[J]
        denom = _cross2(d, f)
        rhs = q - p
        parallel = np.abs(denom) <= EPS_GEN * seg_len[I] * seg_len[J]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(parallel, np.nan, _cross2(rhs, f) / np.where(parallel, 1.0, denom))
            t = np.where(parallel, np.nan, _cross2(rhs, d) / np.where(parallel, 1.0, denom))
        # positional tolerance translated into parameter space per edge
        tol_s = EPS_GEN / seg_len[I]
        tol_t = EPS_GEN / seg_len[J]
        hit = (~parallel) & (s > -tol_s) & (s < 1 + tol_s) & (t > -tol_t) & (t < 1 + tol_t)
        for k in np.nonzero(hit)[0]:
            si, ti = float(s[k]), float(t[k])
            i_edge, j_edge = int(I[k]), int(J[k])
            if min(si, 1.0 - si) < tol_s[k] or min(ti, 1.0 - ti) < tol_t[k]:
                raise NonGenericProjectionError(
                    f"edges {i_edge} and {j_edge} cross at a projected vertex"
                )
            pos = p[k] + si * d[k]
            za = depth[i_edge] + si * (depth[(i_edge + 1) % n] - depth[i_edge])
            zb = depth[j_edge] + ti * (depth[(j_edge + 1) % n] - depth[j_edge])
            if abs(za - zb) <= EPS_GEN:
                raise NonGenericProjectionError(
                    f"edges {i_edge} and {j_edge} cross with equal depth"
                )
            if za > zb:
                over, under = i_edge, j_edge
                d_over, d_under = d[k], f[k]
            else:
                over, under = j_edge, i_edge
                d_over, d_under = f[k], d[k]
            sign = 1 if _cross2(d_over, d_under) > 0.0 else -1
            crossings.append(
                (
                    (i_edge, si),
                    (j_edge, ti),
                    Crossing(over, under, sign, (float(pos[0]), float(pos[1]))),
                )
            )
        for k in np.nonzero(parallel)[0]:
            # parallel projected edges: tangential only if the lines coincide
            # and the spans overlap
            i_edge, j_edge = int(I[k]), int(J[k])
            dhat = d[k] / seg_len[I[k]]
            offset = rhs[k] - (rhs[k] @ dhat) * dhat
            if np.linalg.norm(offset) > EPS_GEN:
                continue
            lo = (q[k] - p[k]) @ dhat
            hi = lo + f[k] @ dhat
            lo, hi = min(lo, hi), max(lo, hi)
            if hi > -EPS_GEN and lo < seg_len[I[k]] + EPS_GEN:
                raise NonGenericProjectionError(
                    f"edges {i_edge} and {j_edge} overlap tangentially in projection"
                )

    if len(crossings) >= 2:
        positions = np.array([c[2].position for c in crossings])
        dd = np.linalg.norm(positions[:, None, :] - positions[None, :, :], axis=2)
        np.fill_diagonal(dd, np.inf)
        if np.min(dd) <= EPS_GEN:
            raise NonGenericProjectionError("two crossings coincide (triple point)")

    code = _gauss_code(crossings, n)
    return Diagram(crossings=tuple(c[2] for c in crossings), gauss_code=code)


def _gauss_code(crossings, n) -> str:
    """Canonical signed Gauss code: minimal rotation with first-visit labels."""
    if not crossings:
        return ""
    visits = []  # (edge, param, crossing_index, is_over)
    for idx, ((ei, si), (ej, sj), crossing) in enumerate(crossings):
        visits.append((ei, si, idx, crossing.over_edge == ei))
        visits.append((ej, sj, idx, crossing.over_edge == ej))
    visits.sort(key=lambda v: (v[0], v[1]))
    signs = {idx: c[2].sign for idx, c in enumerate(crossings)}
    tokens = [(v[3], signs[v[2]], v[2]) for v in visits]

    m = len(tokens)
    best = None
    for shift in range(m):
        rotated = tokens[shift:] + tokens[:shift]
        relabel = {}
        canon = []
        for is_over, sign, idx in rotated:
            if idx not in relabel:
                relabel[idx] = len(relabel) + 1
            canon.append((relabel[idx], is_over, sign))
        key = tuple(canon)
        if best is None or key < best:
            best = key
    parts = [
        f"{'O' if is_over else 'U'}{label}{'+' if sign > 0 else '-'}"
        for label, is_over, sign in best
    ]
    return ",".join(parts)


def project(knot: PolygonalKnot, u) -> Diagram:
    """Diagram of the knot under a generic projection direction.

    Raises ``NonGenericProjectionError`` naming the violated condition
    (tangent edge, coincident vertices, vertex crossing, equal-depth
    crossing, tangential overlap, triple point).
    """
    frame = projection_frame(u)
    return _diagram_of_vertices(knot.vertices, frame)


def _code_at(path: IsotopyPath, frame, t: float, lo: float | None = None, hi: float | None = None):
    """Gauss code and crossing count at time t, nudging inside (lo, hi) if
    the slice is non-generic.

    Nudge offsets scale with the bracket width so bisection can close in
    on an event time without ever having to read the degenerate instant
    itself.
    """
    if lo is not None and hi is not None:
        width = hi - lo
        offsets = [0.0]
        for frac in (0.02, 0.08, 0.2, 0.35):
            offsets.extend((frac * width, -frac * width))
    else:
        offsets = [0.0, 1e-7, -1e-7, 1e-6, -1e-6, 1e-5, -1e-5]
    last_error = None
    for off in offsets:
        tt = t + off
        if lo is not None and not (lo < tt < hi):
            continue
        if not (0.0 <= tt <= 1.0):
            continue
        try:
            diagram = _diagram_of_vertices(path.at(tt), frame)
            return diagram.gauss_code, len(diagram.crossings), tt
        except NonGenericProjectionError as exc:
            last_error = exc
    raise NonGenericProjectionError(
        f"projection is non-generic near t={t}: {last_error}"
    )


def detect_events(path: IsotopyPath, u, time_resolution: int = 256):
    """Locate and classify single-move diagram changes along the path.

    Samples ``time_resolution`` uniformly spaced times, bisects every
    adjacent pair with differing codes down to 1e-9, and classifies by
    the crossing-count change.  A third code appearing inside one
    bisection cell means two events were not separated: that is an
    error, not a guess.
    """
    if time_resolution < 2:
        raise ValidationError("time_resolution must be >= 2")
    frame = projection_frame(u)
    # endpoints must be generic as given; interior samples may be nudged
    start = _diagram_of_vertices(path.at(0.0), frame)
    end = _diagram_of_vertices(path.at(1.0), frame)
    ts = np.linspace(0.0, 1.0, int(time_resolution))
    samples = [(0.0, start.gauss_code, len(start.crossings))]
    for t in ts[1:-1]:
        code, ncross, tt = _code_at(path, frame, float(t), 0.0, 1.0)
        samples.append((tt, code, ncross))
    samples.append((1.0, end.gauss_code, len(end.crossings)))

    events = []
    for (t0, c0, n0), (t1, c1, n1) in zip(samples, samples[1:]):
        if c0 == c1:
            continue
        lo, lo_code, lo_n = t0, c0, n0
        hi, hi_code, hi_n = t1, c1, n1
        while hi - lo > EVENT_TIME_TOL:
            mid = 0.5 * (lo + hi)
            code, ncross, tt = _code_at(path, frame, mid, lo, hi)
            if code == lo_code:
                lo = tt
            elif code == hi_code:
                hi = tt
            else:
                raise NumericError(
                    f"multiple events inside one cell near t={mid}; "
                    "time_resolution is too coarse"
                )
        delta = hi_n - lo_n
        if abs(delta) == 1:
            kind = "R1"
        elif abs(delta) == 2:
            kind = "R2"
        elif delta == 0:
            kind = "R3"
        else:
            raise NumericError(
                f"crossing count jumped by {delta} at t={0.5 * (lo + hi)}; "
                "an event was missed"
            )
        events.append(ReidemeisterEvent(0.5 * (lo + hi), kind, int(delta)))
    return events


def _restrict(path: IsotopyPath, a: float, b: float) -> IsotopyPath:
    """Sub-path on [a, b], keeping interior keyframes, time rescaled."""
    arr = path.as_array()
    times = path.times
    inner = [(float(t), arr[k]) for k, t in enumerate(times) if a < t < b]
    frames = [PolygonalKnot(path.at(a))] + [PolygonalKnot(v) for _, v in inner] + [
        PolygonalKnot(path.at(b))
    ]
    new_times = np.array([a] + [t for t, _ in inner] + [b])
    new_times = (new_times - a) / (b - a)
    new_times[0] = 0.0
    new_times[-1] = 1.0
    return IsotopyPath(frames, new_times)


def build_graph(paths, u, level_lambda: float | None = None, time_resolution: int = 256) -> DiagramGraph:
    """Accumulate lifted single-move transitions from the given paths.

    Each event contributes one edge whose weight is the swept area of
    the bracketing interval; repeated transitions between the same pair
    of diagram signatures keep the minimum weight seen, a finite-sample
    stand-in with upper-bound semantics.  Paths are expected to be
    admissible at the caller's chosen level; that precondition is the
    caller's responsibility and is recorded, not enforced.
    """
    frame = projection_frame(u)
    nodes: set[str] = set()
    best: dict[tuple, GraphEdge] = {}
    for path in paths:
        events = detect_events(path, u, time_resolution)
        start_code, _, _ = _code_at(path, frame, 0.0, None, None)
        end_code, _, _ = _code_at(path, frame, 1.0, None, None)
        nodes.add(start_code)
        nodes.add(end_code)
        if not events:
            continue
        times = [e.time for e in events]
        boundaries = [0.0] + times + [1.0]
        span_mids = [
            0.5 * (boundaries[i] + boundaries[i + 1]) for i in range(len(boundaries) - 1)
        ]
        span_codes = []
        for mid in span_mids:
            code, _, _ = _code_at(path, frame, mid, None, None)
            span_codes.append(code)
        for k in range(len(events)):
            a, b = span_mids[k], span_mids[k + 1]
            source, target = span_codes[k], span_codes[k + 1]
            weight = isotopy.swept_area(_restrict(path, a, b)).total
            nodes.add(source)
            nodes.add(target)
            key = (source, target) if source <= target else (target, source)
            edge = GraphEdge(source, target, float(weight), (float(a), float(b)))
            if key not in best or edge.weight < best[key].weight:
                best[key] = edge
    return DiagramGraph(
        nodes=tuple(sorted(nodes)),
        edges=tuple(best[k] for k in sorted(best)),
        level_lambda=level_lambda,
    )


def diagram_distance(graph: DiagramGraph, code0: str, code1: str) -> float:
    """Shortest weighted path between diagram signatures; +inf if apart."""
    nodes = set(graph.nodes)
    for code in (code0, code1):
        if code not in nodes:
            raise ValidationError(f"unknown diagram signature {code!r}")
    if code0 == code1:
        return 0.0
    adj: dict[str, list] = {node: [] for node in nodes}
    for e in graph.edges:
        adj[e.source].append((e.weight, e.target))
        adj[e.target].append((e.weight, e.source))
    dist = {code0: 0.0}
    heap = [(0.0, code0)]
    seen = set()
    while heap:
        d, node = heapq.heappop(heap)
        if node in seen:
            continue
        seen.add(node)
        if node == code1:
            return d
        for w, other in adj[node]:
            nd = d + w
            if other not in seen and nd < dist.get(other, math.inf):
                dist[other] = nd
                heapq.heappush(heap, (nd, other))
    return math.inf
