"""Keyframe isotopies of labelled polygons and their swept area.

A path is a time-ordered list of keyframes with linear vertex
interpolation in between, so the vertex velocity is piecewise constant
in time.  On each ruled face the inner integral over the edge parameter
has a closed form (the antiderivative of sqrt(a u^2 + 2 b u + c)); the
outer time integral of the continuous per-face integrand is evaluated by
adaptive Gauss-Legendre panels.

Swept area is parametrized area: overlapping faces count with
multiplicity and are never cancelled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import InvalidPathError
from .geometry import PolygonalKnot

_GL16_NODES, _GL16_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GL32_NODES, _GL32_WEIGHTS = np.polynomial.legendre.leggauss(32)

#: Absolute tolerance per keyframe interval for the adaptive time quadrature.
TIME_QUAD_TOL = 1e-10

#: Maximum bisection depth of the adaptive time quadrature.
TIME_QUAD_MAX_DEPTH = 20

#: Endpoint matching tolerance for concatenation (per coordinate pair).
CONCAT_TOL = 1e-12


class IsotopyPath:
    """Time-ordered keyframes sharing one labelling, linearly interpolated."""

    __slots__ = ("_keyframes", "_times", "_array")

    def __init__(self, keyframes, times):
        frames = tuple(
            f if isinstance(f, PolygonalKnot) else PolygonalKnot(f) for f in keyframes
        )
        if len(frames) < 2:
            raise InvalidPathError("an isotopy path needs at least 2 keyframes")
        n = frames[0].n
        for k, frame in enumerate(frames):
            if frame.n != n:
                raise InvalidPathError(
                    f"keyframe {k} has {frame.n} vertices, expected {n}"
                )
        t = np.asarray(times, dtype=float)
        if t.shape != (len(frames),):
            raise InvalidPathError("times must match the number of keyframes")
        if abs(t[0]) > 1e-12 or abs(t[-1] - 1.0) > 1e-12:
            raise InvalidPathError("times must start at 0 and end at 1")
        if np.any(np.diff(t) <= 0.0):
            raise InvalidPathError("times must be strictly increasing")
        t = (t - t[0]) / (t[-1] - t[0])
        t.setflags(write=False)
        arr = np.stack([f.vertices for f in frames])
        arr.setflags(write=False)
        self._keyframes = frames
        self._times = t
        self._array = arr

    @property
    def keyframes(self) -> tuple[PolygonalKnot, ...]:
        return self._keyframes

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def n(self) -> int:
        return self._keyframes[0].n

    def as_array(self) -> np.ndarray:
        """(M, N, 3) keyframe vertex stack (read-only)."""
        return self._array

    def at(self, t: float) -> np.ndarray:
        """Interpolated raw vertex array at time t in [0, 1]."""
        return interpolate_keyframes(self._array, self._times, t)

    def knot_at(self, t: float) -> PolygonalKnot:
        """Interpolated slice as a validated knot."""
        return PolygonalKnot(self.at(t))

    def __repr__(self) -> str:  # pragma: no cover
        return f"IsotopyPath(keyframes={len(self._keyframes)}, n={self.n})"


def interpolate_keyframes(array: np.ndarray, times: np.ndarray, t: float) -> np.ndarray:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidPathError(f"time {t} outside [0, 1]")
    k = int(np.searchsorted(times, t, side="right")) - 1
    k = min(max(k, 0), len(times) - 2)
    span = times[k + 1] - times[k]
    w = (t - times[k]) / span
    return (1.0 - w) * array[k] + w * array[k + 1]


@dataclass(frozen=True)
class SweptAreaResult:
    total: float
    per_interval: tuple
    per_face_max: float


def segment_area_integral(e, w0, w1) -> float:
    """Exact integral of |e x ((1-u) w0 + u w1)| for u in [0, 1].

    Writing A = e x w0 and D = e x (w1 - w0), the integrand is
    |A + u D| = sqrt(a u^2 + 2 b u + c).  The closed form uses the
    asinh antiderivative; when A and D are collinear the integrand is a
    piecewise-linear scalar, and when the quadratic is numerically
    degenerate (|D| small against |A|) a 32-point Gauss-Legendre rule
    takes over, which is machine-exact in exactly that regime.
    """
    e = np.asarray(e, dtype=float).reshape(1, 3)
    w0 = np.asarray(w0, dtype=float).reshape(1, 3)
    w1 = np.asarray(w1, dtype=float).reshape(1, 3)
    return float(face_integrals(e, w0, w1)[0])


def face_integrals(E: np.ndarray, W0: np.ndarray, W1: np.ndarray) -> np.ndarray:
    """Vectorized ``segment_area_integral`` over (..., 3) input batches."""
    A = np.cross(E, W0)
    D = np.cross(E, W1) - A
    a = np.einsum("...i,...i->...", D, D)
    b = np.einsum("...i,...i->...", A, D)
    c = np.einsum("...i,...i->...", A, A)
    # discriminant computed as |A x D|^2 to avoid catastrophic cancellation
    AxD = np.cross(A, D)
    disc = np.einsum("...i,...i->...", AxD, AxD)

    out = np.empty(a.shape, dtype=float)

    norm_a = np.sqrt(a)
    norm_c = np.sqrt(c)
    zero = (a == 0.0) & (c == 0.0)
    # cancellation in the antiderivative difference grows like eps*|A|/|D|,
    # while the 32-point rule is machine-exact for small |D|/|A| (analytic
    # integrand, singularities at distance ~|A|/|D| from [0, 1]); treat the
    # quadratic as numerically degenerate well before the noise shows
    degenerate = (~zero) & (norm_a < 1e-4 * norm_c)
    collinear = (~zero) & (~degenerate) & (disc <= 1e-28 * a * c)
    regular = ~(zero | degenerate | collinear)

    if np.any(regular):
        ar = a[regular]
        br = b[regular]
        cr = c[regular]
        dr = np.maximum(disc[regular], 0.0)
        sq0 = np.sqrt(cr)
        sq1 = np.sqrt(np.maximum(ar + 2.0 * br + cr, 0.0))
        sq_disc = np.sqrt(dr)
        term1 = ((ar + br) * sq1 - br * sq0) / (2.0 * ar)
        term2 = dr / (2.0 * ar * np.sqrt(ar)) * (
            np.arcsinh((ar + br) / sq_disc) - np.arcsinh(br / sq_disc)
        )
        out[regular] = term1 + term2

    if np.any(collinear):
        ac = a[collinear]
        bc = b[collinear]
        u0 = -bc / ac
        seg = np.where(
            u0 <= 0.0,
            0.5 - u0,
            np.where(u0 >= 1.0, u0 - 0.5, u0 * u0 - u0 + 0.5),
        )
        out[collinear] = np.sqrt(ac) * seg

    if np.any(degenerate):
        Ad = A[degenerate]
        Dd = D[degenerate]
        nodes = 0.5 * (_GL32_NODES + 1.0)
        weights = 0.5 * _GL32_WEIGHTS
        vals = np.linalg.norm(
            Ad[..., None, :] + nodes[:, None] * Dd[..., None, :], axis=-1
        )
        out[degenerate] = vals @ weights

    if np.any(zero):
        out[zero] = 0.0
    return out


def _interval_face_integrand(K0, K1, W0, W1, local_ts):
    """Per-face integrand values at local times in [0, 1].

    Returns an array of shape (T, N): face i evaluated at each time.
    Edges interpolate linearly between the keyframe edges; vertex
    velocities are constant on the interval.
    """
    E0 = geometry.edge_vectors_of(K0)
    E1 = geometry.edge_vectors_of(K1)
    ts = np.asarray(local_ts, dtype=float)
    E = E0[None, :, :] + ts[:, None, None] * (E1 - E0)[None, :, :]
    W0b = np.broadcast_to(W0, E.shape)
    W1b = np.broadcast_to(W1, E.shape)
    return face_integrals(E, W0b, W1b)


def _gl16_faces(K0, K1, W0, W1, lo, hi):
    """Per-face Gauss-Legendre estimate of the time integral over [lo, hi]."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    ts = mid + half * _GL16_NODES
    vals = _interval_face_integrand(K0, K1, W0, W1, ts)
    return half * np.einsum("t,tn->n", _GL16_WEIGHTS, vals)


def _adaptive_interval(K0, K1, W0, W1, tol):
    """Adaptively integrate all faces over one keyframe interval (local time)."""
    total = np.zeros(K0.shape[0])
    stack = [(0.0, 1.0, _gl16_faces(K0, K1, W0, W1, 0.0, 1.0), 0)]
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _gl16_faces(K0, K1, W0, W1, lo, mid)
        right = _gl16_faces(K0, K1, W0, W1, mid, hi)
        fine = left + right
        if abs(float(coarse.sum() - fine.sum())) <= tol or depth >= TIME_QUAD_MAX_DEPTH:
            total += fine
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total


def swept_area_of_arrays(array: np.ndarray, times: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Swept area of a raw keyframe stack: (total, per_interval, per_face)."""
    m = array.shape[0]
    n = array.shape[1]
    per_interval = np.zeros(m - 1)
    per_face = np.zeros(n)
    for k in range(m - 1):
        dt = times[k + 1] - times[k]
        K0 = array[k]
        K1 = array[k + 1]
        W = (K1 - K0) / dt
        W0 = W
        W1 = np.roll(W, -1, axis=0)
        faces = _adaptive_interval(K0, K1, W0, W1, TIME_QUAD_TOL) * dt
        per_interval[k] = faces.sum()
        per_face += faces
    return float(per_interval.sum()), per_interval, per_face


def swept_area(path: IsotopyPath) -> SweptAreaResult:
    """Parametrized area of the ruled trace surface, with multiplicity."""
    total, per_interval, per_face = swept_area_of_arrays(path.as_array(), path.times)
    return SweptAreaResult(
        total=total,
        per_interval=tuple(float(x) for x in per_interval),
        per_face_max=float(per_face.max()),
    )


def infinitesimal_seminorm(knot: PolygonalKnot, velocities) -> float:
    """First-order swept-area cost of a vertex velocity field.

    Vanishes exactly when every velocity is parallel to both edges
    adjacent to its vertex; on polygons with all turning angles bounded
    away from 0 and pi this forces the field to vanish.
    """
    W = np.asarray(velocities, dtype=float)
    if W.shape != (knot.n, 3):
        raise InvalidPathError(f"velocity field must have shape ({knot.n}, 3)")
    E = geometry.edge_vectors_of(knot.vertices)
    return float(face_integrals(E, W, np.roll(W, -1, axis=0)).sum())


def concatenate(p1: IsotopyPath, p2: IsotopyPath) -> IsotopyPath:
    """Join two paths end to start, rescaling time to [0, 1]."""
    if p1.n != p2.n:
        raise InvalidPathError("paths have different vertex counts")
    gap = np.max(np.abs(p1.as_array()[-1] - p2.as_array()[0]))
    if gap > CONCAT_TOL:
        raise InvalidPathError(
            f"endpoint mismatch {gap:.3e} exceeds {CONCAT_TOL:.0e}"
        )
    keyframes = list(p1.keyframes) + list(p2.keyframes[1:])
    times = np.concatenate([0.5 * p1.times, 0.5 + 0.5 * p2.times[1:]])
    return IsotopyPath(keyframes, times)


def reverse(path: IsotopyPath) -> IsotopyPath:
    """Time reversal; swept area is unchanged."""
    keyframes = tuple(reversed(path.keyframes))
    times = 1.0 - path.times[::-1]
    return IsotopyPath(keyframes, times)


def refine(path: IsotopyPath, factor: int) -> IsotopyPath:
    """Insert ``factor - 1`` interpolated keyframes per interval.

    The underlying piecewise-linear map is unchanged, so the swept area
    is preserved.
    """
    if factor < 1:
        raise InvalidPathError("refinement factor must be >= 1")
    if factor == 1:
        return path
    arr = path.as_array()
    times = path.times
    new_times = [0.0]
    new_frames = [path.keyframes[0]]
    for k in range(len(times) - 1):
        for step in range(1, factor + 1):
            w = step / factor
            t = times[k] + w * (times[k + 1] - times[k])
            if step < factor:
                new_frames.append(PolygonalKnot((1.0 - w) * arr[k] + w * arr[k + 1]))
            else:
                new_frames.append(path.keyframes[k + 1])
                t = times[k + 1]
            new_times.append(float(t))
    new_times[-1] = 1.0
    return IsotopyPath(new_frames, np.asarray(new_times))


def constant_path(knot: PolygonalKnot) -> IsotopyPath:
    return IsotopyPath((knot, knot), np.array([0.0, 1.0]))


def linear_path(k0: PolygonalKnot, k1: PolygonalKnot, keyframe_count: int = 2) -> IsotopyPath:
    """Straight-line vertex interpolation sampled at uniform times."""
    if k0.n != k1.n:
        raise InvalidPathError("endpoints have different vertex counts")
    if keyframe_count < 2:
        raise InvalidPathError("keyframe_count must be >= 2")
    times = np.linspace(0.0, 1.0, keyframe_count)
    v0 = k0.vertices
    v1 = k1.vertices
    frames = [k0]
    for t in times[1:-1]:
        frames.append(PolygonalKnot((1.0 - t) * v0 + t * v1))
    frames.append(k1)
    return IsotopyPath(frames, times)
