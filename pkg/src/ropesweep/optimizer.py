"""Numerical upper bounds on swept-area costs over admissible paths.

The decision variables are the vertex coordinates of the interior
keyframes; endpoints stay frozen.  Constraints (slice thickness >= 1,
slice length <= lambda) enter through growing quadratic penalties, and
the inner loop is plain gradient descent with Armijo backtracking on
central finite differences of the penalized objective.

Finite differences exploit additivity: perturbing one coordinate of one
keyframe touches two ruled faces in two time intervals and only the
penalty slices inside that keyframe's time window, so everything else is
skipped.  The internal objective integrates each interval with a fixed
32-point Gauss-Legendre rule; the reported upper bound is always
recomputed with the public adaptive quadrature on the final path.

Every reported value is an upper bound: the infimum itself is never
claimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import geometry, isotopy
from .calibration import Bound, BoundKind
from .errors import InfeasibleError, InvalidPathError, NumericError, ValidationError
from .geometry import PolygonalKnot
from .isotopy import IsotopyPath
from .thickness import (
    EPS_ADM,
    THICKNESS_FLOOR,
    check_admissible,
    sample_times,
    thickness_value_of,
)

_GL32_NODES, _GL32_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL32_TS = 0.5 * (_GL32_NODES + 1.0)
_GL32_WS = 0.5 * _GL32_WEIGHTS

#: Central-difference step on the penalized objective.
FD_STEP = 1e-6

#: Penalty slices farther than this from their constraint boundary cannot be
#: activated by a finite-difference step and are skipped in gradients.
ACTIVE_MARGIN = 1e-3


@dataclass(frozen=True)
class OptimizeConfig:
    lam: float
    keyframe_count: int = 16
    time_samples: int = 33
    penalty_weight_initial: float = 100.0
    penalty_growth: float = 10.0
    max_outer_iters: int = 8
    max_inner_iters: int = 40
    step_tolerance: float = 1e-10
    objective_tolerance: float = 1e-11
    seed: int = 0

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValidationError("lambda level must be positive")
        if self.keyframe_count < 2:
            raise ValidationError("keyframe_count must be >= 2")
        if self.time_samples < self.keyframe_count:
            raise ValidationError("time_samples must be >= keyframe_count")
        if self.penalty_weight_initial <= 0.0 or self.penalty_growth <= 1.0:
            raise ValidationError("penalty weights must be positive and growing")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise ValidationError("iteration limits must be positive")
        if self.step_tolerance <= 0.0 or self.objective_tolerance <= 0.0:
            raise ValidationError("tolerances must be positive")


@dataclass(frozen=True)
class OptimizeResult:
    path: IsotopyPath
    upper_bound: float
    admissible: bool
    constraint_violation_max: float
    iterations: int
    converged: bool


def _require_admissible_endpoint(knot: PolygonalKnot, lam: float, name: str):
    thi = thickness_value_of(knot.vertices)
    ln = geometry.length_of(knot.vertices)
    if thi < THICKNESS_FLOOR - EPS_ADM or ln > lam + EPS_ADM:
        raise InfeasibleError(
            f"{name} is not admissible at lambda={lam}: thickness={thi:.12g}, length={ln:.12g}"
        )


def _interval_faces_gl32(K0, K1, dt, faces):
    """GL32 time integral of the chosen faces over one keyframe interval."""
    nxt0 = np.roll(K0, -1, axis=0)
    nxt1 = np.roll(K1, -1, axis=0)
    E0 = (nxt0 - K0)[faces]
    E1 = (nxt1 - K1)[faces]
    W = (K1 - K0) / dt
    W0 = W[faces]
    W1 = W[(np.asarray(faces) + 1) % K0.shape[0]]
    E = E0[None, :, :] + _GL32_TS[:, None, None] * (E1 - E0)[None, :, :]
    vals = isotopy.face_integrals(E, np.broadcast_to(W0, E.shape), np.broadcast_to(W1, E.shape))
    return dt * float(_GL32_WS @ vals.sum(axis=1))


class _Problem:
    """Penalized fixed-endpoint sweep minimization over interior keyframes."""

    def __init__(self, array: np.ndarray, times: np.ndarray, cfg: OptimizeConfig):
        self.K = array.copy()
        self.times = times.copy()
        self.cfg = cfg
        self.M, self.N, _ = self.K.shape
        self.all_faces = np.arange(self.N)
        self.slice_times = sample_times(times, cfg.time_samples)

    # -- objective pieces ---------------------------------------------------

    def area(self, K) -> float:
        total = 0.0
        for m in range(self.M - 1):
            dt = self.times[m + 1] - self.times[m]
            total += _interval_faces_gl32(K[m], K[m + 1], dt, self.all_faces)
        return total

    def slice_metrics(self, K, t: float):
        v = isotopy.interpolate_keyframes(K, self.times, t)
        return thickness_value_of(v), geometry.length_of(v)

    def penalty(self, K, slice_idx=None) -> float:
        idx = range(len(self.slice_times)) if slice_idx is None else slice_idx
        total = 0.0
        for i in idx:
            thi, ln = self.slice_metrics(K, float(self.slice_times[i]))
            total += max(0.0, THICKNESS_FLOOR - thi) ** 2
            total += max(0.0, ln - self.cfg.lam) ** 2
        return total

    def objective(self, K, weight: float) -> float:
        return self.area(K) + weight * self.penalty(K)

    def violation(self, K) -> float:
        worst = 0.0
        for t in self.slice_times:
            thi, ln = self.slice_metrics(K, float(t))
            worst = max(worst, THICKNESS_FLOOR - thi, ln - self.cfg.lam)
        return max(worst, 0.0)

    # -- structured central differences --------------------------------------

    def active_slices(self, K):
        """Slice indices close enough to a constraint to matter for FD."""
        idx = []
        for i, t in enumerate(self.slice_times):
            thi, ln = self.slice_metrics(K, float(t))
            if thi < THICKNESS_FLOOR + ACTIVE_MARGIN or ln > self.cfg.lam - ACTIVE_MARGIN:
                idx.append(i)
        return idx

    def gradient(self, K, weight: float) -> np.ndarray:
        grad = np.zeros((self.M - 2, self.N, 3))
        active = self.active_slices(K) if weight > 0.0 else []
        slice_ts = self.slice_times
        work = K.copy()
        h = FD_STEP
        for k in range(1, self.M - 1):
            touching = [
                i
                for i in active
                if self.times[k - 1] <= slice_ts[i] <= self.times[k + 1]
            ]
            for v in range(self.N):
                faces = np.array([(v - 1) % self.N, v])
                for axis in range(3):
                    orig = work[k, v, axis]
                    vals = []
                    for sign in (1.0, -1.0):
                        work[k, v, axis] = orig + sign * h
                        term = 0.0
                        for m in (k - 1, k):
                            dt = self.times[m + 1] - self.times[m]
                            term += _interval_faces_gl32(work[m], work[m + 1], dt, faces)
                        if touching:
                            term += weight * self.penalty(work, touching)
                        vals.append(term)
                    work[k, v, axis] = orig
                    grad[k - 1, v, axis] = (vals[0] - vals[1]) / (2.0 * h)
        return grad

    # -- descent --------------------------------------------------------------

    def descend(self, weight: float):
        """Inner gradient-descent loop; returns (iterations, accepted_any)."""
        cfg = self.cfg
        f_val = self.objective(self.K, weight)
        alpha = None
        iterations = 0
        accepted_any = False
        for _ in range(cfg.max_inner_iters):
            iterations += 1
            g = self.gradient(self.K, weight)
            gnorm2 = float(np.sum(g * g))
            if gnorm2 == 0.0:
                break
            if alpha is None:
                alpha = 0.1 / math.sqrt(gnorm2)
            else:
                alpha *= 2.0
            accepted = False
            while alpha * math.sqrt(gnorm2) > 1e-16:
                trial = self.K.copy()
                trial[1:-1] -= alpha * g
                f_trial = self.objective(trial, weight)
                if f_trial <= f_val - 1e-4 * alpha * gnorm2:
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                break
            step = alpha * math.sqrt(gnorm2)
            df = f_val - f_trial
            self.K = trial
            f_val = f_trial
            accepted_any = True
            if step < cfg.step_tolerance:
                break
            if df <= cfg.objective_tolerance * max(1.0, abs(f_val)):
                break
        return iterations, accepted_any


def _initial_array(k0: PolygonalKnot, k1: PolygonalKnot, cfg: OptimizeConfig):
    """Linear interpolation, rescaled about centroids where thickness dips."""
    times = np.linspace(0.0, 1.0, cfg.keyframe_count)
    v0 = k0.vertices
    v1 = k1.vertices
    frames = []
    for t in times:
        v = (1.0 - t) * v0 + t * v1
        if 0.0 < t < 1.0:
            thi = thickness_value_of(v)
            if 0.0 < thi < THICKNESS_FLOOR:
                factor = THICKNESS_FLOOR / thi
                ln = geometry.length_of(v)
                if ln * factor > cfg.lam:
                    factor = max(1.0, cfg.lam / ln)
                center = v.mean(axis=0)
                v = center + factor * (v - center)
        frames.append(v)
    return np.stack(frames), times


def _result_from_problem(problem: _Problem, cfg: OptimizeConfig, iterations: int) -> OptimizeResult:
    try:
        path = IsotopyPath([PolygonalKnot(frame) for frame in problem.K], problem.times)
    except Exception as exc:
        raise NumericError(
            f"optimized path contains an invalid keyframe and cannot be reported: {exc}"
        ) from exc
    report = check_admissible(path, cfg.lam, cfg.time_samples)
    violation = 0.0
    for s in report.per_slice:
        violation = max(violation, THICKNESS_FLOOR - s.thickness, s.length - cfg.lam)
    violation = max(violation, 0.0)
    upper = isotopy.swept_area(path).total
    return OptimizeResult(
        path=path,
        upper_bound=float(upper),
        admissible=report.admissible,
        constraint_violation_max=float(violation),
        iterations=iterations,
        converged=report.admissible,
    )


def _optimize_array(array, times, cfg: OptimizeConfig) -> OptimizeResult:
    problem = _Problem(array, times, cfg)
    rng = np.random.default_rng(cfg.seed)
    weight = cfg.penalty_weight_initial
    total_iterations = 0
    perturbed = False
    for outer in range(cfg.max_outer_iters):
        iterations, accepted = problem.descend(weight)
        total_iterations += iterations
        violation = problem.violation(problem.K)
        if violation <= EPS_ADM:
            break
        if not accepted and not perturbed:
            # stuck at a non-smooth point: seeded jitter, then retry once
            problem.K[1:-1] += 1e-6 * rng.standard_normal(problem.K[1:-1].shape)
            perturbed = True
            continue
        weight *= cfg.penalty_growth
    return _result_from_problem(problem, cfg, total_iterations)


def minimize_sweep(
    k0: PolygonalKnot,
    k1: PolygonalKnot,
    cfg: OptimizeConfig,
    initial_path: IsotopyPath | None = None,
) -> OptimizeResult:
    """Locally minimize swept area over admissible paths from k0 to k1.

    The result is an upper bound on the swept-area cost whenever the
    returned path is admissible; inadmissible results claim no bound.
    """
    if k0.n != k1.n:
        raise ValidationError("endpoints must have the same vertex count")
    _require_admissible_endpoint(k0, cfg.lam, "start knot")
    _require_admissible_endpoint(k1, cfg.lam, "end knot")
    if initial_path is not None:
        if initial_path.n != k0.n:
            raise InvalidPathError("warm-start path has a different vertex count")
        if (
            np.max(np.abs(initial_path.as_array()[0] - k0.vertices)) > 1e-9
            or np.max(np.abs(initial_path.as_array()[-1] - k1.vertices)) > 1e-9
        ):
            raise InvalidPathError("warm-start path does not join the requested endpoints")
        array = initial_path.as_array().copy()
        times = initial_path.times.copy()
    else:
        array, times = _initial_array(k0, k1, cfg)
    return _optimize_array(array, times, cfg)


def loop_cost(
    base: PolygonalKnot, seed_path: IsotopyPath, cfg: OptimizeConfig
) -> OptimizeResult:
    """Upper bound on the cost of the based loop class seeded by ``seed_path``.

    Both endpoints stay pinned to the base knot; the interior of the seed
    loop is optimized.  The homotopy class of the seed is not identified.
    """
    arr = seed_path.as_array()
    if (
        np.max(np.abs(arr[0] - base.vertices)) > 0.0
        or np.max(np.abs(arr[-1] - base.vertices)) > 0.0
    ):
        raise InvalidPathError("seed loop must start and end at the base knot exactly")
    _require_admissible_endpoint(base, cfg.lam, "base knot")
    path = seed_path
    if len(path.keyframes) < cfg.keyframe_count:
        factor = math.ceil((cfg.keyframe_count - 1) / (len(path.keyframes) - 1))
        path = isotopy.refine(path, factor)
    return _optimize_array(path.as_array().copy(), path.times.copy(), cfg)


def merge_cost(set0, set1, cfg: OptimizeConfig) -> Bound:
    """Min over representative pairs of the optimized upper bounds."""
    set0 = list(set0)
    set1 = list(set1)
    if not set0 or not set1:
        raise ValidationError("representative sets must be non-empty")
    best = None
    best_pair = None
    failures = []
    for i, a in enumerate(set0):
        for j, b in enumerate(set1):
            try:
                res = minimize_sweep(a, b, cfg)
            except (InfeasibleError, NumericError) as exc:
                failures.append(f"pair ({i}, {j}): {exc}")
                continue
            if not res.admissible:
                failures.append(
                    f"pair ({i}, {j}): optimizer finished inadmissible "
                    f"(violation {res.constraint_violation_max:.3e})"
                )
                continue
            if best is None or res.upper_bound < best:
                best = res.upper_bound
                best_pair = (i, j)
    if best is None:
        raise InfeasibleError(
            "no admissible pairing found at lambda=%r; %s" % (cfg.lam, "; ".join(failures))
        )
    return Bound(value=best, kind=BoundKind.UPPER_BOUND, witness={"pair": list(best_pair)})


def merge_scale_upper(
    k0: PolygonalKnot,
    k1: PolygonalKnot,
    lam_lo: float,
    lam_hi: float,
    cfg: OptimizeConfig,
) -> float:
    """Bisect the smallest level at which the optimizer connects k0 and k1.

    Optimizer failure does not certify infeasibility, so the returned
    level is an upper bound on the merge scale, located to relative
    width 1e-3.
    """
    if not lam_lo < lam_hi:
        raise ValidationError("need lam_lo < lam_hi")

    def attempt(level, warm):
        try:
            res = minimize_sweep(k0, k1, replace(cfg, lam=level), initial_path=warm)
        except (InfeasibleError, NumericError):
            return None
        return res if res.admissible else None

    hi_result = attempt(lam_hi, None)
    if hi_result is None:
        raise InfeasibleError(f"optimizer could not connect the endpoints at lambda={lam_hi}")
    lo_result = attempt(lam_lo, hi_result.path)
    if lo_result is not None:
        return float(lam_lo)
    lo, hi = float(lam_lo), float(lam_hi)
    warm = hi_result.path
    while (hi - lo) > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        res = attempt(mid, warm)
        if res is None:
            lo = mid
        else:
            hi = mid
            warm = res.path
    return hi


def lambda_sweep(k0: PolygonalKnot, k1: PolygonalKnot, levels, cfg: OptimizeConfig):
    """Warm-started upper bounds along increasing levels; reported sequence
    is nonincreasing (a later level may reuse an earlier path)."""
    levels = [float(x) for x in levels]
    if any(b < a for a, b in zip(levels, levels[1:])):
        raise ValidationError("levels must be nondecreasing")
    out = []
    prev_path = None
    prev_val = math.inf
    for level in levels:
        val = math.inf
        try:
            res = minimize_sweep(k0, k1, replace(cfg, lam=level), initial_path=prev_path)
        except (InfeasibleError, NumericError):
            res = None
        if res is not None and res.admissible:
            val = res.upper_bound
            if val <= prev_val:
                prev_path = res.path
                prev_val = val
        val = min(val, prev_val)
        out.append((level, val))
    return out
