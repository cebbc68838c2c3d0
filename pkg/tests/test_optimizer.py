import math

import numpy as np
import pytest

from ropesweep import calibration, corpus, geometry, isotopy, optimizer
from ropesweep.errors import InfeasibleError, ValidationError
from ropesweep.optimizer import OptimizeConfig


def admissible_circle(n, nominal_radius):
    return corpus.unit_thickness_ngon(n, nominal_radius)


def small_cfg(lam, **kw):
    defaults = dict(keyframe_count=6, time_samples=13, seed=3, max_inner_iters=12)
    defaults.update(kw)
    return OptimizeConfig(lam=lam, **defaults)


class TestMinimizeSweep:
    def test_identity_pair_is_free(self):
        knot = admissible_circle(24, 1.0)
        res = optimizer.minimize_sweep(knot, knot, small_cfg(10.0))
        assert res.admissible
        assert res.upper_bound <= 1e-8

    def test_circle_pair_hits_calibration_floor(self):
        inner = admissible_circle(32, 1.0)
        outer = admissible_circle(32, 1.6)
        lam = geometry.length(outer) + 1e-9
        res = optimizer.minimize_sweep(inner, outer, small_cfg(lam, keyframe_count=8))
        lower = calibration.sup_plane_bound(inner, outer).value
        assert res.admissible
        assert lower - 1e-9 <= res.upper_bound <= lower * 1.01

    def test_upper_bound_recomputed_from_path(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.4)
        lam = geometry.length(outer) + 1e-9
        res = optimizer.minimize_sweep(inner, outer, small_cfg(lam))
        assert res.upper_bound == pytest.approx(
            isotopy.swept_area(res.path).total, abs=0.0
        )

    def test_rotated_square_pair_respects_sandwich(self):
        base = corpus.square(2.0)  # thickness 2, admissible
        c, s = math.cos(0.4), math.sin(0.4)
        rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        other = base.transformed(rot)
        cfg = small_cfg(40.0, keyframe_count=6)
        res = optimizer.minimize_sweep(base, other, cfg)
        assert res.admissible
        lower = calibration.sup_plane_bound(base, other).value
        assert res.upper_bound >= lower - 1e-9

    def test_inadmissible_endpoint_rejected(self):
        thin = corpus.regular_ngon(64, 1.0)  # thickness just below 1
        with pytest.raises(InfeasibleError):
            optimizer.minimize_sweep(thin, thin.scaled(2.0), small_cfg(30.0))

    def test_length_budget_enforced_on_endpoints(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 2.0)
        with pytest.raises(InfeasibleError):
            optimizer.minimize_sweep(inner, outer, small_cfg(7.0))

    def test_deterministic_for_fixed_seed(self):
        inner = admissible_circle(12, 1.0)
        outer = admissible_circle(12, 1.3)
        lam = geometry.length(outer) + 1e-9
        r1 = optimizer.minimize_sweep(inner, outer, small_cfg(lam, seed=11))
        r2 = optimizer.minimize_sweep(inner, outer, small_cfg(lam, seed=11))
        assert r1.upper_bound == r2.upper_bound
        assert np.array_equal(r1.path.as_array(), r2.path.as_array())
        assert r1.iterations == r2.iterations

    def test_symmetry_within_two_percent(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.5)
        lam = geometry.length(outer) + 1e-9
        fwd = optimizer.minimize_sweep(inner, outer, small_cfg(lam))
        back = optimizer.minimize_sweep(
            outer, inner, small_cfg(lam), initial_path=isotopy.reverse(fwd.path)
        )
        assert back.upper_bound == pytest.approx(fwd.upper_bound, rel=0.02)

    def test_triangle_with_concatenated_warm_start(self):
        a = admissible_circle(16, 1.0)
        b = admissible_circle(16, 1.3)
        c = admissible_circle(16, 1.6)
        lam = geometry.length(c) + 1e-9
        cfg = small_cfg(lam)
        ab = optimizer.minimize_sweep(a, b, cfg)
        bc = optimizer.minimize_sweep(b, c, cfg)
        warm = isotopy.concatenate(ab.path, bc.path)
        ac = optimizer.minimize_sweep(a, c, cfg, initial_path=warm)
        assert ac.upper_bound <= ab.upper_bound + bc.upper_bound + 0.02 * (
            ab.upper_bound + bc.upper_bound
        )


class TestLoopCost:
    def test_constant_seed_loop_is_free(self):
        knot = admissible_circle(16, 1.0)
        seed = isotopy.constant_path(knot)
        res = optimizer.loop_cost(knot, seed, small_cfg(10.0, keyframe_count=4))
        assert res.admissible
        assert res.upper_bound <= 1e-8

    def test_go_and_return_does_not_increase(self):
        knot = admissible_circle(16, 1.0)
        out = admissible_circle(16, 1.2)
        leg = isotopy.linear_path(knot, out, 4)
        seed = isotopy.concatenate(leg, isotopy.reverse(leg))
        lam = geometry.length(out) + 1e-9
        res = optimizer.loop_cost(knot, seed, small_cfg(lam, keyframe_count=7))
        assert res.admissible
        assert res.upper_bound <= 2.0 * isotopy.swept_area(leg).total + 1e-9

    def test_subadditive_over_concatenation(self):
        knot = admissible_circle(16, 1.0)
        outs = [admissible_circle(16, 1.15), admissible_circle(16, 1.3)]
        lam = geometry.length(outs[1]) + 1e-9
        cfg = small_cfg(lam, keyframe_count=7)
        loops = []
        costs = []
        for out in outs:
            leg = isotopy.linear_path(knot, out, 4)
            seed = isotopy.concatenate(leg, isotopy.reverse(leg))
            res = optimizer.loop_cost(knot, seed, cfg)
            loops.append(res.path)
            costs.append(res.upper_bound)
        combined = optimizer.loop_cost(
            knot, isotopy.concatenate(loops[0], loops[1]), cfg
        )
        assert combined.upper_bound <= costs[0] + costs[1] + 1e-6

    def test_seed_must_be_based(self):
        knot = admissible_circle(16, 1.0)
        other = admissible_circle(16, 1.2)
        seed = isotopy.linear_path(knot, other, 3)
        with pytest.raises(Exception):
            optimizer.loop_cost(knot, seed, small_cfg(12.0))


class TestMergeCost:
    def test_singleton_sets_match_minimize(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.4)
        lam = geometry.length(outer) + 1e-9
        cfg = small_cfg(lam)
        single = optimizer.minimize_sweep(inner, outer, cfg)
        merged = optimizer.merge_cost([inner], [outer], cfg)
        assert merged.value == pytest.approx(single.upper_bound, abs=0.0)
        assert merged.witness["pair"] == [0, 0]

    def test_monotone_in_level(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.4)
        lam = geometry.length(outer) + 1e-9
        low = optimizer.merge_cost([inner], [outer], small_cfg(lam))
        high = optimizer.merge_cost([inner], [outer], small_cfg(lam + 3.0))
        assert high.value <= low.value + 1e-6

    def test_extra_representative_never_hurts(self):
        inner = admissible_circle(16, 1.0)
        mid = admissible_circle(16, 1.2)
        outer = admissible_circle(16, 1.4)
        lam = geometry.length(outer) + 1e-9
        cfg = small_cfg(lam)
        base = optimizer.merge_cost([inner], [outer], cfg)
        bigger = optimizer.merge_cost([inner, mid], [outer], cfg)
        assert bigger.value <= base.value + 1e-12

    def test_no_admissible_pairing(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 2.0)
        with pytest.raises(InfeasibleError):
            optimizer.merge_cost([inner], [outer], small_cfg(8.0))


class TestMergeScale:
    def test_circle_pair_scale_is_outer_length(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.5)
        need = geometry.length(outer)
        cfg = small_cfg(need * 2.0)
        value = optimizer.merge_scale_upper(inner, outer, 0.5 * need, 2.0 * need, cfg)
        assert value >= need - 1e-9
        assert value <= need * 1.02

    def test_identical_endpoints_return_low_end(self):
        knot = admissible_circle(16, 1.0)
        need = geometry.length(knot)
        cfg = small_cfg(need * 2.0, keyframe_count=4)
        value = optimizer.merge_scale_upper(knot, knot, need + 0.5, need + 3.0, cfg)
        assert value == pytest.approx(need + 0.5)

    def test_infeasible_at_high_end(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.5)
        with pytest.raises(InfeasibleError):
            optimizer.merge_scale_upper(inner, outer, 1.0, 2.0, small_cfg(2.0))


class TestLambdaSweep:
    def test_circle_pair_levels(self):
        inner = admissible_circle(32, 1.0)
        outer = admissible_circle(32, 1.6)
        base = geometry.length(outer) + 1e-6
        levels = [base, base + 2.0, base + 4.0]
        cfg = small_cfg(base, keyframe_count=8)
        rows = optimizer.lambda_sweep(inner, outer, levels, cfg)
        values = [v for _, v in rows]
        lower = calibration.sup_plane_bound(inner, outer).value
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        assert all(v >= lower - 1e-9 for v in values)

    def test_single_level(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.3)
        lam = geometry.length(outer) + 1e-9
        rows = optimizer.lambda_sweep(inner, outer, [lam], small_cfg(lam))
        assert len(rows) == 1

    def test_repeated_level_equal_values(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.3)
        lam = geometry.length(outer) + 1e-9
        rows = optimizer.lambda_sweep(inner, outer, [lam, lam], small_cfg(lam))
        assert rows[0][1] == pytest.approx(rows[1][1], abs=0.0)

    def test_infeasible_levels_are_infinite(self):
        inner = admissible_circle(16, 1.0)
        outer = admissible_circle(16, 1.3)
        lam = geometry.length(outer)
        rows = optimizer.lambda_sweep(
            inner, outer, [lam - 1.0, lam + 1.0], small_cfg(lam + 1.0)
        )
        assert math.isinf(rows[0][1])
        assert math.isfinite(rows[1][1])

    def test_rejects_decreasing_levels(self):
        knot = admissible_circle(16, 1.0)
        with pytest.raises(ValidationError):
            optimizer.lambda_sweep(knot, knot, [10.0, 9.0], small_cfg(10.0))


class TestConfigValidation:
    def test_bad_level(self):
        with pytest.raises(ValidationError):
            OptimizeConfig(lam=-1.0)

    def test_bad_samples(self):
        with pytest.raises(ValidationError):
            OptimizeConfig(lam=1.0, keyframe_count=8, time_samples=4)
