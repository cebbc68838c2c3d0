import math

import numpy as np
import pytest

from ropesweep import corpus, geometry
from ropesweep.errors import InvalidKnotError, ValidationError
from ropesweep.geometry import OrientedPlane, PolygonalKnot, SizeFunctionalKind

from conftest import random_rotation

XY = OrientedPlane((0.0, 0.0, 1.0))


def unit_square():
    return PolygonalKnot([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]])


class TestConstruction:
    def test_needs_three_vertices(self):
        with pytest.raises(InvalidKnotError):
            PolygonalKnot([[0, 0, 0], [1, 0, 0]])

    def test_rejects_repeated_vertex(self):
        with pytest.raises(InvalidKnotError):
            PolygonalKnot([[0, 0, 0], [1, 0, 0], [1, 0, 0], [0, 1, 0]])

    def test_rejects_nonembedded(self):
        # bowtie: edges 0 and 2 cross
        with pytest.raises(InvalidKnotError):
            PolygonalKnot([[0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0]])

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidKnotError):
            PolygonalKnot([[0, 0, 0], [1, 0, 0], [np.nan, 1, 0]])

    def test_vertices_read_only(self):
        knot = unit_square()
        with pytest.raises(ValueError):
            knot.vertices[0, 0] = 5.0


class TestLength:
    def test_unit_square(self):
        assert geometry.length(unit_square()) == pytest.approx(4.0, abs=0.0)

    def test_regular_ngon_chord_formula(self):
        n = 64
        expected = n * 2.0 * math.sin(math.pi / n)
        assert geometry.length(corpus.regular_ngon(n, 1.0)) == pytest.approx(
            expected, rel=1e-14
        )


class TestAngles:
    def test_square_right_angles(self):
        angles = geometry.exterior_angles(unit_square())
        assert np.allclose(angles, math.pi / 2.0, atol=1e-12)

    def test_regular_ngon(self):
        n = 17
        angles = geometry.exterior_angles(corpus.regular_ngon(n, 2.0))
        assert np.allclose(angles, 2.0 * math.pi / n, atol=1e-12)

    def test_collinear_vertex_zero_angle(self):
        knot = PolygonalKnot([[0, 0, 0], [1, 0, 0], [2, 0, 0], [2, 1, 0], [0, 1, 0]])
        assert geometry.exterior_angles(knot)[1] == pytest.approx(0.0, abs=1e-7)

    def test_total_curvature_square_and_ngon(self):
        assert geometry.total_curvature(unit_square()) == pytest.approx(2 * math.pi)
        assert geometry.total_curvature(corpus.regular_ngon(40, 1.0)) == pytest.approx(
            2 * math.pi
        )

    def test_trefoil_total_curvature_exceeds_4pi(self):
        trefoil = corpus.trefoil_polygon(64)
        assert geometry.total_curvature(trefoil) >= 4 * math.pi - 1e-9


class TestVectorArea:
    def test_ccw_square(self):
        sq = corpus.square(1.0)
        assert np.allclose(geometry.vector_area(sq), [0, 0, 4.0], atol=1e-14)

    def test_translation_invariance(self):
        sq = corpus.square(1.0)
        moved = sq.translated((5.0, 7.0, 9.0))
        assert np.allclose(
            geometry.vector_area(sq), geometry.vector_area(moved), atol=1e-12
        )

    def test_orientation_reversal(self):
        sq = corpus.square(1.0)
        rev = PolygonalKnot(sq.vertices[::-1])
        assert np.allclose(geometry.vector_area(rev), [0, 0, -4.0], atol=1e-14)


class TestProjectedArea:
    def test_square_shoelace(self):
        assert geometry.projected_signed_area(corpus.square(1.0), XY) == pytest.approx(4.0)

    def test_orthogonal_plane_vanishes(self):
        plane = OrientedPlane((1.0, 0.0, 0.0))
        assert geometry.projected_signed_area(corpus.square(1.0), plane) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_inscribed_polygon_area(self):
        n = 64
        knot = corpus.regular_ngon(n, 2.0)
        expected = 4.0 * (n / 2.0) * math.sin(2.0 * math.pi / n)
        assert geometry.projected_signed_area(knot, XY) == pytest.approx(expected, rel=1e-13)

    def test_matches_vector_area_identity(self, rng):
        for _ in range(25):
            knot = corpus.random_perturbed(12, 3.0, 0.3, int(rng.integers(1 << 30)))
            normal = rng.standard_normal(3)
            plane = OrientedPlane.from_vector(normal)
            lhs = geometry.projected_signed_area(knot, plane)
            rhs = float(np.asarray(plane.normal) @ geometry.vector_area(knot))
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


class TestSize:
    def test_square_diameter(self):
        assert geometry.size(unit_square(), SizeFunctionalKind.DIAMETER) == pytest.approx(
            math.sqrt(2.0)
        )

    def test_square_ball(self):
        value = geometry.size(unit_square(), SizeFunctionalKind.MIN_ENCLOSING_BALL_RADIUS)
        assert value == pytest.approx(math.sqrt(2.0) / 2.0, rel=1e-12)

    def test_hexagon_diameter(self):
        hexagon = corpus.regular_ngon(6, 1.0)
        assert geometry.size(hexagon, SizeFunctionalKind.DIAMETER) == pytest.approx(2.0)

    def test_ball_contains_all_vertices(self, rng):
        for _ in range(20):
            knot = corpus.random_perturbed(20, 2.0, 0.4, int(rng.integers(1 << 30)))
            center, radius = geometry.min_enclosing_ball(knot.vertices)
            dists = np.linalg.norm(knot.vertices - center, axis=1)
            assert np.all(dists <= radius * (1 + 1e-9) + 1e-9)
            # minimality: some vertex must be on the boundary
            assert dists.max() >= radius - 1e-7


class TestDensityFactorization:
    def test_density_value(self):
        n = 64
        knot = corpus.regular_ngon(n, 1.0)
        rho = geometry.density(knot, SizeFunctionalKind.DIAMETER)
        assert rho == pytest.approx(128.0 * math.sin(math.pi / n) / 2.0, rel=1e-12)

    def test_square_compression_radius(self):
        crad = geometry.compression_radius(unit_square(), SizeFunctionalKind.DIAMETER, 1.0)
        assert crad == pytest.approx(math.sqrt(2.0))

    @pytest.mark.parametrize("kind", list(SizeFunctionalKind))
    def test_factorization_identity(self, kind, rng):
        from ropesweep import thickness as thickness_mod

        for _ in range(100):
            knot = corpus.random_perturbed(10, 3.0, 0.25, int(rng.integers(1 << 30)))
            thi = thickness_mod.thickness(knot).thickness
            rho = geometry.density(knot, kind)
            crad = geometry.compression_radius(knot, kind, thi)
            rop = geometry.length(knot) / thi
            assert rho * crad == pytest.approx(rop, rel=1e-12)

    def test_zero_thickness_rejected(self):
        with pytest.raises(ValidationError):
            geometry.compression_radius(unit_square(), SizeFunctionalKind.DIAMETER, 0.0)


class TestEuclideanInvariance:
    def test_static_functionals(self, rng):
        for _ in range(20):
            knot = corpus.random_perturbed(14, 3.0, 0.3, int(rng.integers(1 << 30)))
            rot = random_rotation(rng)
            moved = knot.transformed(rot, rng.standard_normal(3))
            assert geometry.length(moved) == pytest.approx(geometry.length(knot), rel=1e-9)
            assert geometry.total_curvature(moved) == pytest.approx(
                geometry.total_curvature(knot), rel=1e-9
            )
            for kind in SizeFunctionalKind:
                assert geometry.size(moved, kind) == pytest.approx(
                    geometry.size(knot, kind), rel=1e-9
                )
            assert np.linalg.norm(geometry.vector_area(moved)) == pytest.approx(
                np.linalg.norm(geometry.vector_area(knot)), rel=1e-9, abs=1e-12
            )


class TestOrientedPlane:
    def test_rejects_non_unit(self):
        with pytest.raises(ValidationError):
            OrientedPlane((0.0, 0.0, 2.0))

    def test_from_vector_normalizes(self):
        plane = OrientedPlane.from_vector((0.0, 0.0, 7.0))
        assert plane.normal == (0.0, 0.0, 1.0)

    def test_from_zero_vector(self):
        with pytest.raises(ValidationError):
            OrientedPlane.from_vector((0.0, 0.0, 0.0))

    def test_basis_right_handed(self, rng):
        for _ in range(10):
            plane = OrientedPlane.from_vector(rng.standard_normal(3))
            e1, e2 = plane.basis()
            assert np.allclose(np.cross(e1, e2), plane.normal, atol=1e-12)
