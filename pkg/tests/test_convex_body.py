from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.spatial import ConvexHull

from subbary.models.errors import DegenerateBody, DomainError, EmptyInput, EmptySlice, OutOfSupport
from subbary.models.geometry import Direction, SliceSpec
from subbary.utils.exact import add, affine_rank, scale

E1 = Direction.coordinate(1, 2)


@st.composite
def dyadic_polygons(draw, min_points=3, max_points=8):
    coords = st.integers(min_value=0, max_value=16).map(lambda k: Fraction(k, 16))
    points = draw(st.lists(st.tuples(coords, coords), min_size=min_points, max_size=max_points, unique=True))
    assume(affine_rank(points) == 2)
    return points


class TestBuild:
    def test_triangle_keeps_three_vertices(self, kernel):
        body = kernel.build([(0, 0), (1, 0), (0, 1)], 2)
        assert len(body.vertices) == 3

    def test_interior_point_is_dropped(self, kernel):
        body = kernel.build([(0, 0), (1, 0), (0, 1), ("1/4", "1/4")], 2)
        assert len(body.vertices) == 3
        assert (Fraction(1, 4), Fraction(1, 4)) not in body.vertices

    def test_collinear_points_are_degenerate(self, kernel):
        with pytest.raises(DegenerateBody):
            kernel.build([(0, 0), (1, 0), (2, 0)], 2)

    def test_empty_input(self, kernel):
        with pytest.raises(EmptyInput):
            kernel.build([], 2)

    def test_wrong_coordinate_count(self, kernel):
        with pytest.raises(DegenerateBody):
            kernel.build([(0, 0), (1, 0), (0, 1, 2)], 2)

    def test_segment(self, kernel):
        body = kernel.build([(3,), (1,), (2,)], 1)
        assert body.volume == 2
        assert body.barycenter == (Fraction(2),)


class TestVolumeAndBarycenter:
    def test_cube(self, cube):
        assert cube.volume == 1
        assert cube.barycenter == (Fraction(1, 2),) * 3

    def test_simplex(self, simplex3, triangle):
        assert simplex3.volume == Fraction(1, 6)
        assert triangle.volume == Fraction(1, 2)
        assert triangle.barycenter == (Fraction(1, 3), Fraction(1, 3))

    def test_eckardt_quadrilateral(self, eckardt_body):
        assert eckardt_body.volume == 3
        assert eckardt_body.barycenter == (Fraction(4, 3), Fraction(0))

    def test_simplex_volumes_sum_to_volume(self, kernel, cube, eckardt_body):
        for body in (cube, eckardt_body):
            assert sum(kernel.simplex_volumes(body)) == body.volume

    def test_cross_polytope_volume(self, kernel):
        points = []
        for axis in range(3):
            for sign in (-1, 1):
                points.append(tuple(sign if i == axis else 0 for i in range(3)))
        body = kernel.build(points, 3)
        assert body.volume == Fraction(4, 3)
        assert body.barycenter == (0, 0, 0)

    @given(dyadic_polygons())
    @settings(max_examples=40, deadline=None)
    def test_volume_matches_scipy_hull(self, kernel, points):
        body = kernel.build(points, 2)
        expected = ConvexHull(np.array(points, dtype=float)).volume
        assert float(body.volume) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_random_3d_volume_matches_scipy_hull(self, kernel):
        rng = np.random.default_rng(7)
        points = [tuple(Fraction(int(x), 64) for x in row) for row in rng.integers(0, 65, size=(12, 3))]
        body = kernel.build(points, 3)
        expected = ConvexHull(np.array(points, dtype=float)).volume
        assert float(body.volume) == pytest.approx(expected, rel=1e-9)
        assert sum(kernel.simplex_volumes(body)) == body.volume


class TestSupportAndClip:
    def test_support(self, kernel, eckardt_body, unit_square, triangle):
        assert kernel.support(eckardt_body, E1) == (0, 3)
        assert kernel.support(unit_square, Direction.coordinate(2, 2)) == (0, 1)
        assert kernel.support(triangle, E1) == (0, 1)

    def test_direction_dimension_mismatch(self, kernel, cube):
        with pytest.raises(DomainError):
            kernel.support(cube, E1)

    def test_square_half(self, kernel, unit_square):
        piece = kernel.clip(unit_square, SliceSpec(E1, Fraction(1, 2)))
        assert piece.volume == Fraction(1, 2)
        assert piece.barycenter == (Fraction(3, 4), Fraction(1, 2))

    def test_triangle_upper_slice(self, kernel, triangle):
        piece = kernel.clip(triangle, SliceSpec(E1, Fraction(1, 2)))
        assert piece.volume == Fraction(1, 8)
        assert set(piece.vertices) == {
            (Fraction(1, 2), Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(1, 2), Fraction(1, 2)),
        }

    def test_eckardt_slice_at_two(self, kernel, eckardt_body):
        piece = kernel.clip(eckardt_body, SliceSpec(E1, 2))
        assert piece.volume == Fraction(1, 2)
        assert set(piece.vertices) == {
            (Fraction(2), Fraction(-1, 2)), (Fraction(3), Fraction(0)), (Fraction(2), Fraction(1, 2)),
        }

    def test_clip_at_support_end_is_empty(self, kernel, triangle):
        assert kernel.clip(triangle, SliceSpec(E1, 1)) is None
        assert kernel.clip(triangle, SliceSpec(E1, 0, "le")) is None
        with pytest.raises(EmptySlice):
            kernel.sub_barycenter(triangle, SliceSpec(E1, 1))

    def test_full_slice_is_the_body(self, kernel, eckardt_body):
        assert kernel.sub_barycenter(eckardt_body, SliceSpec(E1, 0)) == eckardt_body.barycenter

    def test_sub_barycenters(self, kernel, triangle, eckardt_body):
        t = Fraction(1, 4)
        assert kernel.sub_barycenter(triangle, SliceSpec(E1, t))[0] == t + (1 - t) / 3
        assert kernel.sub_barycenter(eckardt_body, SliceSpec(E1, 1))[0] == Fraction(5, 3)

    def test_oblique_partition_in_3d(self, kernel, cube):
        direction = Direction.from_values([1, 2, 3])
        upper = kernel.clip(cube, SliceSpec(direction, 3, "ge"))
        lower = kernel.clip(cube, SliceSpec(direction, 3, "le"))
        assert upper.volume + lower.volume == 1
        moment = add(scale(upper.volume, upper.barycenter), scale(lower.volume, lower.barycenter))
        assert moment == cube.barycenter

    @given(dyadic_polygons(), st.fractions(min_value=0, max_value=1, max_denominator=97))
    @settings(max_examples=30, deadline=None)
    def test_partition_and_barycenter_decomposition(self, kernel, points, fraction):
        body = kernel.build(points, 2)
        lower, upper = kernel.support(body, E1)
        t = lower + fraction * (upper - lower)
        assume(lower < t < upper)
        above = kernel.clip(body, SliceSpec(E1, t, "ge"))
        below = kernel.clip(body, SliceSpec(E1, t, "le"))
        assert above.volume + below.volume == body.volume
        moment = add(scale(above.volume, above.barycenter), scale(below.volume, below.barycenter))
        assert moment == scale(body.volume, body.barycenter)


class TestClipFaceLattice:
    def test_plane_through_vertices(self, kernel, cube):
        direction = Direction.from_values([1, 1, 1])
        corner = kernel.clip(cube, SliceSpec(direction, 1, "le"))
        assert corner.volume == Fraction(1, 6)
        assert len(corner.vertices) == 4
        assert corner == kernel.build(corner.vertices, 3)
        rest = kernel.clip(cube, SliceSpec(direction, 1, "ge"))
        assert rest.volume == Fraction(5, 6)
        assert rest == kernel.build(rest.vertices, 3)

    def test_only_edges_are_cut(self, kernel, cube):
        # a plane separating one corner crosses its three edges, not the four diagonals
        piece = kernel.clip(cube, SliceSpec(Direction.from_values([1, 1, 1]), Fraction(5, 2), "ge"))
        assert len(piece.vertices) == 4
        assert piece.volume == Fraction(1, 48)

    def test_segment(self, kernel):
        body = kernel.build([(1,), (4,)], 1)
        piece = kernel.clip(body, SliceSpec(Direction.coordinate(1, 1), 2))
        assert piece == kernel.build([(2,), (4,)], 1)

    def test_tesseract(self, kernel):
        corners = [(a, b, c, d) for a in (0, 1) for b in (0, 1) for c in (0, 1) for d in (0, 1)]
        body = kernel.build(corners, 4)
        direction = Direction.from_values([1, 2, 3, 4])
        upper = kernel.clip(body, SliceSpec(direction, 5, "ge"))
        lower = kernel.clip(body, SliceSpec(direction, 5, "le"))
        assert upper.volume + lower.volume == 1
        assert upper == kernel.build(upper.vertices, 4)
        assert lower == kernel.build(lower.vertices, 4)

    @given(dyadic_polygons(min_points=4), st.fractions(min_value=0, max_value=1, max_denominator=31),
           st.sampled_from(["ge", "le"]))
    @settings(max_examples=30, deadline=None)
    def test_matches_a_fresh_hull(self, kernel, points, fraction, side):
        body = kernel.build(points, 2)
        direction = Direction.from_values([1, -2])
        lower, upper = kernel.support(body, direction)
        t = lower + fraction * (upper - lower)
        assume(lower < t < upper)
        piece = kernel.clip(body, SliceSpec(direction, t, side))
        assert piece == kernel.build(piece.vertices, 2)
        assert all(body.contains(v) for v in piece.vertices)
        assert not body.contains(tuple(x + 1 for x in body.vertices[-1]))


class TestSliceProfile:
    def test_matches_clip_volumes(self, kernel, eckardt_body):
        profile = kernel.slice_profile(eckardt_body, E1)
        for t in (Fraction(1, 3), Fraction(1), Fraction(5, 2)):
            piece = kernel.clip(eckardt_body, SliceSpec(E1, t))
            assert profile.volume_ge(t) == piece.volume
            assert profile.mean_ge(t) == piece.barycenter[0]

    def test_density_is_the_width(self, kernel, eckardt_body):
        profile = kernel.slice_profile(eckardt_body, E1)
        assert profile.density(Fraction(1, 2)) == 1
        assert profile.density(Fraction(2)) == 1
        assert profile.density(Fraction(1)) == 2

    def test_cross_section_root_is_concave(self, kernel, simplex3):
        profile = kernel.slice_profile(simplex3, Direction.coordinate(1, 3))
        roots = [float(profile.density(Fraction(k, 4))) ** 0.5 for k in (1, 2, 3)]
        assert roots[1] >= (roots[0] + roots[2]) / 2 - 1e-9


class TestQuantile:
    def test_endpoints(self, kernel, eckardt_body):
        assert kernel.quantile_threshold(eckardt_body, E1, 0) == 3
        assert kernel.quantile_threshold(eckardt_body, E1, 1) == 0

    def test_eckardt_quantiles(self, kernel, eckardt_body):
        assert kernel.quantile_threshold(eckardt_body, E1, Fraction(1, 6)) == 2
        assert kernel.quantile_threshold(eckardt_body, E1, Fraction(2, 3)) == 1
        assert float(kernel.quantile_threshold(eckardt_body, E1, 0.5)) == pytest.approx(3 - 3 ** 0.5, abs=1e-11)

    def test_out_of_range(self, kernel, eckardt_body):
        with pytest.raises(DomainError):
            kernel.quantile_threshold(eckardt_body, E1, 1.5)


class TestInequalities:
    @pytest.mark.parametrize("t", [Fraction(1, 100), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(299, 100)])
    def test_generalized_hammer_on_eckardt(self, kernel, eckardt_body, t):
        check = kernel.generalized_hammer(eckardt_body, E1, t)
        assert check.slack_ge >= -1e-9
        assert check.slack_le >= -1e-9

    def test_one_sided_at_support_ends(self, kernel, triangle):
        assert kernel.generalized_hammer(triangle, E1, 0).slack_le is None
        assert kernel.generalized_hammer(triangle, E1, 1).slack_ge is None

    def test_out_of_support(self, kernel, triangle):
        with pytest.raises(OutOfSupport, match=r"t outside support \[0, 1\]"):
            kernel.generalized_hammer(triangle, E1, 2)

    def test_neumann_hammer_bounds(self, kernel, eckardt_body):
        bounds = kernel.neumann_hammer_bounds(eckardt_body, E1)
        assert bounds == (1, Fraction(4, 3), 2)
        assert bounds.lower <= bounds.value <= bounds.upper


class TestOracleAndReport:
    def test_mc_oracle_on_box(self, kernel, unit_square):
        result = kernel.mc_volume_oracle(unit_square, 10_000, seed=1)
        assert result.estimate == pytest.approx(1.0)

    def test_mc_oracle_within_four_sigma(self, kernel, eckardt_body):
        result = kernel.mc_volume_oracle(eckardt_body, 200_000, seed=3)
        assert abs(result.estimate - 3.0) <= 4 * result.std_error

    def test_slice_report(self, kernel, unit_square):
        report = kernel.slice_report(unit_square, SliceSpec(E1, Fraction(1, 2)))
        assert report["volume"] == "1"
        assert report["sub_barycenter"] == ["0.75", "0.5"]
        assert report["tau"] == "0.5"

    def test_exact_slice_report(self, kernel, eckardt_body):
        report = kernel.slice_report(eckardt_body, SliceSpec(E1, 1), exact=True)
        assert report["barycenter"] == ["4/3", "0"]
        assert report["sub_barycenter"][0] == "5/3"
        assert report["tau"] == "2/3"

    def test_slice_report_out_of_support(self, kernel, unit_square):
        with pytest.raises(OutOfSupport):
            kernel.slice_report(unit_square, SliceSpec(E1, 2))
