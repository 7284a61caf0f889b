import json

import numpy as np
import pytest

from spline_dp.components.geometry.service import GeometryService
from spline_dp.utils.exceptions import InvalidGrid, InvalidTriangulation, OutOfDomain
from tests.conftest import random_in_simplex, random_points


class TestBarycentric:
    def test_vertex_maps_to_unit_coordinates(self, unit_triangle):
        s = unit_triangle.simplices[0]
        for i, vertex in enumerate(s.vertices):
            np.testing.assert_allclose(
                GeometryService.cartesian_to_barycentric(s, vertex), np.eye(3)[i], atol=1e-10
            )

    def test_centroid(self, unit_triangle):
        s = unit_triangle.simplices[0]
        b = GeometryService.cartesian_to_barycentric(s, s.vertices.mean(axis=0))
        np.testing.assert_allclose(b, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)

    def test_worked_example(self, unit_triangle):
        b = GeometryService.cartesian_to_barycentric(unit_triangle.simplices[0], [0.25, 0.5])
        np.testing.assert_allclose(b, [0.25, 0.25, 0.5], atol=1e-12)

    def test_round_trip(self, t32, rng):
        """1000 random in-simplex points come back to where they started."""
        for k in range(1000):
            s = t32.simplices[k % t32.n_simplices]
            x, _ = random_in_simplex(s, rng)
            b = GeometryService.cartesian_to_barycentric(s, x)
            assert abs(b.sum() - 1.0) < 1e-10
            np.testing.assert_allclose(
                GeometryService.barycentric_to_cartesian(s, b), x, rtol=1e-9, atol=1e-9
            )

    def test_directional_coordinates_sum_to_zero(self, t32):
        a = GeometryService.directional_coordinates(t32.simplices[3], [0.3, -1.2])
        assert abs(a.sum()) < 1e-12
        np.testing.assert_allclose(a @ t32.simplices[3].vertices, [0.3, -1.2], atol=1e-12)

    def test_degenerate_simplex_rejected(self):
        with pytest.raises(InvalidTriangulation):
            GeometryService.build_simplex((0, 1, 2), [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])


class TestGridTriangulation:
    def test_t32_counts(self, t32):
        assert len(t32.vertices) == 25
        assert t32.n_simplices == 32

    def test_single_cell(self):
        t = GeometryService.build_grid_triangulation([0.0, 1.0], [0.0, 1.0])
        assert t.n_simplices == 2

    def test_two_cells_mirror_across_center_column(self):
        t = GeometryService.build_grid_triangulation([-1.0, 0.0, 1.0], [0.0, 1.0])
        assert t.n_simplices == 4
        diagonals = []
        for s in t.simplices:
            spans = [
                (a, b)
                for a in range(3)
                for b in range(a + 1, 3)
                if not np.isclose(s.vertices[a, 0], s.vertices[b, 0])
                and not np.isclose(s.vertices[a, 1], s.vertices[b, 1])
            ]
            (a, b), = spans
            diagonals.append(frozenset(map(tuple, s.vertices[[a, b]].round(12).tolist())))
        left, right = diagonals[0], diagonals[2]
        mirrored = frozenset((-x, y) for x, y in left)
        assert mirrored == right

    def test_point_symmetric_about_center(self, t32):
        center = t32.bounds.mean(axis=0)
        lookup = {tuple(np.round(v, 9)): i for i, v in enumerate(t32.vertices)}
        simplices = {frozenset(s.vertex_ids) for s in t32.simplices}
        reflected = {
            frozenset(lookup[tuple(np.round(2 * center - t32.vertices[v], 9))] for v in s)
            for s in simplices
        }
        assert reflected == simplices

    def test_every_interior_edge_has_two_owners(self, t32):
        # 4x4 cells: 2*4*3 axis-aligned interior edges plus 16 diagonals
        assert len(t32.facet_adjacency) == 24 + 16
        for neighbors in t32.facet_adjacency.values():
            i, j = neighbors.simplices
            assert i < j

    def test_area_matches_bounds(self, t32):
        box = np.prod(t32.bounds[1] - t32.bounds[0])
        assert GeometryService.triangulation_area(t32) == pytest.approx(box, rel=1e-8)

    @pytest.mark.parametrize(
        "theta, thetadot",
        [([0.0, 0.0, 1.0], [0.0, 1.0]), ([1.0, 0.0], [0.0, 1.0]), ([0.0], [0.0, 1.0])],
    )
    def test_invalid_breaks(self, theta, thetadot):
        with pytest.raises(InvalidGrid):
            GeometryService.build_grid_triangulation(theta, thetadot)


class TestLocate:
    def test_interior_point(self, t32):
        s = t32.simplices[5]
        index, b = GeometryService.locate(t32, s.vertices.mean(axis=0))
        assert index == 5
        assert np.all(b > 0)

    def test_shared_facet_goes_to_lower_index(self, two_triangles):
        index, b = GeometryService.locate(two_triangles, [0.5, 0.5])
        assert index == 0
        assert np.min(np.abs(b)) < 1e-12

    def test_outside_bounds(self, t32):
        with pytest.raises(OutOfDomain):
            GeometryService.locate(t32, [4.0, 0.0])

    def test_random_points_are_covered(self, t32, rng):
        for x in random_points(t32, rng, 1000):
            _, b = GeometryService.locate(t32, x)
            assert b.min() >= -1e-9


class TestTriangulationFile:
    def test_load_round_trip(self, t32, tmp_path):
        path = GeometryService.save_triangulation(t32, tmp_path / "meshes" / "mesh.json")
        loaded = GeometryService.load_triangulation(path)
        np.testing.assert_array_equal(loaded.vertices, t32.vertices)
        assert [s.vertex_ids for s in loaded.simplices] == [s.vertex_ids for s in t32.simplices]

    def test_overlapping_mesh_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]],
                    "simplices": [[0, 1, 2], [0, 2, 3], [0, 1, 3]],
                }
            )
        )
        with pytest.raises(InvalidTriangulation):
            GeometryService.load_triangulation(path)

    def test_single_triangle(self, tmp_path):
        path = tmp_path / "tri.json"
        path.write_text(json.dumps({"vertices": [[0, 0], [1, 0], [0, 1]], "simplices": [[0, 1, 2]]}))
        t = GeometryService.load_triangulation(path)
        assert t.n_simplices == 1
        assert t.facet_adjacency == {}
        assert GeometryService.triangulation_area(t) == pytest.approx(0.5)

    def test_l_shaped_mesh(self, tmp_path):
        vertices = [[0, 0], [1, 0], [2, 0], [0, 1], [1, 1], [2, 1], [0, 2], [1, 2]]
        simplices = [[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4], [3, 4, 7], [3, 7, 6]]
        path = tmp_path / "l.json"
        path.write_text(json.dumps({"vertices": vertices, "simplices": simplices}))
        t = GeometryService.load_triangulation(path)
        assert GeometryService.triangulation_area(t) == pytest.approx(3.0)
        assert len(t.facet_adjacency) == 5
        index, _ = GeometryService.locate(t, [0.5, 1.5])
        assert index in (4, 5)
        with pytest.raises(OutOfDomain):
            GeometryService.locate(t, [1.5, 1.5])

    def test_crossing_simplices_rejected(self):
        vertices = [[0, 0], [2, 0], [0, 2], [0.5, 0.5], [3, 0.5], [0.5, 3]]
        with pytest.raises(InvalidTriangulation):
            GeometryService.from_simplices(vertices, [(0, 1, 2), (3, 4, 5)])

    def test_folded_facet_rejected(self):
        vertices = [[0, 0], [1, 0], [0.5, 1], [0.5, 0.5]]
        with pytest.raises(InvalidTriangulation):
            GeometryService.from_simplices(vertices, [(0, 1, 2), (0, 1, 3)])

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        with pytest.raises(InvalidTriangulation):
            GeometryService.load_triangulation(path)
