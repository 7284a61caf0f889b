import numpy as np
import pytest

from spline_dp.components.continuity.service import ContinuityService
from spline_dp.components.spline.schema import SplineFunction
from spline_dp.components.spline.service import SplineService


class TestSmoothnessMatrix:
    def test_t32_rank(self, continuity_t32):
        smoothness, projector = continuity_t32
        assert smoothness.H.shape[1] == 480
        assert projector.rank_H == 329
        assert projector.free_parameters == 151

    def test_rows_touch_two_simplices(self, space_t32, continuity_t32):
        smoothness, _ = continuity_t32
        for row, meta in zip(smoothness.H, smoothness.rows):
            blocks = set(np.flatnonzero(row) // space_t32.dhat)
            assert blocks <= set(meta.simplex_pair)
            assert len(blocks) == 2

    def test_single_simplex_has_no_rows(self, unit_triangle):
        space = SplineService.build_space(unit_triangle, degree=2, continuity=1)
        smoothness, projector = ContinuityService.build_projector(space)
        assert smoothness.n_rows == 0
        assert projector.rank_H == 0
        assert projector.free_parameters == 6
        np.testing.assert_array_equal(projector.Z, np.eye(6))

    def test_two_triangles_linear_c0(self, two_triangles, rng):
        space = SplineService.build_space(two_triangles, degree=1, continuity=0)
        smoothness, projector = ContinuityService.build_projector(space)
        assert smoothness.n_rows == 2
        c = projector.Z @ rng.standard_normal(space.ahat)
        # shared vertices 0 and 2 sit at local slots 0 and 2 of (0, 1, 2) and 0 and 1 of (0, 2, 3)
        assert c[0] == pytest.approx(c[3 + 0])
        assert c[2] == pytest.approx(c[3 + 1])


class TestProjector:
    def test_empty_matrix_gives_identity(self):
        projector = ContinuityService.null_space_projector(np.zeros((0, 4)))
        np.testing.assert_array_equal(projector.Z, np.eye(4))

    def test_equal_pair(self):
        projector = ContinuityService.null_space_projector(np.array([[1.0, -1.0]]))
        np.testing.assert_allclose(projector.Z, np.full((2, 2), 0.5), atol=1e-12)
        assert projector.rank_H == 1

    def test_projector_laws(self, continuity_t32):
        smoothness, projector = continuity_t32
        Z, H = projector.Z, smoothness.H
        assert np.max(np.abs(Z @ Z - Z)) < 1e-8
        assert np.max(np.abs(Z - Z.T)) < 1e-9
        assert np.max(np.abs(H @ Z)) <= 1e-8 * np.max(np.abs(H))
        assert np.trace(Z) == pytest.approx(151, abs=1e-6)

    def test_residual(self, continuity_t32, rng):
        smoothness, projector = continuity_t32
        c = projector.Z @ rng.standard_normal(projector.ahat)
        assert ContinuityService.continuity_residual(smoothness.H, c) < 1e-9
        assert ContinuityService.continuity_residual(smoothness.H, rng.standard_normal(480)) > 1e-3


def piece_value(space, j, x, c):
    """Value of the polynomial piece on simplex j at x, extended past its facets."""
    simplex = space.triangulation.simplices[j]
    b = simplex.bary_transform[:, :-1] @ x + simplex.bary_transform[:, -1]
    basis = space.multinomials * np.prod(np.power(b, space.multi_indices), axis=1)
    return float(basis @ c[space.block(j)])


def piece_gradient(space, j, x, c):
    simplex = space.triangulation.simplices[j]
    b = simplex.bary_transform[:, :-1] @ x + simplex.bary_transform[:, -1]
    lower = space.lower_multinomials * np.prod(np.power(b, space.lower_indices), axis=1)
    raised = c[space.block(j)][space.raise_table]
    return space.degree * lower @ (raised @ simplex.bary_transform[:, :-1])


class TestContinuityRealized:
    def test_value_and_slope_agree_across_facets(self, space_t32, continuity_t32, rng):
        """Both pieces of a projected spline agree in value and first derivatives on every edge."""
        _, projector = continuity_t32
        t = space_t32.triangulation
        for _ in range(10):
            c = projector.Z @ rng.standard_normal(space_t32.ahat)
            for facet, neighbors in t.facet_adjacency.items():
                p, q = t.vertices[list(facet)]
                for s in rng.random(10):
                    x = (1 - s) * p + s * q
                    values = [piece_value(space_t32, j, x, c) for j in neighbors.simplices]
                    grads = [piece_gradient(space_t32, j, x, c) for j in neighbors.simplices]
                    assert abs(values[0] - values[1]) <= 1e-7 * max(abs(values[0]), 1.0)
                    assert np.max(np.abs(grads[0] - grads[1])) <= 1e-7 * max(
                        np.max(np.abs(grads[0])), 1.0
                    )

    def test_piece_value_matches_evaluate(self, space_t32, continuity_t32, rng):
        _, projector = continuity_t32
        c = projector.Z @ rng.standard_normal(space_t32.ahat)
        x = np.array([0.2, -0.9])
        j = SplineService.basis_row(space_t32, x).simplex_index
        assert piece_value(space_t32, j, x, c) == pytest.approx(
            SplineService.evaluate(SplineFunction(space=space_t32, c=c), x)
        )


class TestDump:
    def test_dump_matrices(self, continuity_t32, tmp_path):
        smoothness, projector = continuity_t32
        paths = ContinuityService.dump_matrices(smoothness, projector, tmp_path / "dump")
        assert [p.name for p in paths] == ["H.csv", "Z.csv"]
        Z = np.loadtxt(paths[1], delimiter=",")
        np.testing.assert_array_equal(Z, projector.Z)
