import numpy as np
import pytest

from spline_dp.components.continuity.service import ContinuityService
from spline_dp.components.geometry.service import GeometryService
from spline_dp.components.spline.service import SplineService

THETA_BREAKS = np.linspace(-np.pi, np.pi, 5)
THETADOT_BREAKS = np.linspace(-2 * np.pi, 2 * np.pi, 5)


@pytest.fixture(scope="session")
def t32():
    return GeometryService.build_grid_triangulation(THETA_BREAKS, THETADOT_BREAKS)


@pytest.fixture(scope="session")
def space_t32(t32):
    return SplineService.build_space(t32, degree=4, continuity=1)


@pytest.fixture(scope="session")
def continuity_t32(space_t32):
    """(SmoothnessMatrix, NullSpaceProjector) of S4^1 on the 32-triangle mesh."""
    return ContinuityService.build_projector(space_t32)


@pytest.fixture(scope="session")
def two_triangles():
    vertices = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    return GeometryService.from_simplices(vertices, [(0, 1, 2), (0, 2, 3)])


@pytest.fixture(scope="session")
def unit_triangle():
    return GeometryService.from_simplices([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [(0, 1, 2)])


@pytest.fixture(scope="session")
def desk_space():
    t = GeometryService.build_grid_triangulation(
        np.linspace(-np.pi, np.pi, 3), np.linspace(-2 * np.pi, 2 * np.pi, 3)
    )
    return SplineService.build_space(t, degree=2, continuity=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_points(t, rng, count):
    """Uniform points in the bounding box of a triangulation."""
    low, high = t.bounds
    return low + (high - low) * rng.random((count, t.dim))


def random_in_simplex(simplex, rng):
    b = rng.dirichlet(np.ones(simplex.dim + 1))
    return b @ simplex.vertices, b
