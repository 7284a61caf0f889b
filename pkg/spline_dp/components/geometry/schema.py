from enum import Enum

import numpy as np
from pydantic import Field

from spline_dp.components.utils.schema import FloatArray, FrozenSchema

# absolute tolerance on barycentric membership
BARYCENTRIC_TOL = 1e-9
# relative tolerance on |det| of the edge matrix
DEGENERACY_TOL = 1e-12


class TriangulationStyle(str, Enum):
    TYPE_III = "type_iii"


class Simplex(FrozenSchema):
    vertex_ids: tuple[int, ...]
    vertices: FloatArray = Field(description="(n+1, n) vertex coordinates")
    bary_transform: FloatArray = Field(
        description="(n+1, n+1) map from homogeneous Cartesian [x; 1] to b"
    )

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def volume(self) -> float:
        edges = self.vertices[1:] - self.vertices[0]
        return abs(float(np.linalg.det(edges))) / float(np.prod(np.arange(1, self.dim + 1)))


class FacetNeighbors(FrozenSchema):
    """The two simplices sharing an interior facet, lower index first."""

    simplices: tuple[int, int]
    out_vertices: tuple[int, int]


class Triangulation(FrozenSchema):
    vertices: FloatArray
    simplices: list[Simplex]
    facet_adjacency: dict[tuple[int, ...], FacetNeighbors]
    bounds: FloatArray = Field(description="(2, n) lower and upper corner")
    transforms: FloatArray = Field(description="stacked bary_transform, (J, n+1, n+1)")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_simplices(self) -> int:
        return len(self.simplices)

    @property
    def scale(self) -> float:
        return float(np.max(self.bounds[1] - self.bounds[0]))
