import numpy as np
from pydantic import Field

from spline_dp.components.geometry.schema import Triangulation
from spline_dp.components.utils.schema import FloatArray, FrozenSchema, IntArray

MultiIndex = tuple[int, ...]


class SplineSpace(FrozenSchema):
    """S_d^r on a triangulation, with the per-simplex index tables it needs."""

    degree: int = Field(ge=1)
    continuity: int = Field(ge=0)
    triangulation: Triangulation
    dhat: int
    ahat: int
    multi_indices: IntArray = Field(description="(dhat, n+1), lexicographic order")
    multinomials: FloatArray = Field(description="d!/kappa! per multi-index")
    lower_indices: IntArray = Field(description="(dhat_{d-1}, n+1)")
    lower_multinomials: FloatArray
    raise_table: IntArray = Field(description="position of kappa + e_i in the degree-d list")

    @property
    def n_simplices(self) -> int:
        return self.triangulation.n_simplices

    @property
    def dim(self) -> int:
        return self.triangulation.dim

    def block(self, simplex_index: int) -> slice:
        start = simplex_index * self.dhat
        return slice(start, start + self.dhat)

    def index_of(self, kappa: MultiIndex) -> int:
        hits = np.flatnonzero(np.all(self.multi_indices == np.asarray(kappa), axis=1))
        if hits.size != 1:
            raise KeyError(f"multi-index {kappa} is not of degree {self.degree}")
        return int(hits[0])


class BasisRow(FrozenSchema):
    """Sparse global basis vector: one dense block of dhat values."""

    simplex_index: int
    barycentric: FloatArray
    values: FloatArray
    dhat: int
    ahat: int

    @property
    def columns(self) -> np.ndarray:
        start = self.simplex_index * self.dhat
        return np.arange(start, start + self.dhat)

    def to_dense(self) -> np.ndarray:
        row = np.zeros(self.ahat)
        row[self.columns] = self.values
        return row


class SplineFunction(FrozenSchema):
    space: SplineSpace
    c: FloatArray
