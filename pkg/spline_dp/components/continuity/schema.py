from pydantic import Field

from spline_dp.components.spline.schema import MultiIndex
from spline_dp.components.utils.schema import FloatArray, FrozenSchema


class ConstraintRow(FrozenSchema):
    simplex_pair: tuple[int, int]
    order: int
    facet_index: MultiIndex


class SmoothnessMatrix(FrozenSchema):
    H: FloatArray = Field(description="(constraints, ahat)")
    rows: list[ConstraintRow]

    @property
    def n_rows(self) -> int:
        return self.H.shape[0]


class NullSpaceProjector(FrozenSchema):
    Z: FloatArray = Field(description="(ahat, ahat) orthogonal projector onto null(H)")
    rank_H: int
    svd_tolerance: float

    @property
    def ahat(self) -> int:
        return self.Z.shape[0]

    @property
    def free_parameters(self) -> int:
        return self.ahat - self.rank_H
