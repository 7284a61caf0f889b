from enum import Enum

from pydantic import Field

from spline_dp.components.continuity.schema import NullSpaceProjector
from spline_dp.components.utils.schema import BaseSchema, FloatArray

# |q| below this aborts an RLSTD step
DENOMINATOR_TOL = 1e-12


class EstimatorVariant(str, Enum):
    RLS = "rls"
    RLSTD = "rlstd"
    RLSTD_FORGET = "rlstd_forget"


class EstimatorState(BaseSchema):
    """Coefficients c and covariance P of one learning agent.

    Updates return a new state; the arrays of the old one are left untouched.
    """

    c: FloatArray
    P: FloatArray
    projector: NullSpaceProjector
    gamma: float = Field(default=0.98, ge=0.0, lt=1.0)
    beta1: float = Field(default=10.0, gt=0.0)
    beta2: float = Field(default=0.0, ge=0.0)
    step_count: int = 0
    symmetrize: bool = True
    forget_projected: bool = True

    @property
    def Z(self):
        return self.projector.Z

    @property
    def ahat(self) -> int:
        return self.c.shape[0]
