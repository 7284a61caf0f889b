from enum import IntEnum

from spline_dp.components.continuity.schema import SmoothnessMatrix
from spline_dp.components.estimator.schema import EstimatorState, EstimatorVariant
from spline_dp.components.spline.schema import SplineSpace
from spline_dp.components.utils.schema import BaseSchema


class StreamKey(IntEnum):
    """Independent random sub-streams derived from the master seed."""

    THETA0 = 0
    PROCESS = 1
    EXPLORATION = 2


class TrialPhase(IntEnum):
    RECORDED = 0
    PRETRAIN = 1


class Agent(BaseSchema):
    """The learner threaded through the trials of one experiment."""

    space: SplineSpace
    smoothness: SmoothnessMatrix
    state: EstimatorState
    variant: EstimatorVariant
    space_hash: str
