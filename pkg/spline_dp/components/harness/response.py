from pydantic import Field

from spline_dp.components.utils.response import BaseResponse


class TrialRecord(BaseResponse):
    trial_index: int
    theta0: float
    t_up: float = Field(ge=0.0, description="seconds")
    total_reward: float
    clamp_count: int = 0
    diverged: bool = False


class TrajectorySample(BaseResponse):
    t: float
    theta: float
    thetadot: float
    u: float
    reward: float


class TrialSummary(BaseResponse):
    trials: int
    mean_t_up: float
    std_t_up: float
    diverged: int
    moving_average: list[float] = []


class ExperimentResult(BaseResponse):
    experiment: str
    variant: str
    master_seed: int
    records: list[TrialRecord]
    summary: TrialSummary
    pre_change_summary: TrialSummary | None = None
    runtime_s: float = 0.0
    max_continuity_residual: float = 0.0
