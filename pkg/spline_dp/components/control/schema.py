from pydantic import Field

from spline_dp.components.utils.schema import BaseSchema


class PolicyParams(BaseSchema):
    u_max: float = Field(default=5.0, gt=0.0, description="torque bound T^max [N m]")
    c_cost: float = Field(default=0.1, gt=0.0, description="control cost c")
    tau: float = Field(default=1.0, description="step-size / temperature")
    sigma_n: float = Field(default=0.01, ge=0.0, description="exploration noise std")


class RewardParams(BaseSchema):
    c_x: float = Field(default=1.0, ge=0.0)
    c_u: float = Field(default=0.1, ge=0.0)
    # the control term as literally printed (added, not subtracted)
    sign_as_printed: bool = False
