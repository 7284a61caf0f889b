import numpy as np
from pydantic import Field

from spline_dp.components.utils.schema import BaseSchema, FrozenSchema


class PendulumParams(BaseSchema):
    m: float = Field(default=1.0, gt=0.0, description="tip mass [kg]")
    l: float = Field(default=1.0, gt=0.0, description="rod length [m]")  # noqa: E741
    g: float = Field(default=9.8, description="gravity [m/s^2]")
    mu: float = Field(default=0.01, ge=0.0, description="friction coefficient")
    u_max: float = Field(default=5.0, gt=0.0, description="torque bound [N m]")
    sigma_w: float = Field(default=0.0, ge=0.0, description="process noise std, units of thetadd")
    dt: float = Field(default=0.02, gt=0.0, description="Euler step [s]")
    thetadot_limit: float = Field(default=2 * np.pi, gt=0.0)

    @property
    def inertia(self) -> float:
        return self.m * self.l**2

    @property
    def input_gain(self) -> np.ndarray:
        """df/du for the state (theta, thetadot)."""
        return np.array([0.0, 1.0 / self.inertia])


class PendulumState(FrozenSchema):
    theta: float = Field(description="angle from upright, wrapped to [-pi, pi)")
    thetadot: float
    clamped: bool = Field(default=False, description="the step producing this state clamped thetadot")

    def as_array(self) -> np.ndarray:
        return np.array([self.theta, self.thetadot])
