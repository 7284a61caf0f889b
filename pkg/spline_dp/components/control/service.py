import numpy as np

from spline_dp.components.control.schema import PolicyParams, RewardParams
from spline_dp.components.spline.schema import SplineFunction
from spline_dp.components.spline.service import SplineService

SATURATION = 1.0 - 1e-9


class ControlService:
    @staticmethod
    def greedy_action(
        V: SplineFunction,
        x,
        p: PolicyParams,
        input_gain,
        noise_sample: float = 0.0,
    ) -> float:
        """u = u_max tanh((pi/2)(tau/c) <grad V(x), df/du> + n)."""
        drive = float(SplineService.gradient(V, x) @ np.asarray(input_gain, dtype=np.float64))
        u = p.u_max * np.tanh(0.5 * np.pi * (p.tau / p.c_cost) * drive + noise_sample)
        # tanh rounds to +-1 for large arguments
        return float(np.clip(u, -SATURATION * p.u_max, SATURATION * p.u_max))

    @staticmethod
    def control_cost(u: float, u_max: float) -> float:
        """Closed form of the integral of tan(pi s / 2) from 0 to |u|/u_max."""
        ratio = min(abs(u) / u_max, SATURATION)
        return -(2.0 / np.pi) * np.log(np.cos(0.5 * np.pi * ratio))

    @staticmethod
    def reward(x_next, u: float, rp: RewardParams, u_max: float) -> float:
        theta = float(np.asarray(x_next, dtype=np.float64)[0])
        state_term = rp.c_x * (np.cos(theta) - 1.0)
        control_term = rp.c_u * ControlService.control_cost(u, u_max)
        if rp.sign_as_printed:
            return float(state_term + control_term)
        return float(state_term - control_term)
