import numpy as np

from spline_dp.components.pendulum.schema import PendulumParams, PendulumState
from spline_dp.utils.exceptions import InvalidParam


def wrap_angle(theta: float) -> float:
    wrapped = (theta + np.pi) % (2 * np.pi) - np.pi
    # float modulo can land exactly on +pi
    return -np.pi if wrapped >= np.pi else float(wrapped)


class PendulumService:
    @staticmethod
    def initial_state(theta0: float, thetadot0: float = 0.0) -> PendulumState:
        return PendulumState(theta=wrap_angle(theta0), thetadot=thetadot0)

    @staticmethod
    def acceleration(s: PendulumState, u: float, w: float, p: PendulumParams) -> float:
        return (
            (p.g / p.l) * np.sin(s.theta)
            - (p.mu / p.inertia) * s.thetadot
            + u / p.inertia
            + w
        )

    @staticmethod
    def step(s: PendulumState, u: float, w_sample: float, p: PendulumParams) -> PendulumState:
        """One explicit Euler step; theta integrates the pre-update thetadot."""
        thetadd = PendulumService.acceleration(s, u, p.sigma_w * w_sample, p)
        thetadot = s.thetadot + p.dt * thetadd
        clamped = bool(abs(thetadot) > p.thetadot_limit)
        if clamped:
            thetadot = float(np.clip(thetadot, -p.thetadot_limit, p.thetadot_limit))
        return PendulumState(
            theta=wrap_angle(s.theta + p.dt * s.thetadot),
            thetadot=float(thetadot),
            clamped=clamped,
        )

    @staticmethod
    def set_mass(p: PendulumParams, m_new: float) -> PendulumParams:
        if not np.isfinite(m_new) or m_new <= 0:
            raise InvalidParam(f"mass must be positive, got {m_new}")
        return p.model_copy(update={"m": float(m_new)})

    @staticmethod
    def energy(s: PendulumState, p: PendulumParams) -> float:
        """Kinetic plus potential energy, zero when hanging at rest."""
        return 0.5 * p.inertia * s.thetadot**2 + p.m * p.g * p.l * (1.0 + np.cos(s.theta))
