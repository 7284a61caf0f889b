import math
import tomllib
from enum import Enum
from pathlib import Path

from pydantic import Field, ValidationError, model_validator

from spline_dp.components.control.schema import PolicyParams, RewardParams
from spline_dp.components.estimator.schema import EstimatorVariant
from spline_dp.components.pendulum.schema import PendulumParams
from spline_dp.components.utils.schema import BaseSchema
from spline_dp.config.logger_config import logger
from spline_dp.utils.exceptions import ConfigError
from spline_dp.utils.utility import hash_payload


class ExperimentKind(str, Enum):
    I = "I"  # noqa: E741
    II = "II"


class SplineConfig(BaseSchema):
    degree: int = Field(default=4, ge=1)
    continuity: int = Field(default=1, ge=0)
    theta_cells: int = Field(default=4, ge=1)
    thetadot_cells: int = Field(default=4, ge=1)
    theta_range: tuple[float, float] = (-math.pi, math.pi)
    thetadot_range: tuple[float, float] = (-2 * math.pi, 2 * math.pi)
    triangulation_file: Path | None = None

    @model_validator(mode="after")
    def check_orders(self):
        if self.continuity >= self.degree:
            raise ValueError("continuity must be smaller than degree")
        for name in ("theta_range", "thetadot_range"):
            low, high = getattr(self, name)
            if not low < high:
                raise ValueError(f"{name} must be increasing")
        return self


class EstimatorConfig(BaseSchema):
    variant: EstimatorVariant = EstimatorVariant.RLSTD
    gamma: float = Field(default=0.98, ge=0.0, lt=1.0)
    beta1: float = Field(default=10.0, gt=0.0)
    beta2: float = Field(default=0.4, ge=0.0)
    symmetrize: bool = True
    forget_projected: bool = True
    divergence_limit: float = Field(default=1e9, gt=0.0)

    @model_validator(mode="after")
    def check_variant(self):
        if self.variant == EstimatorVariant.RLS.value:
            raise ValueError("the learning loop needs a temporal-difference variant")
        return self

    @property
    def effective_beta2(self) -> float:
        return self.beta2 if self.variant == EstimatorVariant.RLSTD_FORGET.value else 0.0


class RunConfig(BaseSchema):
    trials: int = Field(default=100, ge=1)
    trial_length: float = Field(default=20.0, gt=0.0)
    pretrain_trials: int = Field(default=1000, ge=0)
    mass_after: float = Field(default=1.5, gt=0.0)
    master_seed: int = Field(default=0, ge=0)
    write_trajectories: bool = False
    dump_matrices: bool = False


class ExperimentConfig(BaseSchema):
    spline: SplineConfig = Field(default_factory=SplineConfig)
    pendulum: PendulumParams = Field(default_factory=PendulumParams)
    policy: PolicyParams = Field(default_factory=PolicyParams)
    reward: RewardParams = Field(default_factory=RewardParams)
    estimator: EstimatorConfig = Field(default_factory=EstimatorConfig)
    experiment: RunConfig = Field(default_factory=RunConfig)

    @model_validator(mode="after")
    def check_consistency(self):
        steps = self.experiment.trial_length / self.pendulum.dt
        if abs(steps - round(steps)) > 1e-9 * max(steps, 1.0):
            raise ValueError("trial_length must be an integer multiple of dt")
        # one torque bound for plant and policy
        if self.policy.u_max != self.pendulum.u_max:
            self.policy.u_max = self.pendulum.u_max
        return self

    @property
    def steps_per_trial(self) -> int:
        return round(self.experiment.trial_length / self.pendulum.dt)

    def config_hash(self) -> str:
        return hash_payload(self.model_dump(mode="json"))


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Read a TOML experiment file; missing keys fall back to the swing-up defaults.

    `overrides` maps section names to dicts merged over the file contents.
    """
    payload: dict = {}
    if path is not None:
        try:
            with Path(path).open("rb") as handle:
                payload = tomllib.load(handle)
        except (OSError, tomllib.TOMLDecodeError) as e:
            logger.error(f"Unable to read config {path}: {e}")
            raise ConfigError(f"unable to read config {path}: {e}") from e

    for section, values in overrides.items():
        if values:
            payload.setdefault(section, {}).update(values)

    try:
        config = ExperimentConfig.model_validate(payload)
    except ValidationError as e:
        logger.error(f"Invalid config {path}: {e}")
        raise ConfigError(f"invalid config {path}: {e}") from e

    if config.spline.triangulation_file is not None and path is not None:
        tri = config.spline.triangulation_file
        if not tri.is_absolute():
            config.spline.triangulation_file = Path(path).parent / tri
    return config
