import csv
import time
from pathlib import Path

import numpy as np

from spline_dp.components.continuity.service import ContinuityService
from spline_dp.components.control.service import ControlService
from spline_dp.components.estimator.schema import EstimatorVariant
from spline_dp.components.estimator.service import EstimatorService
from spline_dp.components.geometry.service import GeometryService
from spline_dp.components.harness.response import (
    ExperimentResult,
    TrajectorySample,
    TrialRecord,
    TrialSummary,
)
from spline_dp.components.harness.schema import Agent, StreamKey, TrialPhase
from spline_dp.components.pendulum.schema import PendulumParams
from spline_dp.components.pendulum.service import PendulumService
from spline_dp.components.spline.schema import SplineFunction, SplineSpace
from spline_dp.components.spline.service import SplineService
from spline_dp.components.utils.response import RunManifest
from spline_dp.config.experiment import ExperimentConfig, ExperimentKind, SplineConfig
from spline_dp.config.logger_config import logger
from spline_dp.utils.exceptions import ConfigError, NumericalFailure, OutOfDomain, SplineDPError
from spline_dp.utils.utility import (
    ensure_directory,
    hash_payload,
    save_csv,
    save_json,
    save_manifest,
)

UPRIGHT_LIMIT = np.pi / 4
TRIAL_HEADER = ["trial", "theta0_rad", "t_up_s", "total_reward", "clamp_count", "diverged"]
TRAJECTORY_HEADER = ["t", "theta", "thetadot", "u", "reward"]


def stream(
    master_seed: int,
    phase: TrialPhase,
    key: StreamKey,
    trial_index: int,
    variant: EstimatorVariant | str | None = None,
):
    """Sub-stream for one trial; noise streams also carry the estimator variant."""
    entropy = [master_seed, int(phase), int(key), trial_index]
    if variant is not None:
        entropy.append(list(EstimatorVariant).index(EstimatorVariant(variant)))
    return np.random.default_rng(np.random.SeedSequence(entropy))


def variant_label(variant: EstimatorVariant | str) -> str:
    return EstimatorVariant(variant).value

class HarnessService:
    @staticmethod
    def build_space(spline: SplineConfig) -> SplineSpace:
        if spline.triangulation_file is not None:
            triangulation = GeometryService.load_triangulation(spline.triangulation_file)
        else:
            triangulation = GeometryService.build_grid_triangulation(
                np.linspace(*spline.theta_range, spline.theta_cells + 1),
                np.linspace(*spline.thetadot_range, spline.thetadot_cells + 1),
            )
        return SplineService.build_space(triangulation, spline.degree, spline.continuity)

    @staticmethod
    def space_hash(space: SplineSpace) -> str:
        t = space.triangulation
        return hash_payload(
            {
                "degree": space.degree,
                "continuity": space.continuity,
                "vertices": t.vertices,
                "simplices": [list(s.vertex_ids) for s in t.simplices],
            }
        )

    @staticmethod
    def build_agent(cfg: ExperimentConfig) -> Agent:
        """Steps 0a-0c: spline space, c = 0 and P = beta1 Z."""
        space = HarnessService.build_space(cfg.spline)
        smoothness, projector = ContinuityService.build_projector(space)
        estimator = cfg.estimator
        state = EstimatorService.init(
            projector,
            beta1=estimator.beta1,
            gamma=estimator.gamma,
            beta2=estimator.effective_beta2,
            symmetrize=estimator.symmetrize,
            forget_projected=estimator.forget_projected,
        )
        return Agent(
            space=space,
            smoothness=smoothness,
            state=state,
            variant=estimator.variant,
            space_hash=HarnessService.space_hash(space),
        )

    @staticmethod
    def reset_agent(agent: Agent, cfg: ExperimentConfig) -> Agent:
        estimator = cfg.estimator
        state = EstimatorService.init(
            agent.state.projector,
            beta1=estimator.beta1,
            gamma=estimator.gamma,
            beta2=estimator.effective_beta2,
            symmetrize=estimator.symmetrize,
            forget_projected=estimator.forget_projected,
        )
        return agent.model_copy(update={"state": state})

    @staticmethod
    def compute_t_up(thetas, dt: float) -> float:
        """dt times the longest run of consecutive samples with |theta| < pi/4."""
        longest = run = 0
        for theta in np.asarray(thetas, dtype=np.float64):
            run = run + 1 if abs(theta) < UPRIGHT_LIMIT else 0
            longest = max(longest, run)
        return longest * dt

    @staticmethod
    def moving_average(series, window: int = 5) -> list[float]:
        """Centered mean, truncated at the edges."""
        values = np.asarray(series, dtype=np.float64)
        half = window // 2
        return [
            float(values[max(0, k - half) : k + half + 1].mean()) for k in range(values.size)
        ]

    @staticmethod
    def summarize(records: list[TrialRecord]) -> TrialSummary:
        t_up = np.array([r.t_up for r in records])
        return TrialSummary(
            trials=len(records),
            mean_t_up=float(t_up.mean()) if t_up.size else 0.0,
            std_t_up=float(t_up.std(ddof=1)) if t_up.size > 1 else 0.0,
            diverged=sum(r.diverged for r in records),
            moving_average=HarnessService.moving_average(t_up),
        )

    @staticmethod
    def run_trial(
        agent: Agent,
        env: PendulumParams,
        cfg: ExperimentConfig,
        trial_index: int,
        phase: TrialPhase = TrialPhase.RECORDED,
        trajectory: list[TrajectorySample] | None = None,
    ) -> tuple[TrialRecord, Agent]:
        """One trial of the learning loop: act, step, reward, update.

        The trial holds steps_per_trial decisions at t = 0, dt, ...; t_up scores
        the post-step states that fall inside the trial window.
        """
        seed = cfg.experiment.master_seed
        theta0 = float(stream(seed, phase, StreamKey.THETA0, trial_index).uniform(-np.pi, np.pi))
        variant = agent.variant
        process = stream(seed, phase, StreamKey.PROCESS, trial_index, variant)
        exploration = stream(seed, phase, StreamKey.EXPLORATION, trial_index, variant)

        space, st = agent.space, agent.state
        n_steps = cfg.steps_per_trial
        dt = env.dt
        state = PendulumService.initial_state(theta0)
        thetas: list[float] = []
        total_reward, clamp_count, diverged = 0.0, 0, False

        try:
            row_t = SplineService.basis_row(space, state.as_array()).to_dense()
            for k in range(n_steps):
                x = state.as_array()
                value = SplineFunction.model_construct(space=space, c=st.c)
                noise = cfg.policy.sigma_n * exploration.standard_normal()
                u = ControlService.greedy_action(value, x, cfg.policy, env.input_gain, noise)
                state = PendulumService.step(state, u, process.standard_normal(), env)
                x_next = state.as_array()
                r = ControlService.reward(x_next, u, cfg.reward, env.u_max)
                row_next = SplineService.basis_row(space, x_next).to_dense()
                st = EstimatorService.update(st, agent.variant, row_t, row_next, r)
                row_t = row_next

                total_reward += r
                clamp_count += state.clamped
                if k < n_steps - 1:
                    thetas.append(state.theta)
                if trajectory is not None:
                    trajectory.append(
                        TrajectorySample(
                            t=(k + 1) * dt, theta=state.theta, thetadot=state.thetadot, u=u, reward=r
                        )
                    )
                if EstimatorService.is_diverged(st, cfg.estimator.divergence_limit):
                    raise NumericalFailure("coefficients diverged", step=st.step_count)
        except (NumericalFailure, OutOfDomain) as e:
            logger.warning(f"Trial {trial_index} aborted: {e}; re-initialising the estimator")
            diverged = True

        record = TrialRecord(
            trial_index=trial_index,
            theta0=theta0,
            t_up=HarnessService.compute_t_up(thetas, dt),
            total_reward=total_reward,
            clamp_count=clamp_count,
            diverged=diverged,
        )
        if diverged:
            return record, HarnessService.reset_agent(agent, cfg)
        if clamp_count > n_steps // 2:
            logger.warning(f"Trial {trial_index}: thetadot clamped in {clamp_count} steps")
        return record, agent.model_copy(update={"state": st})

    @staticmethod
    def run_trials(
        agent: Agent,
        env: PendulumParams,
        cfg: ExperimentConfig,
        count: int,
        phase: TrialPhase = TrialPhase.RECORDED,
        trajectories: dict[int, list[TrajectorySample]] | None = None,
    ) -> tuple[list[TrialRecord], Agent, float]:
        """Run `count` trials in sequence; returns records, agent and max |Hc| seen."""
        records: list[TrialRecord] = []
        residual = 0.0
        for trial_index in range(count):
            trajectory = [] if trajectories is not None else None
            record, agent = HarnessService.run_trial(agent, env, cfg, trial_index, phase, trajectory)
            records.append(record)
            if trajectories is not None:
                trajectories[trial_index] = trajectory
            residual = max(
                residual,
                ContinuityService.continuity_residual(agent.smoothness.H, agent.state.c),
            )
            if (trial_index + 1) % 10 == 0 or trial_index + 1 == count:
                logger.info(
                    f"{phase.name.lower()} trial {trial_index + 1}/{count}: "
                    f"t_up={record.t_up:.2f}s diverged={record.diverged}"
                )
        return records, agent, residual

    @staticmethod
    def run_experiment_I(
        cfg: ExperimentConfig,
        trajectories: dict[int, list[TrajectorySample]] | None = None,
    ) -> ExperimentResult:
        started = time.perf_counter()
        logger.info(
            f"Experiment I: variant={cfg.estimator.variant} sigma_w={cfg.pendulum.sigma_w} "
            f"seed={cfg.experiment.master_seed}"
        )
        agent = HarnessService.build_agent(cfg)
        records, agent, residual = HarnessService.run_trials(
            agent, cfg.pendulum, cfg, cfg.experiment.trials, trajectories=trajectories
        )
        summary = HarnessService.summarize(records)
        logger.info(f"Experiment I done: mean t_up={summary.mean_t_up:.2f}s std={summary.std_t_up:.2f}s")
        return ExperimentResult(
            experiment=ExperimentKind.I.value,
            variant=variant_label(cfg.estimator.variant),
            master_seed=cfg.experiment.master_seed,
            records=records,
            summary=summary,
            runtime_s=time.perf_counter() - started,
            max_continuity_residual=residual,
        )

    @staticmethod
    def run_experiment_II(
        cfg: ExperimentConfig,
        checkpoint: str | Path | None = None,
        checkpoint_out: str | Path | None = None,
        trajectories: dict[int, list[TrajectorySample]] | None = None,
    ) -> ExperimentResult:
        """Pretrain at the nominal mass (or resume a checkpoint), change the mass, record."""
        started = time.perf_counter()
        agent = HarnessService.build_agent(cfg)
        pre_summary = None
        residual = 0.0

        if checkpoint is not None:
            state, _ = EstimatorService.load_checkpoint(
                checkpoint, agent.state.projector, agent.space_hash
            )
            # hyperparameters follow the current config, not the checkpoint
            state = state.model_copy(
                update={
                    "gamma": cfg.estimator.gamma,
                    "beta2": cfg.estimator.effective_beta2,
                    "symmetrize": cfg.estimator.symmetrize,
                    "forget_projected": cfg.estimator.forget_projected,
                }
            )
            agent = agent.model_copy(update={"state": state})
        else:
            logger.info(
                f"Experiment II: pretraining {cfg.experiment.pretrain_trials} trials "
                f"at m={cfg.pendulum.m}"
            )
            pretrain, agent, residual = HarnessService.run_trials(
                agent, cfg.pendulum, cfg, cfg.experiment.pretrain_trials, TrialPhase.PRETRAIN
            )
            if pretrain:
                pre_summary = HarnessService.summarize(pretrain[-cfg.experiment.trials :])
            if checkpoint_out is not None:
                EstimatorService.save_checkpoint(agent.state, agent.space_hash, checkpoint_out)

        env = PendulumService.set_mass(cfg.pendulum, cfg.experiment.mass_after)
        logger.info(f"Experiment II: mass changed {cfg.pendulum.m} -> {env.m}")
        records, agent, recorded_residual = HarnessService.run_trials(
            agent, env, cfg, cfg.experiment.trials, trajectories=trajectories
        )
        summary = HarnessService.summarize(records)
        logger.info(f"Experiment II done: mean t_up={summary.mean_t_up:.2f}s std={summary.std_t_up:.2f}s")
        return ExperimentResult(
            experiment=ExperimentKind.II.value,
            variant=variant_label(cfg.estimator.variant),
            master_seed=cfg.experiment.master_seed,
            records=records,
            summary=summary,
            pre_change_summary=pre_summary,
            runtime_s=time.perf_counter() - started,
            max_continuity_residual=max(residual, recorded_residual),
        )

    @staticmethod
    def write_trials_csv(records: list[TrialRecord], path: str | Path) -> Path:
        rows = (
            [r.trial_index, r.theta0, r.t_up, r.total_reward, r.clamp_count, int(r.diverged)]
            for r in records
        )
        return save_csv(path, TRIAL_HEADER, rows)

    @staticmethod
    def read_trials_csv(path: str | Path) -> list[TrialRecord]:
        try:
            with Path(path).open(newline="") as handle:
                reader = csv.DictReader(handle)
                if reader.fieldnames != TRIAL_HEADER:
                    raise ConfigError(f"{path} is not a per-trial CSV")
                return [
                    TrialRecord(
                        trial_index=int(row["trial"]),
                        theta0=float(row["theta0_rad"]),
                        t_up=float(row["t_up_s"]),
                        total_reward=float(row["total_reward"]),
                        clamp_count=int(row["clamp_count"]),
                        diverged=bool(int(row["diverged"])),
                    )
                    for row in reader
                ]
        except SplineDPError:
            raise
        except (OSError, ValueError, KeyError) as e:
            logger.error(f"Unable to read trials from {path}: {e}")
            raise ConfigError(f"unable to read trials from {path}: {e}") from e

    @staticmethod
    def write_trajectory_csv(samples: list[TrajectorySample], path: str | Path) -> Path:
        rows = ([s.t, s.theta, s.thetadot, s.u, s.reward] for s in samples)
        return save_csv(path, TRAJECTORY_HEADER, rows)

    @staticmethod
    def write_summary_json(result: ExperimentResult, cfg: ExperimentConfig, path: str | Path) -> Path:
        payload = {
            "experiment": result.experiment,
            "variant": result.variant,
            "master_seed": result.master_seed,
            "summary": result.summary.model_dump(),
            "pre_change_summary": (
                result.pre_change_summary.model_dump() if result.pre_change_summary else None
            ),
            "max_continuity_residual": result.max_continuity_residual,
            "runtime_s": result.runtime_s,
            "config": cfg.model_dump(mode="json"),
        }
        return save_json(path, payload)

    @staticmethod
    def execute(
        cfg: ExperimentConfig,
        experiment: ExperimentKind | str,
        out_dir: str | Path,
        config_path: str | Path | None = None,
        checkpoint: str | Path | None = None,
    ) -> ExperimentResult:
        """Run one experiment for one variant and seed and write its output directory.

        Module-level state is not shared, so this is safe to fan out over processes.
        """
        out_dir = ensure_directory(out_dir)
        manifest = RunManifest.start(
            config_path, cfg.config_hash(), out_dir, f"run --experiment {ExperimentKind(experiment).value}"
        )
        trajectories = {} if cfg.experiment.write_trajectories else None
        checkpoint_out = None

        if ExperimentKind(experiment) is ExperimentKind.I:
            result = HarnessService.run_experiment_I(cfg, trajectories=trajectories)
        else:
            checkpoint_out = out_dir / "pretrained.npz" if checkpoint is None else None
            result = HarnessService.run_experiment_II(
                cfg, checkpoint=checkpoint, checkpoint_out=checkpoint_out, trajectories=trajectories
            )

        written = [
            HarnessService.write_trials_csv(result.records, out_dir / "trials.csv"),
            HarnessService.write_summary_json(result, cfg, out_dir / "summary.json"),
        ]
        if checkpoint_out is not None and checkpoint_out.exists():
            written.append(checkpoint_out)
        for trial_index, samples in (trajectories or {}).items():
            written.append(
                HarnessService.write_trajectory_csv(
                    samples, out_dir / "trajectories" / f"trial_{trial_index:04d}.csv"
                )
            )
        if cfg.experiment.dump_matrices:
            space = HarnessService.build_space(cfg.spline)
            smoothness, projector = ContinuityService.build_projector(space)
            written += ContinuityService.dump_matrices(smoothness, projector, out_dir)

        save_manifest(manifest.finish(p.relative_to(out_dir) for p in written), out_dir)
        return result
