from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from spline_dp.components.estimator.schema import EstimatorVariant
from spline_dp.components.harness.response import ExperimentResult
from spline_dp.components.harness.service import HarnessService, variant_label
from spline_dp.components.utils.response import RunManifest
from spline_dp.config.experiment import ExperimentKind, load_config
from spline_dp.config.logger_config import logger
from spline_dp.config.setting import get_settings
from spline_dp.utils.utility import exit_on_error, hash_payload, save_manifest

harness_router = typer.Typer()
console = Console()


def job_name(experiment: ExperimentKind, variant: str, seed: int) -> str:
    return f"exp{experiment.value}-{variant}-seed{seed}"


def print_results(results: list[tuple[str, ExperimentResult]]) -> None:
    table = Table("run", "trials", "mean t_up [s]", "std t_up [s]", "diverged", "max |Hc|")
    for name, result in results:
        s = result.summary
        table.add_row(
            name,
            str(s.trials),
            f"{s.mean_t_up:.2f}",
            f"{s.std_t_up:.2f}",
            str(s.diverged),
            f"{result.max_continuity_residual:.1e}",
        )
    console.print(table)


@harness_router.command("run")
def run(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="experiment TOML"),
    experiment: ExperimentKind = typer.Option(ExperimentKind.I, "--experiment", "-e"),
    variant: Optional[List[EstimatorVariant]] = typer.Option(
        None, help="repeat to compare variants; defaults to the config"
    ),
    seed: Optional[int] = typer.Option(None, help="master seed; overrides the config"),
    replicas: int = typer.Option(1, min=1, help="consecutive seeds per variant"),
    parallel: int = typer.Option(1, min=1, help="worker processes"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="defaults to SDP_OUTPUT_DIR"),
    checkpoint: Optional[Path] = typer.Option(None, help="pretrained estimator for experiment II"),
    sigma_w: Optional[float] = typer.Option(None, help="process noise; overrides the config"),
    trials: Optional[int] = typer.Option(None, min=1),
    pretrain_trials: Optional[int] = typer.Option(None, min=0),
    trajectories: bool = typer.Option(False, help="write one CSV per trial"),
):
    """Run experiment I or II and write per-trial CSV, summary JSON and manifest."""
    with exit_on_error():
        out_dir = out or Path(get_settings().OUTPUT_DIR)
        base = load_config(config)
        seed0 = base.experiment.master_seed if seed is None else seed
        variants = [variant_label(v) for v in variant] if variant else [variant_label(base.estimator.variant)]

        jobs = []
        for name in variants:
            for replica in range(replicas):
                experiment_overrides = {"master_seed": seed0 + replica}
                if trials is not None:
                    experiment_overrides["trials"] = trials
                if pretrain_trials is not None:
                    experiment_overrides["pretrain_trials"] = pretrain_trials
                if trajectories:
                    experiment_overrides["write_trajectories"] = True
                cfg = load_config(
                    config,
                    estimator={"variant": name},
                    experiment=experiment_overrides,
                    pendulum={"sigma_w": sigma_w} if sigma_w is not None else None,
                )
                jobs.append((job_name(experiment, name, seed0 + replica), cfg))

        logger.info(f"Running {len(jobs)} job(s) with {parallel} worker(s) into {out_dir}")
        if parallel > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=parallel) as pool:
                futures = [
                    pool.submit(HarnessService.execute, cfg, experiment, out_dir / name, config, checkpoint)
                    for name, cfg in jobs
                ]
                results = [(name, f.result()) for (name, _), f in zip(jobs, futures)]
        else:
            results = [
                (name, HarnessService.execute(cfg, experiment, out_dir / name, config, checkpoint))
                for name, cfg in jobs
            ]

        config_hash = hash_payload([cfg.config_hash() for _, cfg in jobs])
        manifest = RunManifest.start(config, config_hash, out_dir, f"run --experiment {experiment.value}")
        save_manifest(manifest.finish(name for name, _ in jobs), out_dir)
        print_results(results)


@harness_router.command("summarize")
def summarize(
    trials_csv: Path = typer.Argument(..., help="per-trial CSV written by `run`"),
):
    """Recompute the summary statistics of a per-trial CSV."""
    with exit_on_error():
        summary = HarnessService.summarize(HarnessService.read_trials_csv(trials_csv))
        typer.echo(
            f"trials={summary.trials} mean_t_up={summary.mean_t_up:.17g} "
            f"std_t_up={summary.std_t_up:.17g} diverged={summary.diverged}"
        )
