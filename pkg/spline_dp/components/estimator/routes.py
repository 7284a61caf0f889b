from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import typer

from spline_dp.components.continuity.service import ContinuityService
from spline_dp.components.estimator.service import EstimatorService
from spline_dp.components.harness.service import HarnessService
from spline_dp.components.spline.schema import SplineFunction
from spline_dp.components.spline.service import SplineService
from spline_dp.components.utils.response import RunManifest
from spline_dp.config.experiment import load_config
from spline_dp.config.logger_config import logger
from spline_dp.utils.exceptions import OutOfDomain
from spline_dp.utils.utility import exit_on_error, save_csv, save_manifest

VALUE_HEADER = ["theta", "thetadot", "V", "dV_dtheta", "dV_dthetadot"]

estimator_router = typer.Typer()


def value_rows(f: SplineFunction, thetas, thetadots) -> tuple[list[list[float]], int]:
    """Value and gradient on a theta x thetadot grid; points off the mesh are skipped."""
    rows, omitted = [], 0
    for theta in thetas:
        for thetadot in thetadots:
            x = np.array([theta, thetadot])
            try:
                value = SplineService.evaluate(f, x)
                gradient = SplineService.gradient(f, x)
            except OutOfDomain:
                omitted += 1
                continue
            rows.append([float(theta), float(thetadot), value, float(gradient[0]), float(gradient[1])])
    return rows, omitted


@estimator_router.command("export-value")
def export_value(
    out: Path = typer.Option(..., "--out", "-o", help="CSV file to write"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="experiment TOML"),
    checkpoint: Optional[Path] = typer.Option(None, help="learned coefficients; c = 0 if omitted"),
    theta_points: int = typer.Option(61, min=2),
    thetadot_points: int = typer.Option(61, min=2),
    theta_range: Optional[Tuple[float, float]] = typer.Option(None, help="defaults to the mesh"),
    thetadot_range: Optional[Tuple[float, float]] = typer.Option(None, help="defaults to the mesh"),
):
    """Sample V and its gradient on a regular grid for plotting."""
    with exit_on_error():
        cfg = load_config(config)
        space = HarnessService.build_space(cfg.spline)
        c = np.zeros(space.ahat)
        if checkpoint is not None:
            _, projector = ContinuityService.build_projector(space)
            state, _ = EstimatorService.load_checkpoint(
                checkpoint, projector, HarnessService.space_hash(space)
            )
            c = state.c

        low, high = space.triangulation.bounds
        thetas = np.linspace(*(theta_range or (low[0], high[0])), theta_points)
        thetadots = np.linspace(*(thetadot_range or (low[1], high[1])), thetadot_points)
        rows, omitted = value_rows(SplineFunction(space=space, c=c), thetas, thetadots)
        if omitted:
            logger.warning(f"{omitted} grid points lie outside the triangulation and were omitted")
            typer.echo(f"omitted {omitted} out-of-domain points", err=True)

        save_csv(out, VALUE_HEADER, rows)
        manifest = RunManifest.start(config, cfg.config_hash(), out.parent, "export-value")
        save_manifest(manifest.finish([out.name]), out.parent)
        typer.echo(f"wrote {len(rows)} rows to {out}")
