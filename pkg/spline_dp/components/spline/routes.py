from pathlib import Path
from typing import Optional

import numpy as np
import typer

from spline_dp.components.continuity.service import ContinuityService
from spline_dp.components.estimator.service import EstimatorService
from spline_dp.components.harness.service import HarnessService
from spline_dp.components.spline.response import SpaceReport
from spline_dp.components.spline.schema import SplineFunction
from spline_dp.components.spline.service import SplineService
from spline_dp.components.utils.response import RunManifest
from spline_dp.config.experiment import load_config
from spline_dp.utils.utility import ensure_directory, exit_on_error, save_manifest

spline_router = typer.Typer()


@spline_router.command("space")
def space(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="experiment TOML"),
    bnet: Optional[Path] = typer.Option(None, help="write the B-net CSV to this file"),
    checkpoint: Optional[Path] = typer.Option(None, help="B-net of a learned value instead of c = 0"),
    dump_matrices: Optional[Path] = typer.Option(None, help="write H.csv and Z.csv to this directory"),
):
    """Build the spline space of a config and report its dimensions."""
    with exit_on_error():
        cfg = load_config(config)
        s = HarnessService.build_space(cfg.spline)
        smoothness, projector = ContinuityService.build_projector(s)
        report = SpaceReport(
            n_simplices=s.n_simplices,
            dhat=s.dhat,
            ahat=s.ahat,
            rank_H=projector.rank_H,
            free_parameters=projector.free_parameters,
        )
        typer.echo(report.line())

        written: list[Path] = []
        if bnet is not None:
            c = np.zeros(s.ahat)
            if checkpoint is not None:
                state, _ = EstimatorService.load_checkpoint(
                    checkpoint, projector, HarnessService.space_hash(s)
                )
                c = state.c
            ensure_directory(bnet.parent)
            written.append(SplineService.export_bnet_csv(SplineFunction(space=s, c=c), bnet))
        if dump_matrices is not None:
            written += ContinuityService.dump_matrices(smoothness, projector, dump_matrices)

        for directory in {p.parent for p in written}:
            manifest = RunManifest.start(config, cfg.config_hash(), directory, "space")
            save_manifest(
                manifest.finish(p.name for p in written if p.parent == directory), directory
            )
