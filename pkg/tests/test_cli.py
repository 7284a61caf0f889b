import csv
import json
from pathlib import Path

from typer.testing import CliRunner

from spline_dp.components.harness.service import HarnessService
from spline_dp.main import app
from spline_dp.utils.exceptions import NumericalFailure

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
runner = CliRunner()


def write_config(directory: Path, text: str) -> Path:
    path = directory / "experiment.toml"
    path.write_text(text)
    return path


class TestSpace:
    def test_full_space(self):
        result = runner.invoke(app, ["space", "--config", str(CONFIGS / "swingup.toml")])
        assert result.exit_code == 0, result.output
        assert "J=32 dhat=15 ahat=480 rank_H=329 free=151" in result.output

    def test_defaults_are_the_full_space(self):
        result = runner.invoke(app, ["space"])
        assert "J=32 dhat=15 ahat=480 rank_H=329 free=151" in result.output

    def test_single_simplex_from_file(self, tmp_path):
        (tmp_path / "tri.json").write_text(
            json.dumps({"vertices": [[0, 0], [1, 0], [0, 1]], "simplices": [[0, 1, 2]]})
        )
        config = write_config(
            tmp_path, '[spline]\ndegree = 2\ncontinuity = 1\ntriangulation_file = "tri.json"\n'
        )
        result = runner.invoke(app, ["space", "-c", str(config)])
        assert result.exit_code == 0, result.output
        assert "rank_H=0 free=6" in result.output

    def test_bad_config(self, tmp_path):
        config = write_config(tmp_path, "[spline]\ndegree = 1\ncontinuity = 3\n")
        result = runner.invoke(app, ["space", "-c", str(config)])
        assert result.exit_code == 2
        assert "error" in result.output

    def test_missing_config(self, tmp_path):
        result = runner.invoke(app, ["space", "-c", str(tmp_path / "nope.toml")])
        assert result.exit_code == 2

    def test_bnet_and_matrices(self, tmp_path):
        result = runner.invoke(
            app,
            [
                "space",
                "-c",
                str(CONFIGS / "desk.toml"),
                "--bnet",
                str(tmp_path / "bnet.csv"),
                "--dump-matrices",
                str(tmp_path),
            ],
        )
        assert result.exit_code == 0, result.output
        with (tmp_path / "bnet.csv").open() as handle:
            assert len(list(csv.reader(handle))) == 1 + 8 * 6
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["files"] == ["H.csv", "Z.csv", "bnet.csv"]


class TestRun:
    def test_experiment_one(self, tmp_path):
        args = ["run", "-c", str(CONFIGS / "desk.toml"), "--trials", "3", "--seed", "7"]
        first = runner.invoke(app, args + ["--out", str(tmp_path / "first")])
        second = runner.invoke(app, args + ["--out", str(tmp_path / "second")])
        assert first.exit_code == 0, first.output
        trials = tmp_path / "first" / "expI-rlstd-seed7" / "trials.csv"
        assert len(trials.read_text().splitlines()) == 4
        assert trials.read_bytes() == (tmp_path / "second" / "expI-rlstd-seed7" / "trials.csv").read_bytes()
        assert (tmp_path / "first" / "manifest.json").exists()
        assert (tmp_path / "first" / "expI-rlstd-seed7" / "summary.json").exists()

    def test_variants_and_replicas(self, tmp_path):
        result = runner.invoke(
            app,
            [
                "run",
                "-c",
                str(CONFIGS / "desk.toml"),
                "--trials",
                "1",
                "--variant",
                "rlstd",
                "--variant",
                "rlstd_forget",
                "--replicas",
                "2",
                "--out",
                str(tmp_path),
            ],
        )
        assert result.exit_code == 0, result.output
        runs = sorted(p.name for p in tmp_path.iterdir() if p.is_dir())
        assert runs == [
            "expI-rlstd-seed0",
            "expI-rlstd-seed1",
            "expI-rlstd_forget-seed0",
            "expI-rlstd_forget-seed1",
        ]

    def test_plain_rls_is_rejected(self, tmp_path):
        result = runner.invoke(app, ["run", "--variant", "rls", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_numerical_failure_exit_code(self, tmp_path, monkeypatch):
        def fail(*args, **kwargs):
            raise NumericalFailure("singular", step=3)

        monkeypatch.setattr(HarnessService, "execute", staticmethod(fail))
        result = runner.invoke(app, ["run", "-c", str(CONFIGS / "desk.toml"), "--out", str(tmp_path)])
        assert result.exit_code == 3
        assert "step 3" in result.output

    def test_summarize_round_trip(self, tmp_path):
        runner.invoke(
            app, ["run", "-c", str(CONFIGS / "desk.toml"), "--trials", "3", "--out", str(tmp_path)]
        )
        run_dir = tmp_path / "expI-rlstd-seed0"
        summary = json.loads((run_dir / "summary.json").read_text())["summary"]
        result = runner.invoke(app, ["summarize", str(run_dir / "trials.csv")])
        assert result.exit_code == 0, result.output
        fields = dict(item.split("=") for item in result.output.split())
        assert float(fields["mean_t_up"]) == summary["mean_t_up"]
        assert float(fields["std_t_up"]) == summary["std_t_up"]
        assert int(fields["trials"]) == 3

    def test_summarize_rejects_other_csv(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n")
        assert runner.invoke(app, ["summarize", str(path)]).exit_code == 2


class TestExportValue:
    def test_zero_value(self, tmp_path):
        out = tmp_path / "value.csv"
        result = runner.invoke(
            app,
            ["export-value", "-c", str(CONFIGS / "desk.toml"), "--out", str(out), "--theta-points", "5", "--thetadot-points", "4"],
        )
        assert result.exit_code == 0, result.output
        with out.open() as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 20
        assert all(float(row["V"]) == 0.0 for row in rows)
        assert list(rows[0]) == ["theta", "thetadot", "V", "dV_dtheta", "dV_dthetadot"]

    def test_out_of_domain_rows_are_omitted(self, tmp_path):
        out = tmp_path / "value.csv"
        result = runner.invoke(
            app,
            [
                "export-value",
                "-c",
                str(CONFIGS / "desk.toml"),
                "--out",
                str(out),
                "--theta-points",
                "3",
                "--thetadot-points",
                "3",
                "--theta-range",
                "-3.0",
                "5.0",
            ],
        )
        assert result.exit_code == 0, result.output
        assert "omitted 3" in result.output
        assert len(out.read_text().splitlines()) == 1 + 6

    def test_learned_value(self, tmp_path):
        runner.invoke(
            app,
            [
                "run",
                "-c",
                str(CONFIGS / "desk.toml"),
                "--experiment",
                "II",
                "--trials",
                "1",
                "--pretrain-trials",
                "1",
                "--out",
                str(tmp_path),
            ],
        )
        checkpoint = tmp_path / "expII-rlstd-seed0" / "pretrained.npz"
        assert checkpoint.exists()
        out = tmp_path / "value.csv"
        result = runner.invoke(
            app,
            ["export-value", "-c", str(CONFIGS / "desk.toml"), "--checkpoint", str(checkpoint), "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        with out.open() as handle:
            values = [float(row["V"]) for row in csv.DictReader(handle)]
        assert any(v != 0.0 for v in values)
