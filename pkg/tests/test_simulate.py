"""Simulation loop plumbing: telemetry schema, CLI behavior, exit codes."""

import dataclasses
import json
import subprocess
import sys

import numpy as np
import pytest

import inspectsim
from inspectsim.cli import main as cli_main
from inspectsim.constraints import boolean_compose
from inspectsim.simulate import (
    EXIT_COMPLETE,
    EXIT_CONFIG_ERROR,
    EXIT_SAFETY_VIOLATION,
    telemetry_columns,
    write_telemetry,
)


@pytest.fixture(scope="module")
def short_run():
    cfg = inspectsim.load_builtin("intelsat30")
    cfg = dataclasses.replace(cfg, max_duration=30.0)
    return cfg, inspectsim.run(cfg)


class TestTelemetrySchema:
    def test_column_count_contract(self, short_run):
        cfg, res = short_run
        assert res.telemetry.shape[1] == len(res.columns)
        assert res.columns == telemetry_columns(len(cfg.obstacles))

    def test_one_record_per_step(self, short_run):
        cfg, res = short_run
        assert res.summary.steps == res.telemetry.shape[0]
        assert np.allclose(np.diff(res.column("t")), cfg.dt)

    def test_h_min_cross_column_consistency(self, short_run):
        _, res = short_run
        h_a = np.column_stack([res.column(f"h_a{i}") for i in range(1, 6)])
        h_min = res.column("h_min")
        for row, hm in zip(h_a, h_min):
            assert boolean_compose(row) == pytest.approx(hm, abs=1e-14)

    def test_rotation_column_orthonormal(self, short_run):
        _, res = short_run
        rot = res.telemetry[-1, 7:16].reshape(3, 3)
        assert np.linalg.norm(rot.T @ rot - np.eye(3)) < 1e-9

    def test_csv_round_trip_bit_exact(self, short_run, tmp_path):
        _, res = short_run
        path = tmp_path / "t.csv"
        write_telemetry(res, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# inspectsim-telemetry-schema: 1"
        assert lines[1].split(",") == list(res.columns)
        parsed = np.array([[float(x) for x in ln.split(",")] for ln in lines[2:]])
        assert parsed.shape == res.telemetry.shape
        assert np.array_equal(
            np.nan_to_num(parsed, nan=-9e9),
            np.nan_to_num(res.telemetry, nan=-9e9),
        )

    def test_empty_run_header_only(self, tmp_path):
        cfg = inspectsim.load_builtin("freespace")
        res = inspectsim.run(dataclasses.replace(cfg, max_duration=0.05))
        # duration shorter than one step still logs the initial record
        assert res.summary.steps == 1
        empty = dataclasses.replace(res, telemetry=res.telemetry[:0])
        path = tmp_path / "empty.csv"
        write_telemetry(empty, path)
        assert len(path.read_text().splitlines()) == 2


class TestSummary:
    def test_summary_keys(self, short_run):
        _, res = short_run
        d = res.summary.as_dict()
        for key in ("min_h_p", "min_h_min", "max_abs_v", "max_abs_omega",
                    "completion_time_s", "violations", "exit_status"):
            assert key in d

    def test_incomplete_short_run(self, short_run):
        _, res = short_run
        assert not res.summary.completed
        assert res.summary.exit_status == 1


class TestCli:
    def test_complete_run_exit_zero(self, tmp_path):
        out = tmp_path / "tele.csv"
        summary = tmp_path / "s.json"
        code = cli_main(["--config", "freespace", "--out", str(out),
                         "--summary-json", str(summary), "--quiet"])
        assert code == EXIT_COMPLETE
        data = json.loads(summary.read_text())
        assert data["completed"] is True
        assert data["scenario"] == "freespace"
        assert out.exists()

    def test_unknown_config_exit_four(self, tmp_path):
        code = cli_main(["--config", str(tmp_path / "missing.cfg"), "--quiet"])
        assert code == EXIT_CONFIG_ERROR

    def test_bad_duration_exit_four(self):
        assert cli_main(["--duration", "-5", "--quiet"]) == EXIT_CONFIG_ERROR

    def test_checkpoint_inside_obstacle_exit_four(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(
            "[orbit]\nsemimajor_axis_km = 42139.0\neccentricity = 0.002\n"
            "[[obstacles]]\ncenter_m = [5.0, 0.0, 0.0]\n"
            "semi_axes_m = [2.0, 2.0, 2.0]\n"
            "[[checkpoints]]\nposition_m = [5.0, 0.0, 0.0]\n"
            "pointing_O = [1.0, 0.0, 0.0]\n"
        )
        assert cli_main(["--config", str(cfg), "--quiet"]) == EXIT_CONFIG_ERROR

    def test_strict_violation_exit_two(self, tmp_path):
        # the initial state is (barely) safe, but the initial velocity
        # pierces the barrier within one step, faster than the bounded
        # safe-velocity command can arrest it
        cfg = tmp_path / "strict.cfg"
        cfg.write_text(
            "[orbit]\nsemimajor_axis_km = 42139.0\neccentricity = 0.002\n"
            "[initial]\nr_m = [3.001, 0.0, 0.0]\nv_m_s = [-3.0, 0.0, 0.0]\n"
            "[[obstacles]]\ncenter_m = [0.0, 0.0, 0.0]\n"
            "semi_axes_m = [3.0, 3.0, 3.0]\n"
            "[[checkpoints]]\nposition_m = [6.0, 0.0, 0.0]\n"
            "pointing_O = [1.0, 0.0, 0.0]\n"
            "[simulation]\nmax_duration_s = 5.0\n"
        )
        out = tmp_path / "v.csv"
        code = cli_main(["--config", str(cfg), "--strict", "--out", str(out),
                         "--quiet"])
        assert code == EXIT_SAFETY_VIOLATION

    def test_console_script_installed(self):
        proc = subprocess.run([sys.executable, "-m", "inspectsim.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "--strict" in proc.stdout
