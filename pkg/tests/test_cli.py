import json
from unittest.mock import Mock, patch

import numpy as np
import pytest

from constants.output import ExitCode
from core.exceptions import BlowUpError
from main import main
from schemas.geometry import Field
from services.snapshot_service import SnapshotService

HEAT_SCENARIO = """
domain.kind = disk
grid.nr = 8
grid.ntheta = 16
scheme.kind = backward_euler
scheme.dt = 0.01
nonlinearity.id = heat
initial.preset = bump
initial.center = 0.0
initial.radius = 0.3
time.t_end = 0.2
time.snapshot_every = 0.05
output.heatmaps = false
"""


class TestRunCommand:

    @pytest.fixture(autouse=True)
    def setup_paths(self, tmp_path):
        self.config = tmp_path / "heat.cfg"
        self.config.write_text(HEAT_SCENARIO)
        self.out = tmp_path / "out"

    def test_run_writes_summary(self, capsys):
        code = main(["run", str(self.config), "--out", str(self.out)])

        assert code == ExitCode.SUCCESS
        summary = json.loads(capsys.readouterr().out)
        assert summary["steps"] == 20
        assert (self.out / "summary.json").exists()

    def test_invalid_config_exits_with_validation_error(self, capsys):
        self.config.write_text(HEAT_SCENARIO.replace("grid.ntheta = 16", "grid.ntheta = 17"))

        code = main(["run", str(self.config), "--out", str(self.out)])

        assert code == ExitCode.VALIDATION_ERROR
        assert "grid.ntheta" in capsys.readouterr().out

    def test_missing_config_exits_with_validation_error(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.cfg")]) == ExitCode.VALIDATION_ERROR

    def test_solver_abort_exit_code(self):
        scenario_service = Mock()
        scenario_service.run.side_effect = BlowUpError(t=0.01, sup_norm=2e6, guard=1e6)

        with patch("cli.run.get_scenario_service", return_value=scenario_service):
            code = main(["run", str(self.config), "--out", str(self.out)])

        assert code == ExitCode.SOLVER_ABORT

    def test_expect_fss_failure_exit_code(self):
        summary = Mock(all_fss=False)
        summary.model_dump_json.return_value = "{}"
        scenario_service = Mock()
        scenario_service.run.return_value = summary

        with patch("cli.run.get_scenario_service", return_value=scenario_service):
            code = main(["run", str(self.config), "--expect-fss"])

        assert code == ExitCode.CERTIFICATION_FAILURE
        scenario_service.run.assert_called_once()


class TestAnalyzeAndRenderCommands:

    @pytest.fixture(autouse=True)
    def setup_snapshots(self, tmp_path, cos_field):
        snapshots = SnapshotService()
        self.paths = [
            str(snapshots.write(cos_field.with_values((1 + 0.1 * n) * cos_field.values, t=0.1 * n), tmp_path / f"s{n}.txt"))
            for n in range(6)
        ]
        self.tmp_path = tmp_path

    def test_analyze_prints_summary(self, capsys):
        code = main(["analyze", *self.paths, "--tol", "1e-6", "--expect-fss"])

        assert code == ExitCode.SUCCESS
        summary = json.loads(capsys.readouterr().out)
        assert summary["axis_deg"] == pytest.approx(0.0)
        assert summary["certified"] is True

    def test_analyze_without_files_is_rejected(self):
        assert main(["analyze"]) == ExitCode.VALIDATION_ERROR

    def test_analyze_off_lattice_start_is_rejected(self):
        assert main(["analyze", *self.paths, "--e-start", "0.01"]) == ExitCode.VALIDATION_ERROR

    def test_render_writes_pgm_next_to_field(self):
        code = main(["render", self.paths[0], "--size", "24"])

        assert code == ExitCode.SUCCESS
        pgm = (self.tmp_path / "s0.pgm").read_text()
        assert pgm.startswith("P2\n")
        assert "24 24" in pgm

    def test_render_rejects_broken_snapshot(self):
        broken = self.tmp_path / "broken.txt"
        broken.write_text("not a snapshot\n")

        assert main(["render", str(broken)]) == ExitCode.VALIDATION_ERROR

    def test_render_all_zero_field(self, disk_grid):
        path = SnapshotService().write(Field(grid=disk_grid, values=np.zeros(disk_grid.shape)), self.tmp_path / "zero.txt")

        assert main(["render", str(path), "--out", str(self.tmp_path / "zero.pgm")]) == ExitCode.SUCCESS
