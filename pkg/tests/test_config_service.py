import math

import pytest

from constants.solver import InitialPreset, NonlinearityPreset, SchemeKind
from core.exceptions import ConfigError
from services.config_service import ConfigService

VALID_SCENARIO = """
# minimal eigen pump scenario
domain.kind = disk
domain.r_outer = 1.0
grid.nr = 16
grid.ntheta = 32
scheme.kind = imex_fourier
scheme.dt = 0.01
nonlinearity.id = cubic
nonlinearity.a = 12
nonlinearity.b = 1   # trailing comment
initial.preset = modes
initial.terms = 1:1:1.0, 0:1:0.2:0.5
time.t_end = 1.0
time.snapshot_every = 0.1
analysis.e_start = 0.0
"""


class TestConfigService:

    @pytest.fixture(autouse=True)
    def setup_service(self):
        self.service = ConfigService()

    def parse(self, text: str):
        sections, lines = self.service.parse_text(text)
        return self.service.validate(sections, lines)

    def test_valid_scenario(self):
        config = self.parse(VALID_SCENARIO)

        assert config.grid.ntheta == 32
        assert config.scheme.kind == SchemeKind.IMEX_FOURIER
        assert config.nonlinearity.id == NonlinearityPreset.CUBIC
        assert config.nonlinearity.params == {"a": 12.0, "b": 1.0}
        assert config.initial.preset == InitialPreset.MODES
        assert [(t.m, t.k, t.amplitude, t.angle) for t in config.initial.terms] == [(1, 1, 1.0, 0.0), (0, 1, 0.2, 0.5)]
        assert config.output.directory == "runs/scenario"

    def test_odd_ntheta_names_field_and_line(self):
        text = VALID_SCENARIO.replace("grid.ntheta = 32", "grid.ntheta = 33")

        with pytest.raises(ConfigError) as error:
            self.parse(text)

        assert error.value.field == "grid.ntheta"
        assert error.value.line == 6
        assert "even" in str(error.value)

    def test_negative_dt_rejected(self):
        with pytest.raises(ConfigError) as error:
            self.parse(VALID_SCENARIO.replace("scheme.dt = 0.01", "scheme.dt = -0.01"))

        assert error.value.field == "scheme.dt"

    def test_unknown_preset_rejected(self):
        with pytest.raises(ConfigError) as error:
            self.parse(VALID_SCENARIO.replace("nonlinearity.id = cubic", "nonlinearity.id = quintic"))

        assert error.value.field == "nonlinearity.id"

    def test_e_start_off_lattice(self):
        text = VALID_SCENARIO.replace("analysis.e_start = 0.0", f"analysis.e_start = {math.pi / 64 + 0.01}")

        with pytest.raises(ConfigError) as error:
            self.parse(text)

        assert error.value.field == "analysis.e_start"

    def test_e_start_on_half_angle_lattice_accepted(self):
        config = self.parse(VALID_SCENARIO.replace("analysis.e_start = 0.0", f"analysis.e_start = {math.pi / 32!r}"))

        assert config.analysis.e_start == pytest.approx(math.pi / 32)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as error:
            self.parse(VALID_SCENARIO + "time.dt = 0.1\n")

        assert error.value.field == "time.dt"

    @pytest.mark.parametrize("line,reason", [
        ("grid.nr 16", "expected"),
        ("nr = 16", "dotted"),
        ("grid.nr = ", "missing value"),
        ("grid.a.b = 1", "exactly one dot"),
    ])
    def test_syntax_errors_report_line(self, line, reason):
        with pytest.raises(ConfigError) as error:
            self.service.parse_text("# header\n" + line)

        assert error.value.line == 2
        assert reason in str(error.value)

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            self.service.parse_text("grid.nr = 4\ngrid.nr = 8\n")

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            self.service.load(tmp_path / "absent.cfg")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "scenario.cfg"
        path.write_text(VALID_SCENARIO)

        assert self.service.load(path).time.t_end == 1.0
