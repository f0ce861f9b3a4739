"""Tests for the command-line entry point."""

import json

import pytest

from app import exit_code_for, main, parse_periods
from src.config.settings import APP_VERSION
from src.exceptions import (
    ConfigParseError,
    EmptySeriesError,
    OutputError,
    StabilityError,
    StateCorruptionError,
    ValidationError,
)
from src.types import ExitCode
from tests.conftest import short_config_data


def write_config(path, data) -> str:
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestExitCodes:
    @pytest.mark.parametrize(
        "exc, code",
        [
            (ValidationError("bad", field="step.dt"), ExitCode.VALIDATION),
            (ConfigParseError("bad json"), ExitCode.VALIDATION),
            (EmptySeriesError("empty"), ExitCode.VALIDATION),
            (StabilityError("blew up", t=1.0), ExitCode.STABILITY),
            (StateCorruptionError("nan", field="K_e", node=3), ExitCode.STABILITY),
            (OutputError("disk full", path="/tmp/x"), ExitCode.IO),
        ],
    )
    def test_mapping(self, exc, code):
        assert exit_code_for(exc) == code

    def test_codes(self):
        assert [int(c) for c in (ExitCode.SUCCESS, ExitCode.VALIDATION, ExitCode.STABILITY, ExitCode.IO)] == [0, 2, 3, 4]


class TestValidate:
    def test_preset(self, capsys):
        assert main(["validate", "--preset", "impulse"]) == 0
        out = capsys.readouterr().out.split()
        assert out[:2] == ["valid", "impulse"]
        assert len(out[2]) == 64

    def test_custom_config(self, tmp_path, capsys):
        path = write_config(tmp_path / "c.json", {})
        assert main(["validate", "--config", path]) == 0
        assert capsys.readouterr().out.startswith("valid custom ")

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        assert main(["validate", "--config", str(path)]) == 2

    def test_unstable_step(self, tmp_path):
        path = write_config(tmp_path / "c.json", {"step": {"dt": 0.01}})
        assert main(["validate", "--config", path]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["validate", "--config", str(tmp_path / "absent.json")]) == 4

    def test_period_with_config(self, tmp_path):
        path = write_config(tmp_path / "c.json", {})
        assert main(["simulate", "--config", path, "--period", "1"]) == 2

    def test_unknown_preset_choice(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["simulate", "--preset", "tsunami"])
        assert excinfo.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert APP_VERSION in capsys.readouterr().out


class TestSimulate:
    def test_writes_outputs(self, tmp_path):
        data = short_config_data(
            signals={"potassium": {"kind": "impulse_train", "impulse_magnitude": 100.0, "event_times": [0.1]}},
            spacetime={"enabled": True, "every": 0.1, "points": 4},
            outputs={"svg_path": "probe.svg", "spacetime_path": "raster.csv"},
        )
        path = write_config(tmp_path / "c.json", data)
        out_dir = tmp_path / "out"
        assert main(["simulate", "--config", path, "--out-dir", str(out_dir)]) == 0

        for name in ("timeseries.csv", "metrics.json", "events.csv", "raster.csv", "probe.svg"):
            assert (out_dir / name).exists(), name
        metrics = json.loads((out_dir / "metrics.json").read_text(encoding="utf-8"))
        assert set(metrics) == {"0", "1"}
        header = (out_dir / "timeseries.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "t_hr,probe_x_mm,field,value,out_of_domain"

    def test_reruns_are_byte_identical(self, tmp_path):
        path = write_config(tmp_path / "c.json", short_config_data())
        for name in ("a", "b"):
            assert main(["simulate", "--config", path, "--out-dir", str(tmp_path / name)]) == 0
        for name in ("timeseries.csv", "metrics.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_stability_fault(self, tmp_path):
        data = short_config_data(
            parameters={"D_G": 0.001, "D_K": 0.001},
            step={"dt": 0.5, "t_end": 5.0, "record_every": 0.5},
        )
        path = write_config(tmp_path / "c.json", data)
        assert main(["simulate", "--config", path, "--out-dir", str(tmp_path / "out")]) == 3
        assert not (tmp_path / "out" / "timeseries.csv").exists()

    def test_out_dir_is_a_file(self, tmp_path):
        path = write_config(tmp_path / "c.json", short_config_data())
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        assert main(["simulate", "--config", path, "--out-dir", str(blocker)]) == 4


class TestSweep:
    def test_non_periodic_preset(self, tmp_path):
        assert main(["sweep", "--preset", "impulse", "--out-dir", str(tmp_path)]) == 2

    def test_bad_periods(self, tmp_path):
        assert main(["sweep", "--periods", "1,x", "--out-dir", str(tmp_path)]) == 2

    def test_parse_periods(self):
        assert parse_periods("2, 0.5,2") == [0.5, 2.0]
        assert parse_periods("4") == [4.0]

    @pytest.mark.parametrize("raw", ["", " , ", "a,b", "1,-2", "0"])
    def test_parse_periods_rejects(self, raw):
        with pytest.raises(ValidationError) as excinfo:
            parse_periods(raw)
        assert excinfo.value.field == "periods"
