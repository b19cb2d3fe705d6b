"""
Tests for config parsing, hypothesis validation at load time and the muslab command line.
"""

import json
import logging
from pathlib import Path

import pandas as pd
import pytest

from cli.loader import build_config, load_document, parse_document
from cli.main import EXIT_ABORTED, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK, execute
from cli.manifest import MANIFEST_FILE, TOOL_VERSION
from core.errors import ConfigParseError, InvalidInputError, SchemaViolationError
from tests.scenarios import canonical_document, document

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

QUICK_CHECK = {"diagnostics": {"admissibility_samples": 500, "admissibility_pairs": 500}}
DATA_FILES = ["diagnostics.csv", "energy_report.csv", "thermal_report.csv", "bounds_report.csv", "summary.txt"]


@pytest.fixture
def write_config(tmp_path):
    """Write a config document to a JSON file and return its path."""

    def _write(doc, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc, indent=2), encoding="utf-8")
        return path

    return _write


def _read_table(path):
    return pd.read_csv(path, comment="#", dtype=str, keep_default_na=False)


def _manifest(path):
    frame = _read_table(path / MANIFEST_FILE)
    return dict(zip(frame["key"], frame["value"]))


class TestParseDocument:
    """JSON text to a validated RunDocument."""

    def test_empty_document_defaults(self):
        """Test that {} resolves to d = 2, N = 32 and a p = 2.2 power law."""
        config = build_config(parse_document("{}"))
        assert config.grid.dim == 2
        assert config.grid.points == 32
        assert config.stress.lower_power == pytest.approx(2.2)
        assert config.T == 1.0
        assert config.dt == 0.01
        assert config.verdict.passed

    def test_parse_error_location(self):
        """Test that broken JSON reports its line and column."""
        with pytest.raises(ConfigParseError) as info:
            parse_document('{\n  "time": {"dt": }\n}')
        assert info.value.line == 2
        assert info.value.column > 1

    def test_nonpositive_dt(self):
        """Test that dt <= 0 names the time.dt field."""
        with pytest.raises(SchemaViolationError) as info:
            parse_document('{"time": {"dt": 0}}')
        assert info.value.field == "time.dt"

    def test_unknown_key_rejected(self):
        """Test that unknown keys are schema violations."""
        with pytest.raises(SchemaViolationError) as info:
            parse_document('{"time": {"dt": 0.01, "bogus": 1}}')
        assert "bogus" in info.value.field

    def test_final_time_shorter_than_step(self):
        """Test that T < dt is rejected."""
        with pytest.raises(SchemaViolationError):
            parse_document('{"time": {"T": 0.001, "dt": 0.01}}')

    def test_odd_points_rejected(self):
        """Test that an odd grid size names domain.points."""
        with pytest.raises(SchemaViolationError) as info:
            parse_document('{"domain": {"points": 17}}')
        assert info.value.field == "domain.points"

    def test_top_level_must_be_object(self):
        """Test that a JSON array is not a config."""
        with pytest.raises(SchemaViolationError):
            parse_document("[1, 2]")

    def test_overrides_applied(self):
        """Test that dotted overrides replace fields and None leaves them alone."""
        doc = parse_document('{"seed": 4}', {"time.cadence": 5, "seed": None})
        assert doc.time.cadence == 5
        assert doc.seed == 4

    def test_shipped_smoke_config_is_canonical(self):
        """Test configs/smoke.json is the Carreau smoke scenario the stability tests run."""
        shipped = load_document(CONFIG_DIR / "smoke.json")
        expected = parse_document(json.dumps(canonical_document()))
        assert shipped.model_dump(exclude={"output"}) == expected.model_dump(exclude={"output"})
        assert shipped.stress.kind == "carreau"
        assert (shipped.domain.points, shipped.basis.velocity_modes, shipped.time.T) == (32, 16, 1.0)

    def test_missing_file(self, tmp_path):
        """Test that an unreadable config path is invalid input."""
        with pytest.raises(InvalidInputError):
            load_document(tmp_path / "absent.json")


class TestBuildConfig:
    """Initial data and hypothesis verdicts."""

    def test_u0_component_count(self):
        """Test that u0 needs one expression per dimension."""
        with pytest.raises(SchemaViolationError) as info:
            build_config(parse_document(json.dumps(document(initial_data={"u0": ["0"]}))))
        assert info.value.field == "initial_data.u0"

    def test_u0_must_be_divergence_free(self):
        """Test that a compressible initial velocity is rejected."""
        with pytest.raises(SchemaViolationError) as info:
            build_config(parse_document(json.dumps(document(initial_data={"u0": ["sin(x1)", "0"]}))))
        assert info.value.field == "initial_data.u0"

    def test_bad_expression(self):
        """Test that an unknown symbol in rho0 names the field."""
        with pytest.raises(SchemaViolationError) as info:
            build_config(parse_document(json.dumps(document(initial_data={"rho0": "y + 1"}))))
        assert info.value.field == "initial_data.rho0"

    def test_power_below_threshold_in_3d(self, caplog):
        """Test that p = 2 in 3-D fails the power hypothesis and warns with 11/5."""
        doc = {
            "domain": {"dim": 3, "points": 8},
            "basis": {"velocity_modes": 4, "temperature_modes": 4},
            "stress": {"p": 2.0},
        }
        with caplog.at_level(logging.WARNING, logger="cli.loader"):
            config = build_config(parse_document(json.dumps(doc)))
        power = config.verdict.get("power")
        assert not power.passed
        assert "11/5" in power.detail
        assert not config.verdict.passed
        assert "11/5" in caplog.text

    def test_beta_below_threshold(self):
        """Test that beta = -0.5 in 2-D fails only the beta hypothesis."""
        config = build_config(parse_document(json.dumps(document(heat={"beta": -0.5}))))
        assert [c.name for c in config.verdict.failures] == ["beta"]


class TestExecute:
    """Subcommands, exit codes and output files."""

    def test_check_passes(self, write_config, tmp_path):
        """Test that check on the smoke config succeeds and writes its reports."""
        out = tmp_path / "check"
        code = execute(["check", str(write_config(document(**QUICK_CHECK))), "--output", str(out), "--quiet"])
        assert code == EXIT_OK
        for name in ("admissibility_report.csv", "axiom_report.csv", "hypothesis_report.csv", "summary.txt", MANIFEST_FILE):
            assert (out / name).exists()
        assert "check.passed=true" in (out / "summary.txt").read_text(encoding="utf-8").splitlines()

    def test_check_fails_on_hypothesis(self, write_config, tmp_path):
        """Test that a failed hypothesis gives exit code 3."""
        out = tmp_path / "check"
        doc = document(heat={"beta": -0.5}, **QUICK_CHECK)
        code = execute(["check", str(write_config(doc)), "--output", str(out), "--quiet"])
        assert code == EXIT_CHECK_FAILED
        rows = _read_table(out / "hypothesis_report.csv").set_index("check")
        assert rows.loc["beta", "passed"] == "False"

    def test_unknown_subcommand(self):
        """Test that an unknown subcommand is a usage error."""
        assert execute(["frobnicate", "config.json"]) == EXIT_INVALID

    def test_no_arguments(self):
        """Test that a missing subcommand is a usage error."""
        assert execute([]) == EXIT_INVALID

    def test_refine_needs_ladder(self, write_config):
        """Test that refine without --ladder is a usage error."""
        assert execute(["refine", str(write_config(document()))]) == EXIT_INVALID

    def test_missing_config(self, tmp_path):
        """Test that a missing config file gives exit code 1 and no output."""
        out = tmp_path / "out"
        assert execute(["run", str(tmp_path / "absent.json"), "--output", str(out), "--quiet"]) == EXIT_INVALID
        assert not out.exists()

    def test_invalid_json(self, tmp_path):
        """Test that malformed JSON gives exit code 1."""
        path = tmp_path / "broken.json"
        path.write_text('{"time": ', encoding="utf-8")
        assert execute(["check", str(path), "--quiet"]) == EXIT_INVALID

    def test_run_writes_reports(self, write_config, tmp_path):
        """Test that run writes the manifest, data tables, summary and audit logs."""
        out = tmp_path / "run"
        code = execute(["run", str(write_config(document())), "--output", str(out), "--quiet"])
        assert code == EXIT_OK
        for name in DATA_FILES + [MANIFEST_FILE]:
            assert (out / name).exists()
        assert (out / "logs" / "runs.log").exists()
        summary = (out / "summary.txt").read_text(encoding="utf-8").splitlines()
        assert "run.status=completed" in summary

    def test_manifest_contents(self, write_config, tmp_path):
        """Test that the manifest records version, seed, overrides and the output directory."""
        out = tmp_path / "run"
        execute(["run", str(write_config(document())), "--output", str(out), "--seed", "9", "--cadence", "5", "--quiet"])
        manifest = _manifest(out)
        assert manifest["tool.version"] == TOOL_VERSION
        assert manifest["tool.command"] == "run"
        assert manifest["seed"] == "9"
        assert manifest["time.cadence"] == "5"
        assert manifest["output.resolved_directory"] == str(out)
        assert manifest["resolved.n_steps"] == "10"

    def test_cadence_override_thins_records(self, write_config, tmp_path):
        """Test that --cadence 5 keeps the records at t = 0, 0.05 and 0.1."""
        out = tmp_path / "run"
        execute(["run", str(write_config(document())), "--output", str(out), "--cadence", "5", "--quiet"])
        frame = pd.read_csv(out / "diagnostics.csv", comment="#")
        times = frame.loc[frame["row"] != "summary", "t"].tolist()
        assert times == pytest.approx([0.0, 0.05, 0.1])

    def test_runs_are_reproducible(self, write_config, tmp_path):
        """Test that two runs of one config produce byte-identical data files."""
        path = write_config(document())
        first, second = tmp_path / "first", tmp_path / "second"
        assert execute(["run", str(path), "--output", str(first), "--quiet"]) == EXIT_OK
        assert execute(["run", str(path), "--output", str(second), "--quiet"]) == EXIT_OK
        for name in DATA_FILES:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_rejected_run(self, write_config, tmp_path):
        """Test that a CFL rejection gives exit code 2 and an error log entry."""
        out = tmp_path / "run"
        doc = document(time={"T": 1.0, "dt": 0.5})
        assert execute(["run", str(write_config(doc)), "--output", str(out), "--quiet"]) == EXIT_ABORTED
        assert (out / MANIFEST_FILE).exists()
        assert not (out / "diagnostics.csv").exists()
        assert "StepRejectedError" in (out / "logs" / "errors.log").read_text(encoding="utf-8")

    def test_snapshots(self, write_config, tmp_path):
        """Test that output.snapshots writes initial and final grid fields."""
        out = tmp_path / "run"
        doc = document(output={"snapshots": True})
        assert execute(["run", str(write_config(doc)), "--output", str(out), "--quiet"]) == EXIT_OK
        initial = pd.read_csv(out / "snapshot_initial.csv", comment="#")
        assert len(initial) == 16 * 16
        assert (out / "snapshot_final.csv").exists()

    def test_conjugate_table(self, write_config, tmp_path):
        """Test that conjugate writes one row per sample."""
        out = tmp_path / "conj"
        doc = document(conjugate={"sample_count": 5, "radius_max": 2.0})
        assert execute(["conjugate", str(write_config(doc)), "--output", str(out), "--quiet"]) == EXIT_OK
        frame = pd.read_csv(out / "conjugate_table.csv", comment="#")
        assert len(frame) == 5
        assert (frame["M_star_value"] >= 0).all()

    def test_refine(self, write_config, tmp_path):
        """Test that refine writes one report row per ladder value."""
        out = tmp_path / "refine"
        doc = document(time={"T": 0.04, "dt": 0.02})
        code = execute(["refine", str(write_config(doc)), "--ladder", "dt=0.02,0.01", "--output", str(out), "--quiet"])
        assert code == EXIT_OK
        assert len(pd.read_csv(out / "refine_report.csv", comment="#")) == 2
