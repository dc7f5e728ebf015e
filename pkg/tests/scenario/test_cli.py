"""Tests for the rdlab command line."""

import json
import subprocess
import sys

from click.testing import CliRunner

from rdlab.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, cli
from tests.scenario.test_helpers import ScenarioTestHelpers


class TestValidateCommand:
    """rdlab validate."""

    def test_valid_scenario(self, project_dir):
        """Test a bundled scenario validates."""
        result = CliRunner().invoke(cli, ["validate", str(project_dir / "scenarios" / "simulate-zero.json")])
        assert result.exit_code == EXIT_PASS
        assert "Validation passed!" in result.output

    def test_invalid_scenario(self, tmp_path):
        """Test validation errors exit with the usage code."""
        data = ScenarioTestHelpers.data("simulate", model={"m": 2.0, "p": 3.0})
        result = CliRunner().invoke(cli, ["validate", str(ScenarioTestHelpers.write(tmp_path, data))])
        assert result.exit_code == EXIT_USAGE
        assert "1 < p < m" in result.output

    def test_unparsable_scenario(self, tmp_path):
        """Test malformed JSON exits with the usage code."""
        path = tmp_path / "broken.json"
        path.write_text("{")
        result = CliRunner().invoke(cli, ["validate", str(path)])
        assert result.exit_code == EXIT_USAGE


class TestRunCommand:
    """rdlab run."""

    def test_passing_run_writes_artifacts(self, tmp_path):
        """Test a passing scenario exits 0 and writes every artifact."""
        config = ScenarioTestHelpers.write(tmp_path, ScenarioTestHelpers.data("simulate"))
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, ["run", str(config), "--out", str(out)])
        assert result.exit_code == EXIT_PASS, result.output
        for name in ("trajectory.csv", "profiles.csv", "report.json", "report.md"):
            assert (out / name).exists()
        assert json.loads((out / "report.json").read_text())["verdict"] == "pass"
        assert "PASS" in result.output

    def test_failing_run_exits_two(self, tmp_path):
        """Test a failing verdict exits 2."""
        data = ScenarioTestHelpers.data("poincare", checks={"expected": [20.0, 30.0], "profiles": 5})
        config = ScenarioTestHelpers.write(tmp_path, data)
        result = CliRunner().invoke(cli, ["run", str(config), "-o", str(tmp_path / "out")])
        assert result.exit_code == EXIT_FAIL
        assert "FAIL" in result.output

    def test_several_configs_use_subdirectories(self, tmp_path):
        """Test each scenario gets its own directory under --out."""
        first = ScenarioTestHelpers.write(tmp_path, ScenarioTestHelpers.data("simulate", name="one"))
        second = ScenarioTestHelpers.write(tmp_path, ScenarioTestHelpers.data("simulate", name="two"))
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, ["run", str(first), str(second), "--out", str(out)])
        assert result.exit_code == EXIT_PASS, result.output
        assert (out / "one" / "report.json").exists()
        assert (out / "two" / "report.json").exists()

    def test_invalid_config_is_usage_error(self, tmp_path):
        """Test validation errors win over verdicts."""
        good = ScenarioTestHelpers.write(tmp_path, ScenarioTestHelpers.data("simulate", name="good"))
        bad = ScenarioTestHelpers.write(
            tmp_path, ScenarioTestHelpers.data("simulate", name="bad", model={"m": 2.0, "p": 2.5}))
        result = CliRunner().invoke(cli, ["run", str(good), str(bad), "-o", str(tmp_path / "out")])
        assert result.exit_code == EXIT_USAGE

    def test_bad_tolerance_override(self, tmp_path):
        """Test a malformed RDLAB_TOL is a usage error."""
        config = ScenarioTestHelpers.write(tmp_path, ScenarioTestHelpers.data("simulate"))
        result = CliRunner().invoke(cli, ["run", str(config), "-o", str(tmp_path / "out")],
                                    env={"RDLAB_TOL": "speed=fast"})
        assert result.exit_code == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        """Test a missing config path is rejected by click."""
        result = CliRunner().invoke(cli, ["run", str(tmp_path / "absent.json")])
        assert result.exit_code != EXIT_PASS


class TestInfoAndEstimates:
    """rdlab info, poincare and sobolev."""

    def test_info_prints_constants(self, project_dir):
        """Test exponents, growth rates and the barrier envelope are listed."""
        result = CliRunner().invoke(cli, ["info", str(project_dir / "scenarios" / "barrier-check.json"),
                                          "--c-p", "1", "--c-s", "2"])
        assert result.exit_code == EXIT_PASS, result.output
        assert "C(2) = 2.25" in result.output
        assert "Barrier envelope at t=0" in result.output
        assert "gamma = " in result.output

    def test_poincare_command(self):
        """Test the eigenvalue of the unit ball is printed."""
        result = CliRunner().invoke(cli, ["poincare", "--radius", "1", "--cells", "200"])
        assert result.exit_code == EXIT_PASS
        assert "lambda1 = 9.8" in result.output

    def test_poincare_too_few_cells(self):
        """Test estimator errors are usage errors."""
        result = CliRunner().invoke(cli, ["poincare", "--cells", "10"])
        assert result.exit_code == EXIT_USAGE

    def test_sobolev_command(self):
        """Test the Sobolev upper estimate is printed."""
        result = CliRunner().invoke(cli, ["sobolev", "--radius", "10", "--cells", "400"])
        assert result.exit_code == EXIT_PASS
        assert "C_s <=" in result.output


def test_module_entry_point(project_dir):
    """Test python -m rdlab.cli runs the validate command."""
    result = subprocess.run(
        [sys.executable, "-m", "rdlab.cli", "validate", "scenarios/simulate-zero.json"],
        cwd=project_dir, capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "Validation passed!" in result.stdout
