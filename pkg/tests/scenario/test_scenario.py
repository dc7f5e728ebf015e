"""Tests for the scenario runner, its report and the written artifacts."""

import json
import math

import numpy as np
import pandas as pd
import pytest

from rdlab.generators.artifacts import ArtifactWriter, profiles_frame, trajectory_frame
from rdlab.generators.report import ReportGenerator, format_number
from rdlab.model.exceptions import ConfigError
from rdlab.runtime.scenario import (
    TRAJECTORY_COLUMNS, CheckResult, RunReport, ScenarioRunner, TrajectoryRow, run_scenario,
)
from tests.scenario.test_helpers import ScenarioTestHelpers


class TestCheckResult:
    """Verdict entries."""

    def test_upper_and_lower_limits(self):
        """Test value <= limit for upper checks and >= for lower ones."""
        assert CheckResult("a", 1.0, 2.0).passed
        assert not CheckResult("a", 3.0, 2.0).passed
        assert CheckResult("b", 3.0, 2.0, upper=False).passed
        assert CheckResult("b", 3.0, 2.0, upper=False).margin == 1.0

    def test_non_finite_value_fails(self):
        """Test nan and inf never pass."""
        assert not CheckResult("a", math.nan, 1.0).passed
        assert not CheckResult("a", -math.inf, 1.0).passed

    def test_optional_checks_do_not_decide_verdict(self):
        """Test only required checks count towards the exit code."""
        report = RunReport("r", "simulate", checks=[
            CheckResult("must", 0.0, 1.0), CheckResult("nice", 5.0, 1.0, required=False)])
        assert report.verdict and report.exit_code == 0
        report.checks.append(CheckResult("broken", 5.0, 1.0))
        assert not report.verdict and report.exit_code == 2

    def test_lookup(self):
        """Test checks are found by name."""
        report = RunReport("r", "simulate", checks=[CheckResult("x", 0.0, 1.0)])
        assert report.check("x").limit == 1.0
        with pytest.raises(KeyError):
            report.check("y")

    def test_report_dict_is_json_safe(self):
        """Test numpy scalars and non-finite numbers are cleaned."""
        report = RunReport("r", "simulate", constants={"a": np.float64(2.0), "b": math.inf,
                                                       "n": np.int64(3), "ok": np.bool_(True)})
        data = report.as_dict()
        assert data["constants"] == {"a": 2.0, "b": None, "n": 3, "ok": True}
        json.dumps(data)


class TestRunner:
    """Dispatch and shared pieces."""

    def test_unknown_kind(self):
        """Test a kind without a handler is a configuration error."""
        config = ScenarioTestHelpers.config("simulate")
        config.kind = "bogus"
        with pytest.raises(ConfigError):
            ScenarioRunner(config, ScenarioTestHelpers.tolerances()).run()

    def test_balanced_beta_filled_in(self):
        """Test a missing beta is computed from alpha."""
        runner = ScenarioRunner(ScenarioTestHelpers.config("barrier-check"),
                                ScenarioTestHelpers.tolerances())
        assert runner.barrier_params().beta == pytest.approx(0.75)

    def test_missing_barrier_section(self):
        """Test barrier parameters need a barrier section."""
        runner = ScenarioRunner(ScenarioTestHelpers.config("simulate"),
                                ScenarioTestHelpers.tolerances())
        with pytest.raises(ConfigError):
            runner.barrier_params()

    def test_datum_cap(self):
        """Test the datum is capped from above."""
        config = ScenarioTestHelpers.config(
            "simulate", datum={"kind": "bump", "width": 1.0, "height": 3.0, "cap": 0.5})
        u = ScenarioRunner(config, ScenarioTestHelpers.tolerances()).datum()(np.linspace(0, 2, 9))
        assert np.max(u) == 0.5

    def test_given_constants_are_used(self):
        """Test C_p and C_s from the config skip the estimators."""
        runner = ScenarioRunner(ScenarioTestHelpers.config("verify-lq"),
                                ScenarioTestHelpers.tolerances())
        constants = runner.bound_constants(runner.params)
        assert (constants.c_p, constants.c_s) == (1.0, 2.0)

    def test_tolerances_recorded(self, simulate_report):
        """Test the tolerances in force are part of the diagnostics."""
        assert simulate_report.diagnostics["tolerances"]["bound_slack"] == 0.01


class TestScenarioKinds:
    """Small runs of each fast scenario kind."""

    def test_simulate_zero(self, simulate_report):
        """Test the zero datum stays zero and passes."""
        assert simulate_report.verdict
        assert [row.t for row in simulate_report.rows] == [0.0, 0.5, 1.0]
        assert all(row.linf == 0.0 for row in simulate_report.rows)
        assert set(simulate_report.profiles) == {0.0, 0.5, 1.0}

    def test_verify_lq(self):
        """Test the L^2 norm stays under its exponential bound."""
        report = run_scenario(ScenarioTestHelpers.config("verify-lq"),
                              ScenarioTestHelpers.tolerances())
        check = report.check("lq_growth_q2")
        assert check.required and check.passed
        assert not report.check("smoothing_ratio").required
        assert report.constants["C(m)"] == pytest.approx(2.25)
        assert all(row.lq_bound is not None for row in report.rows[1:])
        assert report.verdict

    def test_verify_lq_at_twice_m(self):
        """Test the exponential bound also holds for q = 2m."""
        config = ScenarioTestHelpers.config("verify-lq", checks={"q_values": [2.0, 4.0]})
        report = run_scenario(config, ScenarioTestHelpers.tolerances())
        for name in ("lq_growth_q2", "lq_growth_q4"):
            assert report.check(name).required and report.check(name).passed
        assert report.diagnostics["C(q)"]["4.0"] > report.diagnostics["C(q)"]["2.0"]
        assert report.verdict

    def test_barrier_check(self):
        """Test the reference barrier is feasible with no residual counterexample."""
        report = run_scenario(ScenarioTestHelpers.config("barrier-check"),
                              ScenarioTestHelpers.tolerances())
        assert report.feasibility["pass"]
        assert report.diagnostics["residual_sweep"]["counterexamples"] == 0
        assert report.constants["K"] == pytest.approx(4.0 / 27.0)
        assert report.verdict

    def test_infeasible_barrier_fails(self):
        """Test a short start time gives a failing verdict."""
        config = ScenarioTestHelpers.config("barrier-check", barrier={"T": 16.0})
        report = run_scenario(config, ScenarioTestHelpers.tolerances())
        assert not report.check("feasibility").passed
        assert report.exit_code == 2

    def test_poincare(self):
        """Test lambda1 of the unit ball and no Rayleigh violations."""
        report = run_scenario(ScenarioTestHelpers.config("poincare"),
                              ScenarioTestHelpers.tolerances())
        assert report.constants["lambda1"] == pytest.approx(math.pi ** 2, rel=0.01)
        assert report.check("rayleigh_violations").value == 0.0
        assert report.verdict

    def test_poincare_outside_expected_range(self):
        """Test a wrong expected range fails."""
        config = ScenarioTestHelpers.config("poincare", checks={"expected": [20.0, 30.0]})
        report = run_scenario(config, ScenarioTestHelpers.tolerances())
        assert not report.check("lambda1_low").passed
        assert report.exit_code == 2

    def test_sobolev(self):
        """Test the bubble estimate lands in its expected range."""
        report = run_scenario(ScenarioTestHelpers.config("sobolev"),
                              ScenarioTestHelpers.tolerances())
        assert report.verdict
        assert report.constants["C_s_upper"] > 2.0

    def test_ladder(self):
        """Test all three ladders are monotone."""
        report = run_scenario(ScenarioTestHelpers.config("ladder-check"),
                              ScenarioTestHelpers.tolerances())
        ladder = report.diagnostics["ladder"]
        assert set(ladder["by_axis"]) == {"k", "R", "h"}
        assert len(ladder["comparisons"]) == 3
        assert report.verdict


class TestBarrierRuns:
    """Solutions started on a barrier stay above it."""

    @pytest.fixture(scope="class")
    def blowup_report(self):
        return run_scenario(ScenarioTestHelpers.config("blowup-run"),
                            ScenarioTestHelpers.tolerances())

    @pytest.fixture(scope="class")
    def manifold_report(self):
        return run_scenario(ScenarioTestHelpers.config("manifold-blowup"),
                            ScenarioTestHelpers.tolerances())

    def test_blowup_run_passes(self, blowup_report):
        """Test every blow-up check is required and passes."""
        for name in ("feasibility", "barrier_support_radius", "barrier_min_ratio",
                     "linf_growth", "linf_increasing_by_decade"):
            check = blowup_report.check(name)
            assert check.required and check.passed, name
        assert blowup_report.verdict

    def test_blowup_solution_dominates_barrier(self, blowup_report):
        """Test u >= barrier at every checkpoint inside the comparison radius."""
        ratios = [row.barrier_min_ratio for row in blowup_report.rows]
        assert all(ratio is not None and ratio >= 0.98 for ratio in ratios)
        assert blowup_report.rows[0].barrier_min_ratio == pytest.approx(1.0)

    def test_blowup_support_inside_ball(self, blowup_report):
        """Test the barrier support at t_end is far inside R = 20."""
        assert blowup_report.constants["support_radius_t_end"] == pytest.approx(math.exp(2.5),
                                                                               rel=1e-6)

    def test_barrier_leaving_the_ball_fails_before_solving(self):
        """Test a barrier whose support reaches r = R fails without a trajectory."""
        config = ScenarioTestHelpers.config("blowup-run",
                                            barrier={"C": 10.0, "a": 1.0, "alpha": 0.5, "T": 256.0})
        report = run_scenario(config, ScenarioTestHelpers.tolerances())
        assert not report.check("barrier_support_radius").passed
        assert report.rows == []
        assert report.exit_code == 2

    def test_manifold_blowup_passes(self, manifold_report):
        """Test the solution dominates the manifold barrier in value, front and centre."""
        for name in ("barrier_residual", "barrier_support_radius", "barrier_min_ratio",
                     "front_ratio", "center_ratio"):
            check = manifold_report.check(name)
            assert check.required and check.passed, name
        assert manifold_report.verdict

    def test_manifold_fronts_measured_on_solution(self, manifold_report):
        """Test fitted exponents come from the solution and the front never recedes."""
        exponents = manifold_report.diagnostics["solution_exponents"]
        assert exponents["front"] >= -1e-9
        assert exponents["barrier_front"] == pytest.approx(0.75)

    def test_manifold_residual_positive_fails_up_front(self):
        """Test a barrier with a positive residual stops the run before the solve."""
        config = ScenarioTestHelpers.config(
            "manifold-blowup",
            barrier={"C": 10.0, "a": 1.0, "alpha": 0.5, "T": 1.0, "target": "manifold"})
        report = run_scenario(config, ScenarioTestHelpers.tolerances())
        assert report.check("barrier_residual").value > 0
        assert not report.check("barrier_residual").passed
        assert report.rows == []
        assert report.exit_code == 2

    def test_barrier_datum_is_lifted(self):
        """Test the barrier datum is scaled by the datum height."""
        config = ScenarioTestHelpers.config("manifold-blowup")
        runner = ScenarioRunner(config, ScenarioTestHelpers.tolerances())
        r = np.array([0.0, 2.0, 5.0])
        assert np.allclose(runner.datum()(r), 1.05 * runner.barrier_at(0.0)(r))


class TestShippedScenarios:
    """The shipped configs for the remaining solver-backed kinds pass."""

    def test_verify_smoothing(self, project_dir):
        """Test the smoothing bound and the early slope hold and are required."""
        report = run_scenario(ScenarioTestHelpers.shipped(project_dir, "verify-smoothing"),
                              ScenarioTestHelpers.tolerances())
        assert report.check("smoothing_ratio").required
        assert report.check("early_linf_slope").required
        assert report.verdict

    def test_integrable_weight_run(self, project_dir):
        """Test the L^inf norm plateaus for the integrable weight."""
        report = run_scenario(ScenarioTestHelpers.shipped(project_dir, "integrable-weight-run"),
                              ScenarioTestHelpers.tolerances())
        assert report.check("plateau_ratio").passed
        assert report.constants["rho_total"] > 0
        assert report.verdict

    def test_aronson_benilan(self, project_dir):
        """Test the residual is small, nonzero and at least halves under refinement."""
        report = run_scenario(ScenarioTestHelpers.shipped(project_dir, "aronson-benilan"),
                              ScenarioTestHelpers.tolerances())
        residuals = report.diagnostics["aronson_benilan"]
        assert residuals["coarse"]["mean"] > 0
        assert residuals["coarse"]["mean"] >= 2.0 * residuals["fine"]["mean"]
        assert residuals["fine"]["mean"] <= 1e-3
        for name in ("ab_mean_residual", "ab_coarse_residual", "ab_refinement"):
            assert report.check(name).required
        assert report.verdict


class TestArtifacts:
    """CSV, JSON and markdown output."""

    def test_trajectory_columns(self, simulate_report, tmp_path):
        """Test the CSV header and one row per checkpoint."""
        path = ArtifactWriter(simulate_report).write_trajectory(tmp_path)
        frame = pd.read_csv(path)
        assert tuple(frame.columns) == TRAJECTORY_COLUMNS
        assert len(frame) == 3
        assert frame["smoothing_bound"].isna().all()

    def test_infinite_values_become_empty(self):
        """Test inf cells are written as blanks."""
        report = RunReport("r", "simulate", rows=[TrajectoryRow(t=1.0, l1=math.inf)])
        assert trajectory_frame(report)["l1"].isna().all()

    def test_profiles_long_format(self, simulate_report):
        """Test profiles are stacked as (t, r, u)."""
        frame = profiles_frame(simulate_report)
        assert list(frame.columns) == ["t", "r", "u"]
        assert len(frame) == 3 * 100
        assert profiles_frame(RunReport("r", "poincare")).empty

    def test_generate_is_deterministic(self, simulate_report, tmp_path):
        """Test two writes of the same report are byte-identical."""
        first = ArtifactWriter(simulate_report).generate(tmp_path / "a")
        second = ArtifactWriter(simulate_report).generate(tmp_path / "b")
        assert [p.name for p in first] == ["trajectory.csv", "report.json", "profiles.csv"]
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()

    def test_json_keys_sorted(self, simulate_report, tmp_path):
        """Test report.json has sorted keys and the verdict."""
        path = ArtifactWriter(simulate_report).write_json(tmp_path)
        data = json.loads(path.read_text())
        assert list(data) == sorted(data)
        assert data["verdict"] == "pass"

    def test_markdown_report(self, simulate_report, tmp_path):
        """Test report.md lists every check."""
        path = ReportGenerator(simulate_report).generate(str(tmp_path))
        text = path.read_text()
        assert path.name == "report.md"
        assert "**PASS**" in text
        for check in simulate_report.checks:
            assert check.name in text

    def test_format_number(self):
        """Test the number filter."""
        assert format_number(None) == "-"
        assert format_number(True) == "yes"
        assert format_number(1.0 / 3.0) == "0.333333"
        assert format_number(math.inf) == "inf"
        assert format_number("text") == "text"
