"""Config-driven scenario runner binding solver, estimates, barriers and inequalities."""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..bounds import barriers, estimates
from ..bounds.barriers import BarrierParams
from ..model.config import ScenarioConfig, Tolerances
from ..model.exceptions import ConfigError
from ..model.params import ModelParams, State, Trajectory, bump_profile, cap
from .inequalities import RayleighProblem, poincare_estimate, rayleigh_quotient, sobolev_estimate
from .ladder import ladder_check
from .solver import front_radius, solve

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = (
    "t", "l1", "lm", "lq", "linf", "smoothing_bound", "lq_bound", "barrier_min_ratio",
)
# coarse Aronson-Benilan residual below this leaves the refinement check empty
AB_RESOLVED_FLOOR = 1e-12


@dataclass
class CheckResult:
    """One verdict entry: value compared against limit in the given direction."""

    name: str
    value: float
    limit: float
    upper: bool = True
    required: bool = True

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value <= self.limit if self.upper else self.value >= self.limit

    @property
    def margin(self) -> float:
        return self.limit - self.value if self.upper else self.value - self.limit

    def as_dict(self):
        return {"name": self.name, "value": self.value, "limit": self.limit,
                "direction": "<=" if self.upper else ">=", "pass": self.passed,
                "margin": self.margin, "required": self.required}


@dataclass
class TrajectoryRow:
    t: float
    l1: Optional[float] = None
    lm: Optional[float] = None
    lq: Optional[float] = None
    linf: Optional[float] = None
    smoothing_bound: Optional[float] = None
    lq_bound: Optional[float] = None
    barrier_min_ratio: Optional[float] = None

    def values(self):
        return [getattr(self, column) for column in TRAJECTORY_COLUMNS]


@dataclass
class RunReport:
    name: str
    kind: str
    checks: List[CheckResult] = field(default_factory=list)
    constants: Dict[str, Any] = field(default_factory=dict)
    feasibility: Optional[Dict[str, Any]] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    rows: List[TrajectoryRow] = field(default_factory=list)
    centers: Optional[np.ndarray] = None
    profiles: Dict[float, np.ndarray] = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict else 2

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> Dict[str, Any]:
        return _clean({
            "name": self.name,
            "kind": self.kind,
            "verdict": "pass" if self.verdict else "fail",
            "checks": [c.as_dict() for c in self.checks],
            "constants": self.constants,
            "feasibility": self.feasibility,
            "diagnostics": self.diagnostics,
            "checkpoints": len(self.rows),
        })


def _clean(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _window(times: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return (times >= lo * (1 - 1e-12)) & (times <= hi * (1 + 1e-12))


class ScenarioRunner:
    """Runs one scenario configuration and collects a RunReport."""

    def __init__(self, config: ScenarioConfig, tolerances: Optional[Tolerances] = None):
        self.config = config
        self.tolerances = tolerances or Tolerances.from_env()

    def run(self) -> RunReport:
        cfg = self.config
        handler = getattr(self, "_run_" + cfg.kind.replace("-", "_"), None)
        if handler is None:
            raise ConfigError(f"unknown scenario kind '{cfg.kind}'", cfg.source)
        logger.info("running scenario '%s' (%s)", cfg.name, cfg.kind)
        report = RunReport(name=cfg.name, kind=cfg.kind)
        handler(report)
        report.diagnostics["tolerances"] = asdict(self.tolerances)
        logger.info("scenario '%s': %s", cfg.name, "pass" if report.verdict else "fail")
        return report

    # -- shared pieces ------------------------------------------------------

    @property
    def params(self) -> ModelParams:
        return self.config.model_params()

    def barrier_params(self) -> BarrierParams:
        spec = self.config.barrier
        if spec is None:
            raise ConfigError("scenario requires a 'barrier' section", self.config.source)
        beta = barriers.balanced_beta(spec.alpha, self.config.m) if spec.beta is None else spec.beta
        return BarrierParams(C=spec.C, a=spec.a, alpha=spec.alpha, beta=beta, T=spec.T,
                             target=spec.target)

    def barrier_at(self, t: float) -> Callable[[np.ndarray], np.ndarray]:
        bp = self.barrier_params()
        m = self.config.m
        if bp.target == "manifold":
            return lambda r: barriers.manifold_barrier_profile(r, t, bp, m)
        return lambda r: barriers.subsolution_profile(r, t, bp, m)

    def datum(self) -> Callable[[np.ndarray], np.ndarray]:
        spec = self.config.datum
        if spec.kind == "zero":
            base = np.zeros_like
        elif spec.kind == "bump":
            base = lambda r: bump_profile(r, spec.center, spec.width, spec.height)
        elif spec.kind == "barrier":
            barrier = self.barrier_at(0.0)
            base = lambda r: spec.height * barrier(r)
        else:
            raise ConfigError(f"unknown datum kind '{spec.kind}'", self.config.source)
        return lambda r: cap(base(r), spec.cap)

    def bound_constants(self, params: ModelParams) -> estimates.BoundConstants:
        """C_p and C_s from the config, else estimated on the scenario's ball."""
        given = self.config.constants
        cells = max(100, min(params.cells, 4000))
        if "C_p" in given:
            c_p = given["C_p"]
        else:
            c_p = poincare_estimate(params.geometry, params.weight, params.radius, cells).constant
        if "C_s" in given:
            c_s = given["C_s"]
        else:
            c_s = sobolev_estimate(params.geometry, params.radius, cells).upper_bound
        return estimates.BoundConstants(params.geometry.dimension, params.m, params.p, c_p, c_s)

    def _solve(self, params: ModelParams, store_profiles: bool = False) -> Trajectory:
        q_values = self.config.checks.q_values
        return solve(params, self.datum(), self.config.schedule.build(), q_values=q_values,
                     store_profiles=store_profiles)

    def _rows(self, trajectory: Trajectory) -> List[TrajectoryRow]:
        q = self.config.checks.q_values[0] if self.config.checks.q_values else None
        return [TrajectoryRow(t=rec.t, l1=rec.l1, lm=rec.lm,
                              lq=rec.lq.get(q) if q is not None else None, linf=rec.linf)
                for rec in trajectory.records]

    def _keep_profiles(self, report: RunReport, trajectory: Trajectory):
        report.centers = trajectory.centers
        report.profiles = dict(trajectory.profiles)

    # -- kinds ----------------------------------------------------------------

    def _run_simulate(self, report: RunReport):
        trajectory = self._solve(self.params, store_profiles=True)
        report.rows = self._rows(trajectory)
        self._keep_profiles(report, trajectory)
        lowest = min(float(np.min(u)) for u in trajectory.profiles.values())
        report.checks.append(CheckResult("nonnegativity", lowest, 0.0, upper=False))
        finite = all(math.isfinite(r.linf) for r in trajectory.records)
        report.checks.append(CheckResult("finite_norms", 1.0 if finite else 0.0, 1.0, upper=False))

    def _growth_run(self, report: RunReport):
        cfg, tol = self.config, self.tolerances
        params = self.params
        constants = self.bound_constants(params)
        report.constants = constants.as_dict()
        trajectory = self._solve(params)
        report.rows = self._rows(trajectory)

        first = trajectory.records[0]
        u0_m = first.lm
        gamma = constants.gammas[2]
        rate_m = constants.rate(params.m)
        lq_ratios: Dict[float, float] = {}
        smoothing_ratio = 0.0
        for row, rec in zip(report.rows, trajectory.records):
            if rec.t <= 0:
                continue
            for q in cfg.checks.q_values:
                bound = estimates.lq_growth_bound(rec.t, first.lq[q], constants.rate(q))
                ratio = rec.lq[q] / bound if bound > 0 else 0.0
                lq_ratios[q] = max(lq_ratios.get(q, 0.0), ratio)
                if q == cfg.checks.q_values[0]:
                    row.lq_bound = bound
            if rec.t >= cfg.checks.t_min * (1 - 1e-12):
                bound = estimates.smoothing_bound(rec.t, u0_m, params.m, params.p,
                                                  params.geometry.dimension, gamma, rate_m)
                row.smoothing_bound = bound
                if bound > 0:
                    smoothing_ratio = max(smoothing_ratio, rec.linf / bound)

        rm_bound_ratio = max(
            (rec.lm / estimates.lq_growth_bound(rec.t, u0_m, rate_m)
             for rec in trajectory.records[1:] if u0_m > 0), default=0.0)
        report.diagnostics["C(q)"] = {str(q): constants.rate(q) for q in cfg.checks.q_values}
        report.diagnostics["lm_bound_ratio"] = rm_bound_ratio

        lq_required = cfg.kind == "verify-lq"
        for q, ratio in sorted(lq_ratios.items()):
            report.checks.append(CheckResult(f"lq_growth_q{q:g}", ratio, 1.0 + tol.bound_slack,
                                             required=lq_required))
        smoothing_required = cfg.kind == "verify-smoothing"
        report.checks.append(CheckResult("smoothing_ratio", smoothing_ratio,
                                         1.0 + tol.bound_slack, required=smoothing_required))

        times = trajectory.times
        linf = trajectory.column("linf")
        lo, hi = cfg.checks.slope_window
        mask = _window(times, lo, hi) & (linf > 0)
        if np.count_nonzero(mask) >= 2:
            slope = barriers.growth_exponent(times[mask], linf[mask])
            floor = -estimates.smoothing_exponents(params.m, params.p,
                                                   params.geometry.dimension).transient
            report.checks.append(CheckResult("early_linf_slope", slope, floor - tol.slope_slack,
                                             upper=False, required=smoothing_required))
        fit_mask = (times > 0) & (linf > 0)
        if u0_m > 0 and np.count_nonzero(fit_mask) >= 2:
            c1, c2 = estimates.fit_smoothing_constants(
                times[fit_mask], linf[fit_mask], u0_m, params.m, params.p,
                params.geometry.dimension, rate_m)
            report.diagnostics["fitted_smoothing_constants"] = {"c1": c1, "c2": c2}

    _run_verify_lq = _growth_run
    _run_verify_smoothing = _growth_run

    def _run_barrier_check(self, report: RunReport):
        cfg, tol = self.config, self.tolerances
        bp = self.barrier_params()
        weight = cfg.weight.build()
        env = weight.envelope()
        dimension = cfg.geometry.dimension
        feasibility = barriers.validate_barrier(bp, cfg.m, cfg.p, env, dimension=dimension)
        report.feasibility = feasibility.as_dict()
        report.constants = {"barrier": bp.as_dict(), "envelope": env.as_dict(),
                            "K": barriers.envelope_constant(cfg.m, cfg.p)}
        report.diagnostics["envelope_t0"] = barriers.envelope(
            0.0, bp, cfg.m, cfg.p, env, dimension).as_dict()
        sweep = barriers.residual_sweep(bp, cfg.m, cfg.p, weight, dimension,
                                        samples=cfg.checks.residual_samples,
                                        t_max=cfg.checks.residual_t_max,
                                        tolerance=tol.residual_tol)
        report.diagnostics["residual_sweep"] = sweep.as_dict()
        report.checks.append(CheckResult("feasibility", 1.0 if feasibility.passed else 0.0, 1.0,
                                         upper=False))
        report.checks.append(CheckResult("residual_max", sweep.max_residual, tol.residual_tol))

    def _barrier_comparison(self, report: RunReport, trajectory: Trajectory) -> float:
        """Fill barrier_min_ratio per checkpoint on r <= compare_radius; return the minimum.

        Cells where the barrier is below barrier_slack times its maximum meet
        u >= barrier - slack * max trivially and are left out of the ratio.
        """
        radius = self.config.checks.compare_radius or self.config.radius / 4.0
        floor = self.tolerances.barrier_slack
        centers = trajectory.centers
        inside = centers <= radius
        worst = math.inf
        for row in report.rows:
            profile = trajectory.profile_at(row.t)
            barrier = self.barrier_at(row.t)(centers)
            peak = float(np.max(barrier, initial=0.0))
            active = inside & (barrier > 0) & (barrier >= floor * peak)
            if not np.any(active):
                continue
            ratio = float(np.min(profile[active] / barrier[active]))
            row.barrier_min_ratio = ratio
            worst = min(worst, ratio)
        return worst

    def _run_blowup_run(self, report: RunReport):
        cfg, tol = self.config, self.tolerances
        bp = self.barrier_params()
        feasibility = barriers.validate_barrier(bp, cfg.m, cfg.p, cfg.weight.build().envelope(),
                                                dimension=cfg.geometry.dimension)
        report.feasibility = feasibility.as_dict()
        edge = barriers.subsolution_support_radius(cfg.schedule.t_end, bp)
        report.constants = {"barrier": bp.as_dict(), "support_radius_t_end": edge}
        report.checks.append(CheckResult("feasibility", 1.0 if feasibility.passed else 0.0, 1.0,
                                         upper=False))
        # comparison on the ball needs the barrier to vanish on r = R up to t_end
        report.checks.append(CheckResult("barrier_support_radius", edge, cfg.radius))
        if not report.verdict:
            logger.warning("barrier is not a subsolution on the ball of radius %g; "
                           "skipping the solve", cfg.radius)
            return

        trajectory = self._solve(self.params, store_profiles=True)
        report.rows = self._rows(trajectory)
        self._keep_profiles(report, trajectory)

        worst = self._barrier_comparison(report, trajectory)
        report.checks.append(CheckResult("barrier_min_ratio", worst, 1.0 - tol.barrier_slack,
                                         upper=False))
        times, linf = trajectory.times, trajectory.column("linf")
        lo, hi = cfg.checks.late_window
        early = linf[np.argmin(np.abs(times - lo))]
        late = linf[np.argmin(np.abs(times - hi))]
        growth = late / early if early > 0 else 0.0
        report.checks.append(CheckResult("linf_growth", growth, tol.growth_factor, upper=False))
        decades = [t for t in times if t > 0 and math.isclose(math.log10(t), round(math.log10(t)),
                                                              abs_tol=1e-9)]
        at_decades = [linf[np.argmin(np.abs(times - t))] for t in decades]
        increasing = len(at_decades) >= 2 and all(b > a for a, b in zip(at_decades, at_decades[1:]))
        report.diagnostics["linf_at_decades"] = dict(zip((f"{t:g}" for t in decades), at_decades))
        report.checks.append(CheckResult("linf_increasing_by_decade", 1.0 if increasing else 0.0,
                                         1.0, upper=False))

    def _run_manifold_blowup(self, report: RunReport):
        cfg, tol = self.config, self.tolerances
        bp = self.barrier_params()
        schedule = cfg.schedule.build()
        margins = barriers.manifold_margins(bp, cfg.m, cfg.p, cfg.geometry.build(),
                                            (0.0,) + schedule.checkpoints)
        edge = barriers.support_radius(schedule.t_end, bp)
        report.constants = {"barrier": bp.as_dict(), "support_radius_t_end": edge}
        report.diagnostics["barrier_residual"] = margins
        report.checks.append(CheckResult("barrier_residual", margins["max_residual"],
                                         tol.residual_tol))
        report.checks.append(CheckResult("barrier_support_radius", edge, cfg.radius))
        if not report.verdict:
            logger.warning("manifold barrier is not a subsolution on the ball of radius %g; "
                           "skipping the solve", cfg.radius)
            return

        trajectory = self._solve(self.params, store_profiles=True)
        report.rows = self._rows(trajectory)
        self._keep_profiles(report, trajectory)

        worst = self._barrier_comparison(report, trajectory)
        report.checks.append(CheckResult("barrier_min_ratio", worst, 1.0 - tol.barrier_slack,
                                         upper=False))
        times = trajectory.times
        fronts = np.array([front_radius(trajectory.centers, trajectory.profile_at(t))
                           for t in times])
        peaks = np.array([trajectory.profile_at(t)[0] for t in times])
        front_ratio = min(front / barriers.support_radius(t, bp) for t, front in zip(times, fronts))
        center_ratio = min(peak / barriers.center_value(t, bp) for t, peak in zip(times, peaks))
        report.checks.append(CheckResult("front_ratio", front_ratio, 1.0 - tol.barrier_slack,
                                         upper=False))
        report.checks.append(CheckResult("center_ratio", center_ratio, 1.0 - tol.barrier_slack,
                                         upper=False))

        t_end = cfg.schedule.t_end
        last = _window(times, t_end / 10.0, t_end)
        if np.count_nonzero(last) >= 2 and np.all(fronts[last] > 0) and np.all(peaks[last] > 0):
            report.diagnostics["solution_exponents"] = {
                "front": barriers.growth_exponent(times[last], fronts[last], shift=bp.tau),
                "center": barriers.growth_exponent(times[last], peaks[last], shift=bp.tau),
                "barrier_front": bp.beta,
                "barrier_center": bp.alpha,
            }

    def _run_integrable_weight_run(self, report: RunReport):
        cfg, tol = self.config, self.tolerances
        params = self.params
        trajectory = self._solve(params)
        report.rows = self._rows(trajectory)
        times, linf = trajectory.times, trajectory.column("linf")
        early = float(np.max(linf[_window(times, *cfg.checks.early_window)], initial=0.0))
        late = float(np.max(linf[_window(times, *cfg.checks.late_window)], initial=0.0))
        ratio = late / early if early > 0 else 0.0
        report.checks.append(CheckResult("plateau_ratio", ratio, tol.plateau_factor))

        dimension = params.geometry.dimension
        rho_total = params.weight.total_mass(dimension)
        c_s = self.bound_constants(params).c_s
        c_abs = estimates.absolute_constant(params.m, params.p, dimension, c_s, rho_total)
        report.constants = {"rho_total": rho_total, "C_s": c_s, "C_abs": c_abs}
        worst = max((rec.linf / estimates.absolute_bound(rec.t, params.m, c_abs)
                     for rec in trajectory.records if rec.t > 0), default=0.0)
        report.checks.append(CheckResult("absolute_bound_ratio", worst, 1.0 + tol.bound_slack,
                                         required=False))

    def _run_poincare(self, report: RunReport):
        cfg = self.config
        params = self.params
        estimate = poincare_estimate(params.geometry, params.weight, params.radius, params.cells)
        report.constants = estimate.as_dict()
        if cfg.checks.expected is not None:
            lo, hi = cfg.checks.expected
            report.checks.append(CheckResult("lambda1_low", estimate.eigenvalue, lo, upper=False))
            report.checks.append(CheckResult("lambda1_high", estimate.eigenvalue, hi))
        problem = RayleighProblem.build(params.geometry, params.weight, params.radius, params.cells)
        violations = rayleigh_violations(problem, estimate.eigenvalue, cfg.checks.profiles)
        report.checks.append(CheckResult("rayleigh_violations", float(violations), 0.0))

    def _run_sobolev(self, report: RunReport):
        cfg = self.config
        params = self.params
        estimate = sobolev_estimate(params.geometry, params.radius, params.cells)
        report.constants = estimate.as_dict()
        if cfg.checks.expected is not None:
            lo, hi = cfg.checks.expected
            report.checks.append(CheckResult("C_s_low", estimate.upper_bound, lo, upper=False))
            report.checks.append(CheckResult("C_s_high", estimate.upper_bound, hi))

    def _run_ladder_check(self, report: RunReport):
        cfg = self.config
        ladder = cfg.ladder
        result = ladder_check(self.params, self.datum(), cfg.schedule.build(),
                              ladder.k_seq, ladder.R_seq, ladder.h_seq)
        report.diagnostics["ladder"] = result.as_dict()
        report.checks.append(CheckResult("monotone_violation", result.max_violation,
                                         self.tolerances.monotone_tol))

    def _run_aronson_benilan(self, report: RunReport):
        cfg, tol = self.config, self.tolerances
        base = self.params.replace(reaction=False)
        schedule = cfg.schedule.build()
        results = []
        for factor in (1, cfg.checks.refine):
            params = base.replace(cells=base.cells * factor)
            grid = params.build_grid()
            trajectory = solve(params, self.datum(), schedule.refined(factor), q_values=(),
                               store_profiles=True, grid=grid)
            t_end = trajectory.records[-1].t
            state = State(t_end, trajectory.profile_at(t_end))
            results.append(estimates.aronson_benilan_residual(params, state, grid))
            if factor == 1:
                report.rows = self._rows(trajectory)
        coarse, fine = results
        report.diagnostics["aronson_benilan"] = {"coarse": coarse.as_dict(),
                                                 "fine": fine.as_dict(),
                                                 "refine": cfg.checks.refine}
        report.checks.append(CheckResult("ab_mean_residual", fine.mean, tol.ab_tol))
        report.checks.append(CheckResult("ab_coarse_residual", coarse.mean, AB_RESOLVED_FLOOR,
                                         upper=False))
        report.checks.append(CheckResult("ab_refinement", 2.0 * fine.mean, coarse.mean))


def rayleigh_violations(problem: RayleighProblem, eigenvalue: float, count: int,
                        rel_tol: float = 1e-9) -> int:
    """Number of pseudo-random profiles whose Rayleigh quotient falls below lambda_1."""
    rng = np.random.default_rng(0)
    r = problem.grid.centers
    radius = problem.grid.radius
    violations = 0
    for _ in range(count):
        modes = rng.integers(1, 8)
        coefficients = rng.standard_normal(modes)
        v = sum(c * np.cos((2 * j + 1) * 0.5 * math.pi * r / radius)
                for j, c in enumerate(coefficients))
        v = v + 0.1 * rng.standard_normal(r.size)
        if rayleigh_quotient(problem, v) < eigenvalue * (1.0 - rel_tol):
            violations += 1
    return violations


def run_scenario(cfg: ScenarioConfig, tolerances: Optional[Tolerances] = None) -> RunReport:
    """Run a scenario and return its report; artifact writing is left to the caller."""
    return ScenarioRunner(cfg, tolerances).run()
