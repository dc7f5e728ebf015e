"""Semantic validator for scenario configurations."""

import math
from typing import List

from .config import DATUM_KINDS, ScenarioConfig
from .geometry import GEOMETRY_KINDS, WEIGHT_KINDS

SIMULATION_KINDS = (
    "simulate", "verify-smoothing", "verify-lq", "blowup-run", "manifold-blowup",
    "integrable-weight-run", "ladder-check", "aronson-benilan",
)
BARRIER_KINDS = ("barrier-check", "blowup-run", "manifold-blowup")


class ValidationError(Exception):
    """Raised when validation fails."""
    def __init__(self, message: str, location: str = ""):
        self.message = message
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ScenarioValidator:
    """Validates scenario configurations for semantic consistency."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.errors: List[ValidationError] = []

    def validate(self) -> List[ValidationError]:
        """Run all validation checks."""
        self.errors = []
        self._validate_exponents()
        self._validate_geometry()
        self._validate_domain()
        self._validate_datum()
        self._validate_schedule()
        self._validate_barrier()
        self._validate_ladder()
        self._validate_checks()
        return self.errors

    def _error(self, message: str, location: str):
        self.errors.append(ValidationError(message, location))

    def _validate_exponents(self):
        cfg = self.config
        if not 1.0 < cfg.p < cfg.m:
            self._error(f"exponents must satisfy 1 < p < m (got m={cfg.m}, p={cfg.p})", "model")
        if not cfg.k_trunc > 0:
            self._error(f"truncation level must be positive (got {cfg.k_trunc})", "model.k_trunc")

    def _validate_geometry(self):
        geom = self.config.geometry
        if geom.kind not in GEOMETRY_KINDS:
            self._error(f"unknown geometry kind '{geom.kind}'", "geometry.kind")
        if int(geom.dimension) != geom.dimension or geom.dimension < 3:
            self._error(f"dimension must be an integer >= 3 (got {geom.dimension})",
                        "geometry.dimension")
        if geom.kind == "hyperbolic" and not geom.kappa > 0:
            self._error(f"curvature must be positive (got {geom.kappa})", "geometry.kappa")

        weight = self.config.weight
        if weight.kind not in WEIGHT_KINDS:
            self._error(f"unknown weight kind '{weight.kind}'", "weight.kind")
        if weight.kind == "integrable" and not weight.exponent > geom.dimension:
            self._error(f"integrable weight needs exponent > N = {geom.dimension} "
                        f"(got {weight.exponent})", "weight.exponent")
        if weight.kind == "inverse_square" and not weight.scale > 0:
            self._error(f"weight scale must be positive (got {weight.scale})", "weight.scale")

    def _validate_domain(self):
        cfg = self.config
        if not cfg.radius > 0:
            self._error(f"radius must be positive (got {cfg.radius})", "domain.radius")
        if cfg.cells < 2:
            self._error(f"cell count must be at least 2 (got {cfg.cells})", "domain.cells")
        if cfg.kind == "poincare" and cfg.cells < 100:
            self._error("poincare estimates need at least 100 cells", "domain.cells")

    def _validate_datum(self):
        cfg = self.config
        datum = cfg.datum
        if datum.kind not in DATUM_KINDS:
            self._error(f"unknown datum kind '{datum.kind}'", "datum.kind")
            return
        if cfg.kind not in SIMULATION_KINDS:
            return
        if datum.kind == "bump":
            if not datum.width > 0:
                self._error(f"bump width must be positive (got {datum.width})", "datum.width")
            if datum.height < 0:
                self._error(f"bump height must be nonnegative (got {datum.height})", "datum.height")
            if not cfg.radius > datum.support_radius():
                self._error(f"domain radius {cfg.radius} must exceed the datum support radius "
                            f"{datum.support_radius()}", "datum")
        if datum.kind == "barrier":
            if cfg.barrier is None:
                self._error("barrier datum requires a 'barrier' section", "datum.kind")
            if datum.height < 1.0:
                self._error(f"barrier datum height must be at least 1 (got {datum.height})",
                            "datum.height")
        if not datum.cap > 0:
            self._error(f"datum cap must be positive (got {datum.cap})", "datum.cap")

    def _validate_schedule(self):
        schedule = self.config.schedule
        if self.config.kind not in SIMULATION_KINDS:
            return
        if not schedule.t_end > 0:
            self._error(f"t_end must be positive (got {schedule.t_end})", "schedule.t_end")
        if not 0 < schedule.dt_initial <= schedule.dt_max:
            self._error("requires 0 < dt_initial <= dt_max", "schedule")
        if schedule.log_start is not None and not 0 < schedule.log_start < schedule.t_end:
            self._error("log_start must lie in (0, t_end)", "schedule.log_start")
        outside = [t for t in schedule.checkpoints if not 0 < t <= schedule.t_end]
        if outside:
            self._error(f"checkpoints outside (0, t_end]: {outside}", "schedule.checkpoints")

    def _validate_barrier(self):
        cfg = self.config
        if cfg.kind not in BARRIER_KINDS:
            return
        barrier = cfg.barrier
        if barrier is None:
            self._error(f"scenario kind '{cfg.kind}' requires a 'barrier' section", "barrier")
            return
        for name in ("C", "a", "T"):
            if not getattr(barrier, name) > 0:
                self._error(f"{name} must be positive", f"barrier.{name}")
        if cfg.m > 1 and not 0 < barrier.alpha < 1.0 / (cfg.m - 1.0):
            self._error("alpha must lie in (0, 1/(m-1))", "barrier.alpha")
        expected = "manifold" if cfg.kind == "manifold-blowup" else "weighted-euclidean"
        if barrier.target != expected:
            self._error(f"scenario kind '{cfg.kind}' needs barrier target '{expected}'",
                        "barrier.target")
        if expected == "weighted-euclidean" and cfg.weight.kind != "inverse_square":
            self._error("the weighted barrier needs the inverse_square weight", "weight.kind")

    def _validate_ladder(self):
        cfg = self.config
        if cfg.kind != "ladder-check":
            return
        ladder = cfg.ladder
        if not (ladder.k_seq or ladder.R_seq or ladder.h_seq):
            self._error("at least one ladder sequence is required", "ladder")
        for name in ("k_seq", "R_seq", "h_seq"):
            seq = getattr(ladder, name)
            if any(not b >= a for a, b in zip(seq, seq[1:])):
                self._error(f"{name} must be non-decreasing", f"ladder.{name}")
            if any(not v > 0 for v in seq):
                self._error(f"{name} entries must be positive", f"ladder.{name}")
        dr = cfg.radius / cfg.cells if cfg.cells else math.nan
        for radius in ladder.R_seq:
            if math.isinf(radius) or not math.isclose(round(radius / dr) * dr, radius, rel_tol=1e-9):
                self._error(f"ladder radius {radius} is not a multiple of the cell size {dr:g}",
                            "ladder.R_seq")
            elif radius <= self.config.datum.support_radius():
                self._error(f"ladder radius {radius} does not contain the datum support",
                            "ladder.R_seq")

    def _validate_checks(self):
        checks = self.config.checks
        if any(not q >= 1 for q in checks.q_values):
            self._error(f"norm exponents must be >= 1 (got {checks.q_values})", "checks.q_values")
        if checks.expected is not None and len(checks.expected) != 2:
            self._error("expected must be a [low, high] pair", "checks.expected")
        if checks.refine < 2:
            self._error("refinement factor must be at least 2", "checks.refine")

