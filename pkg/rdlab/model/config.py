"""JSON scenario configuration."""

import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from .exceptions import ConfigError
from .geometry import RadialGeometry, Weight
from .params import ModelParams, TimeSchedule

SCENARIO_KINDS = (
    "simulate",
    "verify-smoothing",
    "verify-lq",
    "barrier-check",
    "blowup-run",
    "manifold-blowup",
    "integrable-weight-run",
    "poincare",
    "sobolev",
    "ladder-check",
    "aronson-benilan",
)

DATUM_KINDS = ("zero", "bump", "barrier")

TOLERANCE_ENV = "RDLAB_TOL"


@dataclass(frozen=True)
class Tolerances:
    """Verdict tolerances; RDLAB_TOL overrides them."""

    bound_slack: float = 0.01
    barrier_slack: float = 0.02
    monotone_tol: float = 1e-8
    residual_tol: float = 1e-8
    ab_tol: float = 1e-3
    plateau_factor: float = 1.1
    growth_factor: float = 5.0
    slope_slack: float = 0.1

    @classmethod
    def from_env(cls, base: Optional["Tolerances"] = None,
                 environ: Optional[Mapping[str, str]] = None) -> "Tolerances":
        """Apply RDLAB_TOL: a bare float sets bound_slack, otherwise key=value pairs."""
        base = base or cls()
        environ = os.environ if environ is None else environ
        raw = environ.get(TOLERANCE_ENV, "").strip()
        if not raw:
            return base
        known = {f.name for f in fields(cls)}
        try:
            return replace(base, bound_slack=float(raw))
        except ValueError:
            pass
        changes = {}
        for item in raw.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ConfigError(f"bad {TOLERANCE_ENV} entry '{item.strip()}'")
            try:
                changes[key] = float(value)
            except ValueError:
                raise ConfigError(f"{TOLERANCE_ENV} value for '{key}' is not a number: {value!r}")
        return replace(base, **changes)


@dataclass
class GeometrySpec:
    kind: str = "euclidean"
    dimension: int = 3
    kappa: float = 1.0

    def build(self) -> RadialGeometry:
        return RadialGeometry(self.dimension, self.kind, self.kappa)


@dataclass
class WeightSpec:
    kind: str = "unit"
    scale: float = math.e
    exponent: float = 4.0

    def build(self) -> Weight:
        return Weight(self.kind, self.scale, self.exponent)


@dataclass
class DatumSpec:
    kind: str = "bump"
    center: float = 0.0
    width: float = 1.0
    height: float = 1.0
    cap: float = math.inf

    def support_radius(self) -> float:
        if self.kind == "bump":
            return self.center + self.width
        return 0.0


@dataclass
class ScheduleSpec:
    t_end: float = 1.0
    checkpoints: Tuple[float, ...] = ()
    log_start: Optional[float] = None
    per_decade: int = 5
    dt_initial: float = 1e-5
    dt_max: float = 0.05
    growth: float = 0.05

    def build(self) -> TimeSchedule:
        options = dict(dt_initial=self.dt_initial, dt_max=self.dt_max, growth=self.growth)
        if self.log_start is not None:
            base = TimeSchedule.logarithmic(self.log_start, self.t_end, self.per_decade, **options)
            return TimeSchedule(self.t_end, base.checkpoints + tuple(self.checkpoints), **options)
        return TimeSchedule(self.t_end, tuple(self.checkpoints), **options)


@dataclass
class BarrierSpec:
    C: float = 10.0
    a: float = 1.0
    alpha: float = 0.5
    beta: Optional[float] = None
    T: float = 256.0
    target: str = "weighted-euclidean"


@dataclass
class LadderSpec:
    k_seq: Tuple[float, ...] = ()
    R_seq: Tuple[float, ...] = ()
    h_seq: Tuple[float, ...] = ()


@dataclass
class ChecksSpec:
    q_values: Tuple[float, ...] = (2.0,)
    t_min: float = 1e-3
    slope_window: Tuple[float, float] = (1e-3, 1e-1)
    early_window: Tuple[float, float] = (1.0, 10.0)
    late_window: Tuple[float, float] = (1.0, 100.0)
    compare_radius: Optional[float] = None
    expected: Optional[Tuple[float, float]] = None
    profiles: int = 100
    residual_samples: int = 5000
    residual_t_max: float = 100.0
    refine: int = 2


@dataclass
class ScenarioConfig:
    name: str
    kind: str
    m: float
    p: float
    geometry: GeometrySpec = field(default_factory=GeometrySpec)
    weight: WeightSpec = field(default_factory=WeightSpec)
    radius: float = 10.0
    cells: int = 200
    k_trunc: float = math.inf
    reaction: bool = True
    datum: DatumSpec = field(default_factory=DatumSpec)
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    barrier: Optional[BarrierSpec] = None
    ladder: LadderSpec = field(default_factory=LadderSpec)
    checks: ChecksSpec = field(default_factory=ChecksSpec)
    constants: Dict[str, float] = field(default_factory=dict)
    output: Optional[str] = None
    source: Optional[str] = None

    def model_params(self) -> ModelParams:
        return ModelParams(
            m=self.m, p=self.p, geometry=self.geometry.build(), weight=self.weight.build(),
            radius=self.radius, cells=self.cells, k_trunc=self.k_trunc, reaction=self.reaction,
        )


def _infinite(value):
    """JSON has no infinity; null stands for it in level sequences."""
    return math.inf if value is None else float(value)


def _section(data: Mapping[str, Any], key: str, path: Optional[str]) -> Dict[str, Any]:
    value = data.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section '{key}' must be an object", path)
    return dict(value)


def _build(cls, values: Dict[str, Any], section: str, path: Optional[str]):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {', '.join(unknown)}", path)
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{section}' section: {exc}", path)


class ScenarioConfigParser:
    """Reads scenario JSON documents into ScenarioConfig objects."""

    def __init__(self, path: Optional[str] = None):
        self.path = path

    def parse_file(self, path) -> ScenarioConfig:
        self.path = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read configuration: {exc}", self.path)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}", self.path)
        config = self.parse_dict(data)
        config.source = self.path
        return config

    def parse_dict(self, data: Any) -> ScenarioConfig:
        path = self.path
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object", path)
        for key in ("kind", "model"):
            if key not in data:
                raise ConfigError(f"missing required key '{key}'", path)
        kind = data["kind"]
        if kind not in SCENARIO_KINDS:
            raise ConfigError(f"unknown scenario kind '{kind}'", path)

        model = _section(data, "model", path)
        for key in ("m", "p"):
            if key not in model:
                raise ConfigError(f"model.{key} is required (no default)", path)
        domain = _section(data, "domain", path)
        datum = _section(data, "datum", path)
        schedule = _section(data, "schedule", path)
        ladder = _section(data, "ladder", path)
        checks = _section(data, "checks", path)
        barrier = data.get("barrier")

        try:
            if "cap" in datum:
                datum["cap"] = _infinite(datum["cap"])
            if "checkpoints" in schedule:
                schedule["checkpoints"] = tuple(float(t) for t in schedule["checkpoints"])
            for key in ("k_seq", "R_seq", "h_seq"):
                if key in ladder:
                    ladder[key] = tuple(_infinite(v) for v in ladder[key])
            for key in ("q_values", "slope_window", "early_window", "late_window", "expected"):
                if checks.get(key) is not None:
                    checks[key] = tuple(float(v) for v in checks[key])
            return ScenarioConfig(
                name=str(data.get("name", kind)),
                kind=kind,
                m=float(model["m"]),
                p=float(model["p"]),
                k_trunc=_infinite(model.get("k_trunc")),
                reaction=bool(model.get("reaction", True)),
                geometry=_build(GeometrySpec, _section(data, "geometry", path), "geometry", path),
                weight=_build(WeightSpec, _section(data, "weight", path), "weight", path),
                radius=float(domain.get("radius", 10.0)),
                cells=int(domain.get("cells", 200)),
                datum=_build(DatumSpec, datum, "datum", path),
                schedule=_build(ScheduleSpec, schedule, "schedule", path),
                barrier=None if barrier is None else _build(BarrierSpec, dict(barrier), "barrier", path),
                ladder=_build(LadderSpec, ladder, "ladder", path),
                checks=_build(ChecksSpec, checks, "checks", path),
                constants={k: float(v) for k, v in _section(data, "constants", path).items()},
                output=data.get("output"),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value: {exc}", path)


def parse_scenario_file(path) -> ScenarioConfig:
    """Parse a scenario JSON file."""
    return ScenarioConfigParser().parse_file(path)
