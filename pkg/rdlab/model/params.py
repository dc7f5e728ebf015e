"""Model parameters, solver state, recorded trajectories and time schedules."""

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import ParameterError
from .geometry import Grid, RadialGeometry, Weight

ProfileSource = Union[np.ndarray, Sequence[float], Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class ModelParams:
    """Exponents, truncation level and domain of the truncated ball problem.

    `k_trunc = inf` means the reaction is not truncated. `reaction = False`
    removes the source term and leaves the (weighted) porous medium equation.
    """

    m: float
    p: float
    geometry: RadialGeometry
    weight: Weight = field(default_factory=Weight)
    radius: float = 10.0
    cells: int = 200
    k_trunc: float = math.inf
    reaction: bool = True

    def __post_init__(self):
        if not 1.0 < self.p < self.m:
            raise ParameterError("(m, p)", (self.m, self.p), "requires 1 < p < m")
        if not self.k_trunc > 0:
            raise ParameterError("k_trunc", self.k_trunc, "must be positive")
        if not self.radius > 0:
            raise ParameterError("radius", self.radius, "must be positive")
        if self.cells < 2:
            raise ParameterError("cells", self.cells, "must be at least 2")

    @property
    def dr(self) -> float:
        return self.radius / self.cells

    def build_grid(self) -> Grid:
        return Grid.build(self.geometry, self.weight, self.radius, self.cells)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)


@dataclass
class State:
    """Nonnegative radial profile on the grid cells at time t."""

    t: float
    u: np.ndarray

    def copy(self) -> "State":
        return State(self.t, self.u.copy())


@dataclass
class NormRecord:
    t: float
    l1: float
    lm: float
    linf: float
    lq: Dict[float, float] = field(default_factory=dict)


@dataclass
class Trajectory:
    """Norm history of a solve plus optional stored checkpoint profiles."""

    records: List[NormRecord] = field(default_factory=list)
    profiles: Dict[float, np.ndarray] = field(default_factory=dict)
    centers: Optional[np.ndarray] = None

    def append(self, record: NormRecord):
        if self.records and record.t <= self.records[-1].t:
            raise ParameterError("t", record.t,
                                 f"recorded times must increase (last {self.records[-1].t})")
        self.records.append(record)

    @property
    def times(self) -> np.ndarray:
        return np.array([rec.t for rec in self.records])

    def column(self, name: str, q: Optional[float] = None) -> np.ndarray:
        """Norm column by name: 'l1', 'lm', 'linf' or 'lq' (with q)."""
        if name == "lq":
            return np.array([rec.lq[q] for rec in self.records])
        return np.array([getattr(rec, name) for rec in self.records])

    def record_at(self, t: float) -> NormRecord:
        for rec in self.records:
            if math.isclose(rec.t, t, rel_tol=1e-12, abs_tol=1e-15):
                return rec
        raise KeyError(t)

    def profile_at(self, t: float) -> np.ndarray:
        for key, profile in self.profiles.items():
            if math.isclose(key, t, rel_tol=1e-12, abs_tol=1e-15):
                return profile
        raise KeyError(t)


@dataclass(frozen=True)
class TimeSchedule:
    """Deterministic step-size schedule that lands exactly on checkpoints.

    Step sizes grow geometrically with t, dt = clamp(growth * t, dt_initial,
    dt_max), which resolves the early smoothing transient. The schedule never
    looks at the solution, so identical inputs give identical step sequences.
    """

    t_end: float
    checkpoints: Tuple[float, ...] = ()
    dt_initial: float = 1e-5
    dt_max: float = 0.05
    growth: float = 0.05
    dt_min: float = 1e-14

    def __post_init__(self):
        if not self.t_end > 0:
            raise ParameterError("t_end", self.t_end, "must be positive")
        if not 0 < self.dt_initial <= self.dt_max:
            raise ParameterError("dt_initial", self.dt_initial, "requires 0 < dt_initial <= dt_max")
        points = sorted({float(t) for t in self.checkpoints if 0 < t < self.t_end})
        points.append(float(self.t_end))
        object.__setattr__(self, "checkpoints", tuple(points))

    @classmethod
    def logarithmic(cls, t_start: float, t_end: float, per_decade: int = 5, **kwargs) -> "TimeSchedule":
        """Checkpoints log-spaced from t_start to t_end."""
        if not 0 < t_start < t_end:
            raise ParameterError("t_start", t_start, "requires 0 < t_start < t_end")
        decades = math.log10(t_end / t_start)
        count = max(2, int(math.ceil(decades * per_decade)) + 1)
        points = tuple(float(t) for t in np.geomspace(t_start, t_end, count))
        return cls(t_end=t_end, checkpoints=points, **kwargs)

    def refined(self, factor: float) -> "TimeSchedule":
        """Same checkpoints with every step divided by factor^2.

        Implicit Euler is first order in time, so halving dr only pays off
        at second order when dt shrinks with dr^2.
        """
        if not factor >= 1:
            raise ParameterError("factor", factor, "refinement factor must be >= 1")
        shrink = 1.0 / factor ** 2
        return dataclasses.replace(self, dt_initial=self.dt_initial * shrink,
                                   dt_max=self.dt_max * shrink, growth=self.growth * shrink)

    def step_size(self, t: float) -> float:
        return min(max(self.growth * t, self.dt_initial), self.dt_max)

    def steps(self, t_start: float = 0.0) -> Iterator[Tuple[float, float, bool]]:
        """Yield (t, t_next, lands_on_checkpoint) until t_end."""
        t = t_start
        for target in self.checkpoints:
            if target <= t:
                continue
            while t < target:
                t_next = t + self.step_size(t)
                landing = t_next >= target * (1.0 - 1e-12)
                if landing:
                    t_next = target
                yield t, t_next, landing
                t = t_next


def bump_profile(r, center: float = 0.0, width: float = 1.0, height: float = 1.0):
    """Compactly supported C^1 bump, height * (1 - ((r - c)/w)^2)_+^2."""
    x = (np.asarray(r, dtype=float) - center) / width
    return height * np.clip(1.0 - x ** 2, 0.0, None) ** 2


def cap(u, h: float):
    """Datum truncated from above, u ^ h."""
    if math.isinf(h):
        return np.asarray(u, dtype=float).copy()
    return np.minimum(u, h)


def sample_profile(source: ProfileSource, grid: Grid) -> np.ndarray:
    """Evaluate a datum on the grid cell centres."""
    if callable(source):
        values = np.asarray(source(grid.centers), dtype=float)
    else:
        values = np.asarray(source, dtype=float)
    if values.shape != grid.centers.shape:
        raise ParameterError("profile", values.shape, f"expected shape {grid.centers.shape}")
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ParameterError("profile", "u0", "must be finite and nonnegative")
    return values.copy()
