"""Monotone approximation ladder in truncation level k, ball radius R and datum cap h."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..model.exceptions import ParameterError
from ..model.params import ModelParams, TimeSchedule, cap
from .solver import solve

logger = logging.getLogger(__name__)


@dataclass
class RungComparison:
    """Largest amount by which the lower rung exceeds the upper one."""

    axis: str
    lower: float
    upper: float
    violation: float

    def as_dict(self):
        return {
            "axis": self.axis,
            "lower": _jsonable(self.lower),
            "upper": _jsonable(self.upper),
            "violation": self.violation,
        }


@dataclass
class MonotonicityReport:
    comparisons: List[RungComparison] = field(default_factory=list)

    @property
    def max_violation(self) -> float:
        if not self.comparisons:
            return 0.0
        return max(c.violation for c in self.comparisons)

    def violation(self, axis: str) -> float:
        values = [c.violation for c in self.comparisons if c.axis == axis]
        return max(values) if values else 0.0

    def passed(self, tolerance: float = 1e-8) -> bool:
        return self.max_violation <= tolerance

    def as_dict(self) -> Dict:
        return {
            "max_violation": self.max_violation,
            "by_axis": {axis: self.violation(axis) for axis in ("k", "R", "h")},
            "comparisons": [c.as_dict() for c in self.comparisons],
        }


def _jsonable(value: float):
    return None if math.isinf(value) else value


def _check_increasing(name: str, seq: Sequence[float]):
    for a, b in zip(seq, seq[1:]):
        if not a <= b:
            raise ParameterError(name, tuple(seq), "ladder sequence must be non-decreasing")


def _profiles(params: ModelParams, datum: Callable, schedule: TimeSchedule) -> Dict[float, np.ndarray]:
    trajectory = solve(params, datum, schedule, q_values=(), store_profiles=True)
    return trajectory.profiles


def _violation(lower: Dict[float, np.ndarray], upper: Dict[float, np.ndarray]) -> float:
    worst = 0.0
    for t, u_low in lower.items():
        # the upper rung may live on a larger ball; compare on the shared cells
        u_high = upper[t][: u_low.size]
        worst = max(worst, float(np.max(u_low - u_high, initial=0.0)))
    return worst


def ladder_check(params_base: ModelParams, u0: Callable[[np.ndarray], np.ndarray],
                 schedule: TimeSchedule, k_seq: Sequence[float] = (),
                 R_seq: Sequence[float] = (), h_seq: Sequence[float] = (),
                 ) -> MonotonicityReport:
    """Compare neighbouring rungs of the k, R and h ladders at every checkpoint.

    Args:
        params_base: Parameters shared by every rung; its cell size is kept
            fixed across the R ladder so smaller balls are nested cell sets
        u0: Datum as a function of radius
        schedule: Checkpoints shared by all rungs
        k_seq, R_seq, h_seq: Non-decreasing rung values (inf allowed for k, h)

    Returns:
        MonotonicityReport with one comparison per neighbouring pair
    """
    for name, seq in (("k_seq", k_seq), ("R_seq", R_seq), ("h_seq", h_seq)):
        _check_increasing(name, seq)

    report = MonotonicityReport()

    runs = [_profiles(params_base.replace(k_trunc=k), u0, schedule) for k in k_seq]
    for (k1, low), (k2, high) in zip(zip(k_seq, runs), zip(k_seq[1:], runs[1:])):
        report.comparisons.append(RungComparison("k", k1, k2, _violation(low, high)))

    dr = params_base.dr
    runs = []
    for radius in R_seq:
        cells = int(round(radius / dr))
        if not math.isclose(cells * dr, radius, rel_tol=1e-9):
            raise ParameterError("R_seq", radius, f"must be a multiple of the cell size {dr:g}")
        runs.append(_profiles(params_base.replace(radius=radius, cells=cells), u0, schedule))
    for (r1, low), (r2, high) in zip(zip(R_seq, runs), zip(R_seq[1:], runs[1:])):
        report.comparisons.append(RungComparison("R", r1, r2, _violation(low, high)))

    runs = [_profiles(params_base, _capped(u0, h), schedule) for h in h_seq]
    for (h1, low), (h2, high) in zip(zip(h_seq, runs), zip(h_seq[1:], runs[1:])):
        report.comparisons.append(RungComparison("h", h1, h2, _violation(low, high)))

    logger.info("ladder max violation %.3e over %d comparisons",
                report.max_violation, len(report.comparisons))
    return report


def _capped(u0: Callable, h: Optional[float]) -> Callable:
    level = math.inf if h is None else h
    return lambda r: cap(u0(r), level)
