"""Level-set data of a discrete profile: A_k, G_k(v) and g(k)."""

from dataclasses import dataclass

import numpy as np

from ..model.exceptions import ParameterError
from ..model.geometry import Grid
from .estimates import stampacchia_bound, weighted_stampacchia_bound


@dataclass
class StampacchiaInstance:
    """Piecewise-constant profile with per-cell measure.

    g(k) = sum (|v| - k)_+ mu is piecewise linear and non-increasing with slope
    -mu(A_k) between consecutive levels, and mu(A_k) is constant there, so the
    ratio g(k)/mu(A_k)^s only needs checking at k_bar and at the levels above it.
    """

    values: np.ndarray
    measure: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.measure = np.asarray(self.measure, dtype=float)
        if self.values.shape != self.measure.shape:
            raise ParameterError("measure", self.measure.shape,
                                 f"must match values shape {self.values.shape}")
        if np.any(self.measure <= 0):
            raise ParameterError("measure", "cells", "every cell measure must be positive")

    @classmethod
    def from_grid(cls, grid: Grid, values, weighted: bool = False) -> "StampacchiaInstance":
        return cls(values, grid.weights if weighted else grid.volumes)

    @property
    def total_measure(self) -> float:
        return float(np.sum(self.measure))

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values), initial=0.0))

    @property
    def l1_norm(self) -> float:
        return float(np.sum(self.measure * np.abs(self.values)))

    def level_set_measure(self, k: float) -> float:
        """mu(A_k), A_k = {|v| > k}."""
        return float(np.sum(self.measure[np.abs(self.values) > k]))

    def truncation_excess(self, k: float) -> np.ndarray:
        """G_k(v) = v - T_k(v)."""
        return self.values - np.clip(self.values, -k, k)

    def excess(self, k: float) -> float:
        """g(k) = integral of |G_k(v)|."""
        return float(np.sum(self.measure * np.abs(self.truncation_excess(k))))

    def levels(self, k_bar: float = 0.0) -> np.ndarray:
        magnitudes = np.unique(np.abs(self.values))
        return np.concatenate([[k_bar], magnitudes[magnitudes > k_bar]])

    def hypothesis_constant(self, s: float, k_bar: float = 0.0) -> float:
        """Smallest C with g(k) <= C mu(A_k)^s for every k >= k_bar."""
        if not s > 1:
            raise ParameterError("s", s, "must exceed 1")
        best = 0.0
        for k in self.levels(k_bar):
            area = self.level_set_measure(k)
            if area <= 0.0:
                continue
            best = max(best, self.excess(k) / area ** s)
        return best

    def satisfies(self, c: float, s: float, k_bar: float = 0.0) -> bool:
        return self.hypothesis_constant(s, k_bar) <= c

    def bound(self, s: float, k_bar: float = 0.0) -> float:
        """Stampacchia L^inf bound built from the instance's own hypothesis constant."""
        return stampacchia_bound(self.hypothesis_constant(s, k_bar), s, self.l1_norm, k_bar)

    def weighted_bound(self, s: float, rho_total: float) -> float:
        """Bound in terms of the total measure, with k_bar = 0."""
        return weighted_stampacchia_bound(self.hypothesis_constant(s), s, rho_total)
