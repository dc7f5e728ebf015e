"""Poincare and Sobolev constants estimated from radial Rayleigh quotients."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import solveh_banded

from ..model.exceptions import EstimateError, GeometryError, ParameterError
from ..model.geometry import Grid, RadialGeometry, Weight
from ..bounds.estimates import critical_exponent
from .solver import DiffusionOperator

logger = logging.getLogger(__name__)

Profile = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


def euclidean_sobolev_constant(dimension: int) -> float:
    """Sharp constant S_N with S_N ||v||_{2*} <= ||grad v||_2 on R^N."""
    n = float(dimension)
    return math.sqrt(math.pi * n * (n - 2.0)) * (math.gamma(n / 2.0) / math.gamma(n)) ** (1.0 / n)


class RayleighProblem:
    """Discrete Dirichlet energy against a (weighted) L^2 mass on the ball B_R.

    The stiffness form is the unweighted gradient energy from the finite-volume
    fluxes; the mass form uses the rho-weighted cell measures, which pairs a
    weighted L^2 norm with an unweighted gradient norm.
    """

    def __init__(self, grid: Grid, geometry: RadialGeometry, weighted: bool = True):
        self.grid = grid
        self.geometry = geometry
        self.operator = DiffusionOperator(grid, geometry)
        self.mass = grid.weights if weighted else grid.volumes

    @classmethod
    def build(cls, geometry: RadialGeometry, weight: Optional[Weight], radius: float,
              cells: int) -> "RayleighProblem":
        return cls(Grid.build(geometry, weight, radius, cells), geometry)

    def profile(self, v: Profile) -> np.ndarray:
        values = np.asarray(v(self.grid.centers) if callable(v) else v, dtype=float)
        if values.shape != (self.grid.cells,):
            raise GeometryError(f"profile has {values.size} values, grid has {self.grid.cells} cells")
        return values

    def energy(self, v: np.ndarray) -> float:
        """Discrete ||grad v||_2^2 including the boundary face."""
        return float(-np.dot(v, self.operator.apply(v)))

    def mass_norm(self, v: np.ndarray) -> float:
        return float(np.dot(self.mass, v * v))

    def symmetric_bands(self) -> np.ndarray:
        """Upper banded form of M^(-1/2) K M^(-1/2)."""
        bands = self.operator.stiffness_bands()
        root = np.sqrt(self.mass)
        bands[1] = bands[1] / self.mass
        bands[0, 1:] = bands[0, 1:] / (root[:-1] * root[1:])
        return bands


def rayleigh_quotient(prob: RayleighProblem, v: Profile) -> float:
    values = prob.profile(v)
    denominator = prob.mass_norm(values)
    if denominator <= 0.0:
        raise ParameterError("v", "profile", "Rayleigh quotient of the zero profile")
    return prob.energy(values) / denominator


@dataclass
class PoincareEstimate:
    eigenvalue: float
    iterations: int
    residual: float
    eigenvector: np.ndarray = field(repr=False)

    @property
    def constant(self) -> float:
        """C_p = sqrt(lambda_1)."""
        return math.sqrt(self.eigenvalue)

    def as_dict(self):
        return {
            "lambda1": self.eigenvalue,
            "C_p": self.constant,
            "iterations": self.iterations,
            "residual": self.residual,
        }


def _symmetric_apply(bands: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = bands[1] * x
    out[:-1] += bands[0, 1:] * x[1:]
    out[1:] += bands[0, 1:] * x[:-1]
    return out


def poincare_estimate(geometry: RadialGeometry, weight: Optional[Weight], radius: float,
                      cells: int, tol: float = 1e-10, max_iter: int = 20000) -> PoincareEstimate:
    """Smallest generalized eigenvalue K x = lambda M x by inverse power iteration."""
    if cells < 100:
        raise ParameterError("cells", cells, "poincare estimate needs at least 100 cells")
    prob = RayleighProblem.build(geometry, weight, radius, cells)
    bands = prob.symmetric_bands()

    r = prob.grid.centers
    x = np.cos(0.5 * math.pi * r / radius) * np.sqrt(prob.mass)
    x /= np.linalg.norm(x)
    eigenvalue = math.inf
    residual = math.inf
    for iteration in range(1, max_iter + 1):
        y = solveh_banded(bands, x)
        x = y / np.linalg.norm(y)
        bx = _symmetric_apply(bands, x)
        previous, eigenvalue = eigenvalue, float(np.dot(x, bx))
        residual = float(np.linalg.norm(bx - eigenvalue * x)) / abs(eigenvalue)
        if residual <= tol:
            break
        # stagnation at round-off level
        if abs(previous - eigenvalue) <= 1e-15 * abs(eigenvalue) and residual <= 1e3 * tol:
            logger.debug("eigen-iteration stagnated at residual %.2e", residual)
            break
    else:
        raise EstimateError(f"inverse iteration residual {residual:.2e} above {tol:.0e}",
                            iterations=max_iter)

    vector = x / np.sqrt(prob.mass)
    logger.info("lambda1=%.10g on %s, R=%g (%d iterations)", eigenvalue, geometry.label,
                radius, iteration)
    return PoincareEstimate(eigenvalue=eigenvalue, iterations=iteration, residual=residual,
                            eigenvector=vector)


def aubin_talenti_family(grid: Grid, dimension: int, scales: Iterable[float]) -> List[np.ndarray]:
    """Truncated bubbles (l^2 + r^2)^(-(N-2)/2) - (l^2 + R^2)^(-(N-2)/2)."""
    power = -(dimension - 2.0) / 2.0
    r = grid.centers
    family = []
    for scale in scales:
        if not scale > 0:
            raise ParameterError("scale", scale, "bubble scale must be positive")
        family.append((scale ** 2 + r ** 2) ** power - (scale ** 2 + grid.radius ** 2) ** power)
    return family


@dataclass
class SobolevEstimate:
    """Smallest observed ||grad v||_2 / ||v||_{2*}; an upper bound for any admissible C_s."""

    upper_bound: float
    ratios: List[float]
    best_index: int

    def as_dict(self):
        return {"C_s_upper": self.upper_bound, "best_index": self.best_index,
                "ratios": list(self.ratios)}


def sobolev_ratio(prob: RayleighProblem, v: Profile) -> float:
    values = prob.profile(v)
    exponent = critical_exponent(prob.geometry.dimension)
    norm = float(np.sum(prob.grid.volumes * np.abs(values) ** exponent)) ** (1.0 / exponent)
    if norm <= 0.0:
        raise ParameterError("v", "profile", "Sobolev ratio of the zero profile")
    return math.sqrt(prob.energy(values)) / norm


def sobolev_estimate(geometry: RadialGeometry, radius: float, cells: int,
                     family: Optional[Sequence[Profile]] = None) -> SobolevEstimate:
    """Minimum Sobolev ratio over a family of radial profiles on the unweighted ball.

    Without an explicit family a log-spaced sweep of bubble scales is used.
    """
    grid = Grid.build(geometry, None, radius, cells)
    prob = RayleighProblem(grid, geometry, weighted=False)
    if family is None:
        scales = np.geomspace(10.0 * grid.dr, radius, 24)
        family = aubin_talenti_family(grid, geometry.dimension, scales)
    family = list(family)
    if not family:
        raise EstimateError("empty profile family for the Sobolev estimate")
    ratios = [sobolev_ratio(prob, v) for v in family]
    best = int(np.argmin(ratios))
    return SobolevEstimate(upper_bound=float(ratios[best]), ratios=ratios, best_index=best)


def weighted_sobolev_check(grid: Grid, weight: Weight, v: Profile, dimension: int):
    """Return (||v||_{2*,rho}, ||rho||_inf^(1/2*) ||v||_{2*}); the first never exceeds the second."""
    values = np.asarray(v(grid.centers) if callable(v) else v, dtype=float)
    exponent = critical_exponent(dimension)
    powered = np.abs(values) ** exponent
    weighted = float(np.sum(grid.weights * powered)) ** (1.0 / exponent)
    plain = float(np.sum(grid.volumes * powered)) ** (1.0 / exponent)
    return weighted, weight.sup ** (1.0 / exponent) * plain
