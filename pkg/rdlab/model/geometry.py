"""Radially symmetric model geometries, weight families and the radial grid."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special

from .exceptions import GeometryError

GEOMETRY_KINDS = ("euclidean", "hyperbolic")
WEIGHT_KINDS = ("unit", "inverse_square", "integrable")

# Per-cell quadrature order for volumes and measure weights.
QUADRATURE_ORDER = 5


def unit_sphere_area(dimension: int) -> float:
    """Area of the unit (N-1)-sphere in R^N."""
    return 2.0 * math.pi ** (dimension / 2.0) / special.gamma(dimension / 2.0)


def _check_radius(r, allow_zero: bool = True):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or (not allow_zero and np.any(r == 0.0)):
        raise GeometryError(
            f"radius must be {'non-negative' if allow_zero else 'positive'}, got {r!r}",
            value=r,
        )
    return r


def _as_output(value, like):
    """Return a Python float for scalar input, an array otherwise."""
    if np.ndim(like) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class RadialGeometry:
    """Rotationally symmetric model manifold described by its sphere-area profile.

    Args:
        dimension: Space dimension N (at least 3)
        kind: 'euclidean' or 'hyperbolic'
        kappa: Curvature magnitude for the hyperbolic kind
    """

    dimension: int
    kind: str = "euclidean"
    kappa: float = 1.0

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 3:
            raise GeometryError(f"dimension must be an integer >= 3, got {self.dimension}",
                                value=self.dimension)
        if self.kind not in GEOMETRY_KINDS:
            raise GeometryError(f"unknown geometry kind '{self.kind}'", value=self.kind)
        if self.kind == "hyperbolic" and not self.kappa > 0.0:
            raise GeometryError(f"hyperbolic curvature must be positive, got {self.kappa}",
                                value=self.kappa)

    @property
    def omega(self) -> float:
        return unit_sphere_area(self.dimension)

    @property
    def label(self) -> str:
        if self.kind == "hyperbolic":
            return f"hyperbolic(kappa={self.kappa:g}, N={self.dimension})"
        return f"euclidean(N={self.dimension})"

    def sphere_area(self, r):
        """Surface measure S(r) of the geodesic sphere of radius r."""
        radius = _check_radius(r)
        n1 = self.dimension - 1
        if self.kind == "euclidean":
            area = self.omega * radius ** n1
        else:
            k = math.sqrt(self.kappa)
            area = self.omega * (np.sinh(k * radius) / k) ** n1
        return _as_output(area, r)

    def sphere_area_derivative(self, r):
        """Radial derivative S'(r)."""
        radius = _check_radius(r)
        n1 = self.dimension - 1
        if self.kind == "euclidean":
            value = self.omega * n1 * radius ** (n1 - 1)
        else:
            k = math.sqrt(self.kappa)
            value = self.omega * n1 * (np.sinh(k * radius) / k) ** (n1 - 1) * np.cosh(k * radius)
        return _as_output(value, r)

    def drift_coefficient(self, r):
        """S'(r)/S(r), the first-order coefficient of the radial Laplacian."""
        radius = _check_radius(r, allow_zero=False)
        n1 = self.dimension - 1
        if self.kind == "euclidean":
            value = n1 / radius
        else:
            k = math.sqrt(self.kappa)
            value = n1 * k / np.tanh(k * radius)
        return _as_output(value, r)


def sphere_area(geom: RadialGeometry, r):
    return geom.sphere_area(r)


def drift_coefficient(geom: RadialGeometry, r):
    return geom.drift_coefficient(r)


@dataclass(frozen=True)
class WeightEnvelope:
    """Constants bracketing 1/rho: k1 r^2 <= 1/rho <= k2 r^2 outside B_e, rho1 <= 1/rho <= rho2 inside."""

    k1: float
    k2: float
    rho1: float
    rho2: float

    def as_dict(self):
        return {"k1": self.k1, "k2": self.k2, "rho1": self.rho1, "rho2": self.rho2}


@dataclass(frozen=True)
class Weight:
    """Radial density rho(r) entering the weighted equation rho u_t = Lap u^m + rho u^p.

    Args:
        kind: 'unit', 'inverse_square' or 'integrable'
        scale: Length scale s of inverse_square, rho = s^2/(r^2 + s^2)
        exponent: Decay a of integrable, rho = (1 + r^2)^(-a/2)
    """

    kind: str = "unit"
    scale: float = math.e
    exponent: float = 4.0

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise GeometryError(f"unknown weight kind '{self.kind}'", value=self.kind)
        if self.kind == "inverse_square" and not self.scale > 0.0:
            raise GeometryError(f"inverse_square scale must be positive, got {self.scale}",
                                value=self.scale)
        if self.kind == "integrable" and not self.exponent > 0.0:
            raise GeometryError(f"integrable exponent must be positive, got {self.exponent}",
                                value=self.exponent)

    def evaluate(self, r):
        radius = _check_radius(r)
        if self.kind == "unit":
            value = np.ones_like(radius)
        elif self.kind == "inverse_square":
            s2 = self.scale ** 2
            value = s2 / (radius ** 2 + s2)
        else:
            value = (1.0 + radius ** 2) ** (-self.exponent / 2.0)
        return _as_output(value, r)

    @property
    def sup(self) -> float:
        """Supremum of rho; every family peaks at the origin with value 1."""
        return 1.0

    def is_integrable(self, dimension: int) -> bool:
        return self.kind == "integrable" and self.exponent > dimension

    def envelope(self) -> WeightEnvelope:
        """Envelope constants about the seam at r = e."""
        if self.kind != "inverse_square":
            raise GeometryError(f"weight kind '{self.kind}' has no quadratic envelope")
        s2 = self.scale ** 2
        e2 = math.e ** 2
        return WeightEnvelope(
            k1=1.0 / s2,
            k2=(e2 + s2) / (s2 * e2),
            rho1=1.0,
            rho2=(e2 + s2) / s2,
        )

    def total_mass(self, dimension: int, radius: float = math.inf) -> float:
        """Integral of rho over the Euclidean ball B_R in R^N."""
        if radius < 0:
            raise GeometryError(f"radius must be non-negative, got {radius}", value=radius)
        if radius == 0:
            return 0.0
        if math.isinf(radius) and not self.is_integrable(dimension):
            raise GeometryError(
                f"weight '{self.kind}' is not integrable over R^{dimension}", value=self.kind
            )
        omega = unit_sphere_area(dimension)
        if self.kind == "unit":
            return omega * radius ** dimension / dimension
        value, _ = integrate.quad(
            lambda r: self.evaluate(r) * r ** (dimension - 1),
            0.0,
            radius,
            epsabs=0.0,
            epsrel=1e-12,
            limit=200,
        )
        return omega * value


def weight_eval(w: Weight, r):
    return w.evaluate(r)


def weight_total_mass(w: Weight, dimension: int, radius: float = math.inf) -> float:
    return w.total_mass(dimension, radius)


@dataclass
class Grid:
    """Uniform cell-centred grid on [0, R] with geometric and weighted cell measures."""

    radius: float
    cells: int
    faces: np.ndarray
    centers: np.ndarray
    volumes: np.ndarray
    weights: np.ndarray

    @property
    def dr(self) -> float:
        return self.radius / self.cells

    @property
    def density(self) -> np.ndarray:
        """Cell-averaged rho, w_i / V_i."""
        return self.weights / self.volumes

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def restrict(self, cells: int) -> "Grid":
        """Grid of the first `cells` cells, i.e. the nested smaller ball."""
        if not 0 < cells <= self.cells:
            raise GeometryError(f"cannot restrict {self.cells} cells to {cells}")
        return Grid(
            radius=float(self.faces[cells]),
            cells=cells,
            faces=self.faces[: cells + 1].copy(),
            centers=self.centers[:cells].copy(),
            volumes=self.volumes[:cells].copy(),
            weights=self.weights[:cells].copy(),
        )

    @classmethod
    def build(cls, geometry: RadialGeometry, weight: Optional[Weight], radius: float,
              cells: int) -> "Grid":
        if not radius > 0:
            raise GeometryError(f"grid radius must be positive, got {radius}", value=radius)
        if cells < 2:
            raise GeometryError(f"grid needs at least 2 cells, got {cells}", value=cells)
        weight = weight or Weight()
        faces = np.linspace(0.0, radius, cells + 1)
        centers = 0.5 * (faces[:-1] + faces[1:])
        half = 0.5 * (faces[1:] - faces[:-1])

        nodes, node_weights = leggauss(QUADRATURE_ORDER)
        points = centers[:, None] + half[:, None] * nodes[None, :]
        area = geometry.sphere_area(points)
        volumes = half * (area @ node_weights)
        weights = half * ((area * weight.evaluate(points)) @ node_weights)

        if np.any(volumes <= 0) or np.any(weights <= 0):
            raise GeometryError("grid produced a non-positive cell measure")
        return cls(radius=float(radius), cells=int(cells), faces=faces, centers=centers,
                   volumes=volumes, weights=weights)
