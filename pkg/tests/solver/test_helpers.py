"""Helper methods for solver tests."""

import numpy as np

from rdlab.model.geometry import Grid, RadialGeometry, Weight
from rdlab.model.params import ModelParams, State, bump_profile
from rdlab.runtime.solver import discrete_laplacian, step


class SolverTestHelpers:
    """Helper class for solver test functions."""

    @staticmethod
    def euclidean_params(radius=5.0, cells=100, **changes):
        """Desk-scale m = 2, p = 1.5 problem on the flat three-dimensional ball."""
        options = dict(m=2.0, p=1.5, geometry=RadialGeometry(3), radius=radius, cells=cells)
        options.update(changes)
        return ModelParams(**options)

    @staticmethod
    def hyperbolic_params(radius=5.0, cells=100, **changes):
        options = dict(m=2.0, p=1.5, geometry=RadialGeometry(3, "hyperbolic"), radius=radius,
                       cells=cells, weight=Weight())
        options.update(changes)
        return ModelParams(**options)

    @staticmethod
    def bump(width=1.0, height=1.0):
        return lambda r: bump_profile(r, 0.0, width, height)

    @staticmethod
    def barenblatt(r, t, C=1.0):
        """m = 2, N = 3 Barenblatt profile t^(-3/5) (C - r^2 t^(-2/5) / 20)_+."""
        r = np.asarray(r, dtype=float)
        return t ** -0.6 * np.clip(C - r ** 2 * t ** -0.4 / 20.0, 0.0, None)

    @staticmethod
    def weighted_mass(grid, u):
        return float(np.sum(grid.weights * u))

    @staticmethod
    def gaussian_laplacian(geometry, r):
        """v'' + (S'/S) v' for v = exp(-r^2)."""
        r = np.asarray(r, dtype=float)
        return (4.0 * r ** 2 - 2.0 - 2.0 * r * geometry.drift_coefficient(r)) * np.exp(-r ** 2)

    @staticmethod
    def laplacian_error(geometry, radius, cells):
        """Largest interior error of the discrete Laplacian on exp(-r^2)."""
        grid = Grid.build(geometry, None, radius, cells)
        values = discrete_laplacian(grid, geometry, np.exp(-grid.centers ** 2))
        exact = SolverTestHelpers.gaussian_laplacian(geometry, grid.centers)
        return float(np.max(np.abs(values - exact)[:-1]))

    @staticmethod
    def one_and_two_half_steps(params, u, dt):
        """Gap between one step of size dt and two of size dt/2."""
        grid = params.build_grid()
        whole = step(params, State(0.0, u), dt, grid)
        halves = step(params, step(params, State(0.0, u), 0.5 * dt, grid), 0.5 * dt, grid)
        return float(np.max(np.abs(whole.u - halves.u)))
