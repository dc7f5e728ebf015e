"""Finite-volume implicit Euler solver for the truncated radial ball problem."""

import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded

from ..model.exceptions import GeometryError, ParameterError, SolverError
from ..model.geometry import Grid, RadialGeometry
from ..model.params import (
    ModelParams, NormRecord, ProfileSource, State, TimeSchedule, Trajectory, sample_profile,
)

logger = logging.getLogger(__name__)

# Added to m u^(m-1) in the Newton Jacobian; keeps it invertible where u = 0.
JACOBIAN_REGULARIZATION = 1e-12
NEWTON_TOLERANCE = 1e-12
NEWTON_MAX_ITER = 50


def truncate(x, k: float):
    """T_k: clamp to [-k, k]."""
    if not k > 0:
        raise ParameterError("k", k, "truncation level must be positive")
    if np.ndim(x) == 0:
        return float(min(max(x, -k), k))
    return np.clip(x, -k, k)


class DiffusionOperator:
    """Tridiagonal flux operator A with (A v)_i = S+ (v_{i+1}-v_i)/dr - S- (v_i-v_{i-1})/dr.

    The flux through r = 0 vanishes because S(0) = 0. At r = R the ghost
    value mirrors the last cell so that v = 0 on the boundary face, which
    gives the outflow term -2 S(R) v_last / dr. Dividing A v by the cell
    volumes V_i gives the radial Laplacian; dividing by the weighted cell
    measures w_i gives (1/rho) Lap.
    """

    def __init__(self, grid: Grid, geometry: RadialGeometry):
        self.grid = grid
        self.geometry = geometry
        conductance = geometry.sphere_area(grid.faces) / grid.dr
        # lower[i] couples cell i to i-1, upper[i] couples cell i to i+1
        self.lower = conductance[:-1].copy()
        self.upper = conductance[1:].copy()
        self.lower[0] = 0.0
        # ghost cell mirrors the last cell, so v = 0 sits on the face r = R
        self.boundary = 2.0 * conductance[-1]
        self.upper[-1] = 0.0
        self.diagonal = -(self.lower + self.upper)
        self.diagonal[-1] -= self.boundary

    @property
    def size(self) -> int:
        return self.grid.cells

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.size,):
            raise GeometryError(f"profile has shape {v.shape}, grid has {self.size} cells")
        out = self.diagonal * v
        out[:-1] += self.upper[:-1] * v[1:]
        out[1:] += self.lower[1:] * v[:-1]
        return out

    def stiffness_bands(self) -> np.ndarray:
        """Upper-form banded storage of the symmetric positive definite matrix -A."""
        bands = np.zeros((2, self.size))
        bands[0, 1:] = -self.upper[:-1]
        bands[1] = -self.diagonal
        return bands


def discrete_laplacian(grid: Grid, geometry: RadialGeometry, vals) -> np.ndarray:
    """Finite-volume radial Laplacian (1/V_i) (A v)_i with Dirichlet v = 0 at r = R."""
    vals = np.asarray(vals, dtype=float)
    if vals.shape != (grid.cells,):
        raise GeometryError(f"profile has {vals.size} values, grid has {grid.cells} cells")
    return DiffusionOperator(grid, geometry).apply(vals) / grid.volumes


def reaction_term(params: ModelParams, u: np.ndarray) -> np.ndarray:
    """T_k(u^p), or zero when the reaction is switched off."""
    if not params.reaction:
        return np.zeros_like(u)
    source = u ** params.p
    if math.isinf(params.k_trunc):
        return source
    return truncate(source, params.k_trunc)


def _implicit_euler(params: ModelParams, operator: DiffusionOperator, measure: np.ndarray,
                    u_old: np.ndarray, dt: float):
    """Newton iteration for u - dt (1/w) A(u^m) = u_old + dt T_k(u_old^p)."""
    m = params.m
    rhs = u_old + dt * reaction_term(params, u_old)
    scale = dt / measure
    u = rhs.copy()
    n = u.size
    ab = np.zeros((3, n))
    for iteration in range(1, NEWTON_MAX_ITER + 1):
        phi = u ** m
        residual = u - scale * operator.apply(phi) - rhs
        dphi = m * u ** (m - 1) + JACOBIAN_REGULARIZATION

        ab[0, 1:] = -scale[:-1] * operator.upper[:-1] * dphi[1:]
        ab[1] = 1.0 - scale * operator.diagonal * dphi
        ab[2, :-1] = -scale[1:] * operator.lower[1:] * dphi[:-1]

        try:
            delta = solve_banded((1, 1), ab, -residual)
        except (np.linalg.LinAlgError, ValueError) as exc:
            logger.debug("Newton linear solve failed at iteration %d: %s", iteration, exc)
            return u, False
        u = np.maximum(u + delta, 0.0)
        size = float(np.max(np.abs(delta))) if n else 0.0
        if not math.isfinite(size):
            return u, False
        if size <= NEWTON_TOLERANCE * max(1.0, float(np.max(u))):
            return u, True
    logger.debug("Newton did not converge in %d iterations (dt=%g)", NEWTON_MAX_ITER, dt)
    return u, False


def step(params: ModelParams, state: State, dt: float, grid: Optional[Grid] = None,
         operator: Optional[DiffusionOperator] = None, dt_min: float = 1e-14) -> State:
    """Advance one implicit-Euler step, halving the step on Newton failure."""
    if not dt > 0:
        raise ParameterError("dt", dt, "must be positive")
    grid = grid or params.build_grid()
    operator = operator or DiffusionOperator(grid, params.geometry)
    if state.u.shape != (grid.cells,):
        raise GeometryError(f"state has {state.u.size} values, grid has {grid.cells} cells")

    u_new, converged = _implicit_euler(params, operator, grid.weights, state.u, dt)
    if converged:
        return State(state.t + dt, u_new)
    half = 0.5 * dt
    if half < dt_min:
        raise SolverError(state.t, dt, "Newton iteration did not converge")
    logger.debug("halving step at t=%g: dt=%g -> %g", state.t, dt, half)
    middle = step(params, state, half, grid, operator, dt_min)
    return step(params, middle, half, grid, operator, dt_min)


def lq_norm(grid: Grid, state, q: float, geometric: bool = False) -> float:
    """L^q_rho norm (Sum w_i u_i^q)^(1/q); q = inf gives max_i u_i.

    With `geometric` the unweighted cell volumes are used instead of w_i.
    """
    u = state.u if isinstance(state, State) else np.asarray(state, dtype=float)
    if not q >= 1:
        raise ParameterError("q", q, "norm exponent must be >= 1 or inf")
    if u.shape != (grid.cells,):
        raise GeometryError(f"profile has {u.size} values, grid has {grid.cells} cells")
    magnitude = np.abs(u)
    if math.isinf(q):
        return float(np.max(magnitude)) if magnitude.size else 0.0
    measure = grid.volumes if geometric else grid.weights
    return float(np.sum(measure * magnitude ** q) ** (1.0 / q))


def front_radius(centers: np.ndarray, u: np.ndarray, threshold: float = 1e-10) -> float:
    """Largest cell centre where u exceeds threshold; 0 for a vanishing profile."""
    above = np.flatnonzero(np.asarray(u, dtype=float) > threshold)
    return float(centers[above[-1]]) if above.size else 0.0


def _record(params: ModelParams, grid: Grid, state: State, q_values: Sequence[float]) -> NormRecord:
    return NormRecord(
        t=state.t,
        l1=lq_norm(grid, state, 1.0),
        lm=lq_norm(grid, state, params.m),
        linf=lq_norm(grid, state, math.inf),
        lq={float(q): lq_norm(grid, state, q) for q in q_values},
    )


def solve(params: ModelParams, u0: ProfileSource, schedule: TimeSchedule,
          q_values: Iterable[float] = (2.0,), store_profiles: bool = False,
          t_start: float = 0.0, grid: Optional[Grid] = None) -> Trajectory:
    """Integrate from t_start to schedule.t_end recording norms at every checkpoint."""
    grid = grid or params.build_grid()
    operator = DiffusionOperator(grid, params.geometry)
    q_values = tuple(float(q) for q in q_values)
    state = State(t_start, sample_profile(u0, grid))

    trajectory = Trajectory(centers=grid.centers.copy())
    trajectory.append(_record(params, grid, state, q_values))
    if store_profiles:
        trajectory.profiles[state.t] = state.u.copy()

    logger.info("solving %s on R=%g with %d cells to t=%g", params.geometry.label,
                params.radius, grid.cells, schedule.t_end)
    for t, t_next, landing in schedule.steps(t_start):
        state = step(params, State(t, state.u), t_next - t, grid, operator, schedule.dt_min)
        # pin the clock to the scheduled value
        state = State(t_next, state.u)
        if not landing:
            continue
        trajectory.append(_record(params, grid, state, q_values))
        if store_profiles:
            trajectory.profiles[state.t] = state.u.copy()
        logger.debug("checkpoint t=%g linf=%g", state.t, trajectory.records[-1].linf)
    return trajectory
