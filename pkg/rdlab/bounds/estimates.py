"""Closed-form constants and bounds: L^q growth, smoothing, Stampacchia and elliptic estimates."""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..model.exceptions import ParameterError
from ..model.params import ModelParams, State
from ..model.geometry import Grid
from ..runtime.solver import DiffusionOperator


def _require_exponents(m: float, p: float):
    if not 1.0 < p < m:
        raise ParameterError("(m, p)", (m, p), "requires 1 < p < m")


def _require_time(t: float):
    if not t > 0:
        raise ParameterError("t", t, "must be positive")


def critical_exponent(dimension: int) -> float:
    """Sobolev exponent 2* = 2N/(N-2)."""
    return 2.0 * dimension / (dimension - 2.0)


def stampacchia_exponent(dimension: int, l: float = math.inf) -> float:
    """s = 1 + 2/N - 1/l; l = inf gives the weighted exponent 1 + 2/N."""
    return 1.0 + 2.0 / dimension - (0.0 if math.isinf(l) else 1.0 / l)


# -- L^q growth -------------------------------------------------------------

def young_constant(eps: float, m: float, p: float) -> float:
    """C(eps) = ((1/eps)(p-1)/(m-1))^((p-1)/(m-p))."""
    _require_exponents(m, p)
    if not eps > 0:
        raise ParameterError("eps", eps, "must be positive")
    return ((p - 1.0) / ((m - 1.0) * eps)) ** ((p - 1.0) / (m - p))


def young_split(x: float, eps: float, m: float, p: float, q: float) -> Tuple[float, float]:
    """(x^(p+q-1), eps x^(m+q-1) + C(eps) x^q); the first never exceeds the second."""
    if not q > 1:
        raise ParameterError("q", q, "must exceed 1")
    if x < 0:
        raise ParameterError("x", x, "must be nonnegative")
    c = young_constant(eps, m, p)
    if x == 0:
        return 0.0, 0.0
    return x ** (p + q - 1.0), eps * x ** (m + q - 1.0) + c * x ** q


def young_threshold(q: float, m: float, c_p: float) -> float:
    """Upper end of the admissible eps window, 4m(q-1) C_p^2 / (m+q-1)^2."""
    return 4.0 * m * (q - 1.0) * c_p ** 2 / (m + q - 1.0) ** 2


def cq_constant(q: float, m: float, p: float, c_p: float) -> float:
    """Growth rate C(q) with eps fixed at half the admissible threshold."""
    if not q > 1:
        raise ParameterError("q", q, "must exceed 1")
    if not c_p > 0:
        raise ParameterError("C_p", c_p, "must be positive")
    eps = 0.5 * young_threshold(q, m, c_p)
    return q * young_constant(eps, m, p)


def lq_growth_bound(t: float, norm0: float, rate: float) -> float:
    """e^(C(q) t) ||u0||_q."""
    return math.exp(rate * t) * norm0


# -- smoothing --------------------------------------------------------------

@dataclass(frozen=True)
class SmoothingExponents:
    reaction: float
    diffusion: float
    transient: float


def smoothing_exponents(m: float, p: float, dimension: int) -> SmoothingExponents:
    n = float(dimension)
    return SmoothingExponents(
        reaction=2.0 * m / (2.0 * m + n * (m - p)),
        diffusion=2.0 * m / (2.0 * m + n * (m - 1.0)),
        transient=n / (2.0 * m + n * (m - 1.0)),
    )


def _gamma_factor(m: float, r: float, dimension: int, c_s: float) -> float:
    n = float(dimension)
    a = r * n / (m * (n + 2.0))
    outer = (1.0 - a) ** (n / (m * (n + 2.0)))
    inner = (a ** a * 2.0 ** (2.0 * m * (1.0 + 2.0 / n))
             * ((n + 2.0) / n) ** ((n + 2.0) / n) / c_s ** 2)
    return outer * 2.0 * inner ** (n / (2.0 * m + n * (m - r)))


def _gamma_factor_log(m: float, r: float, dimension: int, c_s: float) -> float:
    n = float(dimension)
    a = r * n / (m * (n + 2.0))
    log_inner = (a * math.log(a) + 2.0 * m * (1.0 + 2.0 / n) * math.log(2.0)
                 + (n + 2.0) / n * math.log((n + 2.0) / n) - 2.0 * math.log(c_s))
    log_value = (n / (m * (n + 2.0)) * math.log1p(-a) + math.log(2.0)
                 + n / (2.0 * m + n * (m - r)) * log_inner)
    return math.exp(log_value)


def gamma_constants(m: float, p: float, dimension: int, c_s: float,
                    log_domain: bool = False) -> Tuple[float, float, float]:
    """(Gamma1, Gamma2, Gamma) of the L^m -> L^inf smoothing estimate."""
    _require_exponents(m, p)
    if dimension < 3:
        raise ParameterError("N", dimension, "must be at least 3")
    if not c_s > 0:
        raise ParameterError("C_s", c_s, "must be positive")
    factor = _gamma_factor_log if log_domain else _gamma_factor
    g1 = factor(m, p, dimension, c_s)
    g2 = factor(m, 1.0, dimension, c_s)
    return g1, g2, max(g1, g2)


def smoothing_bound(t: float, u0_m_norm: float, m: float, p: float, dimension: int,
                    gamma: float, rate: float) -> float:
    """Gamma {[e^(Ct) A]^a1 + [e^(Ct) A]^a2 [1/((m-1)t)]^a3} with A = ||u0||_m."""
    _require_time(t)
    _require_exponents(m, p)
    if u0_m_norm == 0:
        return 0.0
    ex = smoothing_exponents(m, p, dimension)
    grown = math.exp(rate * t) * u0_m_norm
    return gamma * (grown ** ex.reaction
                    + grown ** ex.diffusion * (1.0 / ((m - 1.0) * t)) ** ex.transient)


def fit_smoothing_constants(times: Sequence[float], linf: Sequence[float], u0_m_norm: float,
                            m: float, p: float, dimension: int, rate: float) -> Tuple[float, float]:
    """Least-squares (c1, c2) so that linf ~ c1 [e^(Ct)A]^a1 + c2 [e^(Ct)A]^a2 t^(-a3)."""
    ex = smoothing_exponents(m, p, dimension)
    t = np.asarray(times, dtype=float)
    grown = np.exp(rate * t) * u0_m_norm
    design = np.column_stack([
        grown ** ex.reaction,
        grown ** ex.diffusion * (1.0 / ((m - 1.0) * t)) ** ex.transient,
    ])
    coefficients, *_ = np.linalg.lstsq(design, np.asarray(linf, dtype=float), rcond=None)
    return float(coefficients[0]), float(coefficients[1])


# -- Stampacchia and elliptic bounds ---------------------------------------

def stampacchia_bound(c: float, s: float, l1_norm: float, k_bar: float = 0.0) -> float:
    """C^(1/s) s/(s-1) ||v||_1^(1-1/s) + k_bar."""
    if not s > 1:
        raise ParameterError("s", s, "must exceed 1")
    return c ** (1.0 / s) * s / (s - 1.0) * l1_norm ** (1.0 - 1.0 / s) + k_bar


def weighted_stampacchia_bound(c: float, s: float, rho_total: float) -> float:
    """C (s/(s-1))^s ||rho||_1^(s-1)."""
    if not s > 1:
        raise ParameterError("s", s, "must exceed 1")
    return c * (s / (s - 1.0)) ** s * rho_total ** (s - 1.0)


def default_auxiliary_exponent(dimension: int, m1: float, m2: float) -> float:
    """Midpoint of (N/2, min(m1, m2))."""
    return 0.5 * (dimension / 2.0 + min(m1, m2))


def _require_window(dimension: int, m1: float, m2: float, l: Optional[float] = None):
    half = dimension / 2.0
    if not (m1 > half and m2 > half):
        raise ParameterError("(m1, m2)", (m1, m2), f"both must exceed N/2 = {half:g}")
    if l is not None and not half < l < min(m1, m2):
        raise ParameterError("l", l, f"requires {half:g} < l < {min(m1, m2):g}")


def elliptic_linf_bound(f1_norm: float, f2_norm: float, m1: float, m2: float, dimension: int,
                        c_s: float, v_l1: float, k_bar: float, l: Optional[float] = None) -> float:
    """L^inf bound for -Lap v <= f1 + f2 on a ball, uniform in the ball's measure."""
    if l is None:
        _require_window(dimension, m1, m2)
        l = default_auxiliary_exponent(dimension, m1, m2)
    _require_window(dimension, m1, m2, l)
    if not k_bar > 0:
        raise ParameterError("k_bar", k_bar, "must be positive")
    s = stampacchia_exponent(dimension, l)
    base = (s / (s - 1.0)) ** s / c_s ** 2
    total = 0.0
    for norm, mi in ((f1_norm, m1), (f2_norm, m2)):
        power = 1.0 / l - 1.0 / mi
        c_bar = base * (2.0 / k_bar) ** power
        total += c_bar * v_l1 ** power * norm
    return total ** (1.0 / s) * v_l1 ** ((s - 1.0) / s) + k_bar


def weighted_elliptic_constants(m1: float, m2: float, dimension: int, c_s: float,
                                rho_total: float) -> Tuple[float, float]:
    _require_window(dimension, m1, m2)
    s = stampacchia_exponent(dimension)
    base = (s / (s - 1.0)) ** s / c_s ** 2
    return (base * rho_total ** (2.0 / dimension - 1.0 / m1),
            base * rho_total ** (2.0 / dimension - 1.0 / m2))


def weighted_elliptic_bound(f1_norm_rho: float, f2_norm_rho: float, m1: float, m2: float,
                            dimension: int, c_s: float, rho_total: float) -> float:
    """C1 ||f1||_{m1,rho} + C2 ||f2||_{m2,rho} for an integrable weight."""
    if not (rho_total > 0 and math.isfinite(rho_total)):
        raise ParameterError("rho_total", rho_total, "must be finite and positive")
    c1, c2 = weighted_elliptic_constants(m1, m2, dimension, c_s, rho_total)
    return c1 * f1_norm_rho + c2 * f2_norm_rho


# -- integrable weights -----------------------------------------------------

def absolute_bound(t: float, m: float, c_abs: float) -> float:
    """C {1 + [1/((m-1)t)]^(1/(m-1))}, independent of the datum."""
    _require_time(t)
    if not m > 1:
        raise ParameterError("m", m, "must exceed 1")
    return c_abs * (1.0 + (1.0 / ((m - 1.0) * t)) ** (1.0 / (m - 1.0)))


def absolute_constant(m: float, p: float, dimension: int, c_s: float, rho_total: float) -> float:
    """Datum-independent constant of the integrable-weight bound."""
    _require_exponents(m, p)
    s = stampacchia_exponent(dimension)
    c1 = (s / (s - 1.0)) ** s / c_s ** 2 * rho_total ** (2.0 / dimension)

    def branch(r: float) -> float:
        ratio = r / m
        head = (2.0 * ratio ** (r / (m - r)) * (1.0 - ratio)) ** (1.0 / m)
        power = m * r / (m - r)
        return head * 4.0 ** power * c1 ** power

    return max(branch(p), branch(1.0))


# -- Aronson-Benilan ---------------------------------------------------------

@dataclass
class AronsonBenilanResidual:
    """Positive part of -(1/rho)L(u^m) - u^p - u/((m-1)t): its max and measure-weighted mean."""

    maximum: float
    mean: float

    def as_dict(self) -> Dict[str, float]:
        return {"max": self.maximum, "mean": self.mean}


def aronson_benilan_residual(params: ModelParams, state: State,
                             grid: Optional[Grid] = None) -> AronsonBenilanResidual:
    _require_time(state.t)
    grid = grid or params.build_grid()
    operator = DiffusionOperator(grid, params.geometry)
    u = state.u
    minus_lap = -operator.apply(u ** params.m) / grid.weights
    rhs = u / ((params.m - 1.0) * state.t)
    if params.reaction:
        rhs = rhs + u ** params.p
    # interior cells only; the last cell feels the Dirichlet face
    positive = np.maximum(minus_lap - rhs, 0.0)[:-1]
    weights = grid.weights[:-1]
    total = float(np.sum(weights))
    return AronsonBenilanResidual(
        maximum=float(np.max(positive, initial=0.0)),
        mean=float(np.sum(weights * positive) / total) if total > 0 else 0.0,
    )


@dataclass(frozen=True)
class BoundConstants:
    """Every constant the estimates need for one (m, p, N) setting."""

    dimension: int
    m: float
    p: float
    c_p: float
    c_s: float
    l: Optional[float] = None

    @property
    def critical_exponent(self) -> float:
        return critical_exponent(self.dimension)

    @property
    def s(self) -> float:
        return stampacchia_exponent(self.dimension, math.inf if self.l is None else self.l)

    def rate(self, q: float) -> float:
        return cq_constant(q, self.m, self.p, self.c_p)

    @property
    def gammas(self) -> Tuple[float, float, float]:
        return gamma_constants(self.m, self.p, self.dimension, self.c_s)

    def smoothing(self, t: float, u0_m_norm: float) -> float:
        return smoothing_bound(t, u0_m_norm, self.m, self.p, self.dimension,
                               self.gammas[2], self.rate(self.m))

    def as_dict(self) -> Dict[str, float]:
        g1, g2, g = self.gammas
        return {
            "N": self.dimension, "m": self.m, "p": self.p, "C_p": self.c_p, "C_s": self.c_s,
            "2*": self.critical_exponent, "s": self.s, "Gamma1": g1, "Gamma2": g2,
            "Gamma": g, "C(m)": self.rate(self.m),
        }
