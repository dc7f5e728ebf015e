"""Explicit infinite-time blow-up subsolutions and their feasibility certificates.

Two families are provided. On weighted Euclidean space the barrier is
C (T+t)^alpha [1 - s(r) (T+t)^(-beta) / a]_+^(1/(m-1)) where s(r) is log r
outside the ball of radius e and the quadratic (r^2 + e^2)/(2e^2) inside it.
On a model manifold the barrier is C (tau+t)^alpha [1 - (r/a)(tau+t)^(-beta)]_+^(1/(m-1)).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..model.exceptions import ParameterError
from ..model.geometry import RadialGeometry, Weight, WeightEnvelope

logger = logging.getLogger(__name__)

E = math.e
E2 = math.e ** 2
TARGETS = ("weighted-euclidean", "manifold")
# Below this value of F the barrier's derivatives are treated as singular.
FREE_BOUNDARY_TOL = 1e-9


def s_profile(r: float) -> Tuple[float, float]:
    """Value and radial derivative of the seam profile s(r)."""
    value, derivative, _ = profile_derivatives(r)
    return value, derivative


def profile_derivatives(r: float, piece: Optional[str] = None) -> Tuple[float, float, float]:
    """(s, s', s'') with the outer piece for r >= e and the inner piece below.

    `piece` forces 'inner' or 'outer' regardless of r, for seam checks.
    """
    if r < 0:
        raise ParameterError("r", r, "must be nonnegative")
    if piece is None:
        piece = "outer" if r >= E else "inner"
    if piece == "outer":
        return math.log(r), 1.0 / r, -1.0 / r ** 2
    if piece == "inner":
        return (r * r + E2) / (2.0 * E2), r / E2, 1.0 / E2
    raise ParameterError("piece", piece, "must be 'inner' or 'outer'")


@dataclass(frozen=True)
class BarrierParams:
    """Barrier constants. For the manifold target T plays the role of tau."""

    C: float
    a: float
    alpha: float
    beta: float
    T: float
    target: str = "weighted-euclidean"

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ParameterError("target", self.target, f"must be one of {TARGETS}")
        for name in ("C", "a", "T"):
            if not getattr(self, name) > 0:
                raise ParameterError(name, getattr(self, name), "must be positive")

    @classmethod
    def from_alpha(cls, C: float, a: float, alpha: float, T: float, m: float,
                   target: str = "weighted-euclidean") -> "BarrierParams":
        return cls(C=C, a=a, alpha=alpha, beta=balanced_beta(alpha, m), T=T, target=target)

    @property
    def tau(self) -> float:
        return self.T

    def as_dict(self):
        return {"C": self.C, "a": self.a, "alpha": self.alpha, "beta": self.beta,
                "T": self.T, "target": self.target}


def balanced_beta(alpha: float, m: float) -> float:
    """beta = (alpha (m-1) + 1) / 2."""
    return (alpha * (m - 1.0) + 1.0) / 2.0


def envelope_constant(m: float, p: float) -> float:
    """K = c^((m-1)/(p-1)) - c^((p+m-2)/(p-1)) with c = (m-1)/(p+m-2)."""
    if not 1.0 < p < m:
        raise ParameterError("(m, p)", (m, p), "requires 1 < p < m")
    c = (m - 1.0) / (p + m - 2.0)
    return c ** ((m - 1.0) / (p - 1.0)) - c ** ((p + m - 2.0) / (p - 1.0))


def envelope_polynomial(F, sigma: float, delta: float, gamma: float, m: float, p: float):
    """phi(F) = sigma F - delta - gamma F^((p+m-2)/(m-1))."""
    return sigma * F - delta - gamma * np.power(F, (p + m - 2.0) / (m - 1.0))


def envelope_maximizer(sigma: float, gamma: float, m: float, p: float) -> float:
    """Interior critical point F0 of phi; 0 when sigma <= 0."""
    if sigma <= 0:
        return 0.0
    return ((m - 1.0) / (p + m - 2.0) * sigma / gamma) ** ((m - 1.0) / (p - 1.0))


@dataclass
class BarrierEnvelope:
    t: float
    sigma: float
    delta: float
    gamma: float
    K: float
    F0: float
    phi_F0: float
    sigma0: float
    delta0: float

    def phi(self, F, m: float, p: float):
        return envelope_polynomial(F, self.sigma, self.delta, self.gamma, m, p)

    def psi(self, G, m: float, p: float):
        """Inner-ball polynomial sigma0 G - delta0 - gamma G^((p+m-2)/(m-1))."""
        return envelope_polynomial(G, self.sigma0, self.delta0, self.gamma, m, p)

    def as_dict(self):
        return {k: getattr(self, k) for k in
                ("t", "sigma", "delta", "gamma", "K", "F0", "phi_F0", "sigma0", "delta0")}


def envelope(t: float, bp: BarrierParams, m: float, p: float, weight_env: WeightEnvelope,
             dimension: int) -> BarrierEnvelope:
    """Time-dependent coefficients bounding the barrier residual from above."""
    if t < 0:
        raise ParameterError("t", t, "must be nonnegative")
    tau = bp.T + t
    alpha, beta = bp.alpha, bp.beta
    ratio = bp.C ** (m - 1.0) / bp.a
    decay = (alpha - beta / (m - 1.0)) * tau ** (alpha - 1.0)

    sigma = decay + ratio * (m / (m - 1.0)) * weight_env.k2 * (dimension - 2.0) * tau ** (m * alpha - beta)
    delta = (-(beta / (m - 1.0)) * tau ** (alpha - 1.0)
             + bp.C ** (m - 1.0) / bp.a ** 2 * (m / (m - 1.0) ** 2) * weight_env.k1
             * tau ** (m * alpha - 2.0 * beta))
    gamma = bp.C ** (p - 1.0) * tau ** (p * alpha)
    sigma0 = decay + weight_env.rho2 * (dimension / E2) * (m / (m - 1.0)) * ratio * tau ** (m * alpha - beta)
    delta0 = -(beta / (m - 1.0)) * tau ** (alpha - 1.0)

    F0 = envelope_maximizer(sigma, gamma, m, p)
    return BarrierEnvelope(
        t=t, sigma=sigma, delta=delta, gamma=gamma, K=envelope_constant(m, p), F0=F0,
        phi_F0=float(envelope_polynomial(F0, sigma, delta, gamma, m, p)),
        sigma0=sigma0, delta0=delta0,
    )


@dataclass
class ConditionResult:
    name: str
    passed: bool
    margin: float
    sampled: bool = False

    def as_dict(self):
        return {"name": self.name, "pass": self.passed, "margin": self.margin,
                "sampled": self.sampled}


@dataclass
class FeasibilityReport:
    conditions: List[ConditionResult] = field(default_factory=list)
    exponents: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self):
        return {"pass": self.passed, "conditions": [c.as_dict() for c in self.conditions],
                "exponents": dict(self.exponents)}


def default_time_grid() -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 141)])


def asymptotic_exponents(bp: BarrierParams, m: float, p: float) -> Dict[str, float]:
    """Leading large-t powers of sigma, delta and gamma."""
    alpha, beta = bp.alpha, bp.beta
    return {
        "sigma": max(alpha - 1.0, m * alpha - beta),
        "delta": max(alpha - 1.0, m * alpha - 2.0 * beta),
        "gamma": p * alpha,
    }


def validate_barrier(bp: BarrierParams, m: float, p: float, weight_env: WeightEnvelope,
                     t_grid: Optional[Sequence[float]] = None, dimension: int = 3) -> FeasibilityReport:
    """Check every feasibility condition; time-dependent ones on a sampled grid."""
    if not 1.0 < p < m:
        raise ParameterError("(m, p)", (m, p), "requires 1 < p < m")
    report = FeasibilityReport()
    conditions = report.conditions

    mismatch = abs(bp.beta - balanced_beta(bp.alpha, m))
    conditions.append(ConditionResult("beta_relation", mismatch <= 1e-12, -mismatch))
    upper = 1.0 / (m - 1.0)
    conditions.append(ConditionResult("alpha_window", 0.0 < bp.alpha < upper,
                                      min(bp.alpha, upper - bp.alpha)))
    window = bp.a / 2.0 - bp.T ** (-bp.beta)
    conditions.append(ConditionResult("time_window", window > 0.0, window))
    threshold = 2.0 * bp.beta * (m - 1.0) / (m * weight_env.k1)
    excess = bp.C ** (m - 1.0) / bp.a - threshold
    conditions.append(ConditionResult("coefficient_threshold", excess >= 0.0, excess))

    times = default_time_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    q1 = (p + m - 2.0) / (p - 1.0)
    q2 = (m - 1.0) / (p - 1.0)
    envelope_margin = math.inf
    maximizer_margin = math.inf
    inner_margin = math.inf
    for t in times:
        env = envelope(float(t), bp, m, p, weight_env, dimension)
        rhs = env.delta * env.gamma ** q2
        lhs = env.K * max(env.sigma, 0.0) ** q1
        envelope_margin = min(envelope_margin, (rhs - lhs) / max(abs(rhs), abs(lhs), 1e-300))
        maximizer_margin = min(maximizer_margin,
                               ((p + m - 2.0) * env.gamma - (m - 1.0) * env.sigma) / env.gamma)
        inner_lhs = 2.0 ** ((p + m - 2.0) / (m - 1.0)) * (env.sigma0 - env.delta0)
        inner_margin = min(inner_margin, (env.gamma - inner_lhs) / env.gamma)
    conditions.append(ConditionResult("envelope_maximum", envelope_margin >= 0.0,
                                      envelope_margin, sampled=True))
    conditions.append(ConditionResult("maximizer_in_range", maximizer_margin >= 0.0,
                                      maximizer_margin, sampled=True))
    conditions.append(ConditionResult("inner_ball", inner_margin >= 0.0, inner_margin,
                                      sampled=True))

    exps = asymptotic_exponents(bp, m, p)
    report.exponents = exps
    lead = exps["delta"] + q2 * exps["gamma"] - q1 * exps["sigma"]
    conditions.append(ConditionResult(
        "asymptotic_exponents", lead >= 0.0 and exps["sigma"] <= exps["gamma"],
        min(lead, exps["gamma"] - exps["sigma"]),
    ))
    for c in conditions:
        logger.debug("barrier condition %s: pass=%s margin=%.4g", c.name, c.passed, c.margin)
    return report


# -- weighted Euclidean subsolution ----------------------------------------

def _front(r: float, t: float, bp: BarrierParams, piece: Optional[str] = None):
    s, ds, d2s = profile_derivatives(r, piece)
    tau = bp.T + t
    shrink = tau ** (-bp.beta) / bp.a
    F = 1.0 - s * shrink
    return tau, F, -ds * shrink, -d2s * shrink, ds


def subsolution_eval(r: float, t: float, bp: BarrierParams, m: float) -> float:
    """C (T+t)^alpha [F]_+^(1/(m-1))."""
    tau, F, *_ = _front(r, t, bp)
    if F <= 0.0:
        return 0.0
    return bp.C * tau ** bp.alpha * F ** (1.0 / (m - 1.0))


def subsolution_profile(r: np.ndarray, t: float, bp: BarrierParams, m: float) -> np.ndarray:
    return np.array([subsolution_eval(float(x), t, bp, m) for x in np.asarray(r, dtype=float)])


def subsolution_support_radius(t: float, bp: BarrierParams) -> float:
    """Edge of the support: s(r) = a (T+t)^beta solved on the matching branch."""
    level = bp.a * (bp.T + t) ** bp.beta
    if level >= 1.0:
        return math.exp(level) if level < 700.0 else math.inf
    if level <= 0.5:
        return 0.0
    return E * math.sqrt(2.0 * level - 1.0)


def subsolution_flux(r: float, t: float, bp: BarrierParams, m: float,
                     piece: Optional[str] = None) -> float:
    """Radial derivative of w^m; `piece` selects the profile branch at the seam."""
    tau, F, F_r, _, _ = _front(r, t, bp, piece)
    if F <= 0.0:
        return 0.0
    return bp.C ** m * tau ** (m * bp.alpha) * (m / (m - 1.0)) * F ** (1.0 / (m - 1.0)) * F_r


def subsolution_residual(r: float, t: float, bp: BarrierParams, m: float, p: float,
                         weight: Weight, dimension: int = 3) -> float:
    """w_t - (1/rho) Lap w^m - w^p at a smooth point of the support."""
    tau, F, F_r, F_rr, ds = _front(r, t, bp)
    if F <= 0.0:
        return 0.0
    if F < FREE_BOUNDARY_TOL:
        raise ParameterError("F", F, "residual is singular at the free boundary")
    C, alpha, beta = bp.C, bp.alpha, bp.beta
    k = 1.0 / (m - 1.0)
    w = C * tau ** alpha * F ** k
    w_t = C * tau ** (alpha - 1.0) * (alpha * F ** k + beta * k * F ** (k - 1.0) * (1.0 - F))

    scale = C ** m * tau ** (m * alpha) * (m / (m - 1.0))
    flux = scale * F ** k * F_r
    second = scale * (k * F ** (k - 1.0) * F_r ** 2 + F ** k * F_rr)
    if r > 0:
        drift = (dimension - 1.0) / r * flux
    else:
        # s'(r)/r -> 1/e^2 at the pole
        drift = (dimension - 1.0) * scale * F ** k * (-(tau ** (-beta) / bp.a) / E2)
    laplacian = second + drift
    return w_t - laplacian / weight.evaluate(r) - w ** p


@dataclass
class ResidualSweep:
    samples: int
    max_residual: float
    counterexamples: int
    worst_point: Tuple[float, float]

    def as_dict(self):
        return {"samples": self.samples, "max_residual": self.max_residual,
                "counterexamples": self.counterexamples,
                "worst_point": {"r": self.worst_point[0], "t": self.worst_point[1]}}


def residual_sweep(bp: BarrierParams, m: float, p: float, weight: Weight, dimension: int = 3,
                   samples: int = 5000, t_max: float = 100.0, margin: float = 0.05,
                   tolerance: float = 1e-8) -> ResidualSweep:
    """Evaluate the residual on a deterministic lattice of (F or G, t) points.

    Half the points sit outside the ball of radius e, parametrised by
    F in [margin, 1 - margin]; the other half sit inside it, parametrised by
    the inner profile value G in [max(1/2, margin), 1 - margin].
    """
    per_region = max(samples // 2, 1)
    n_t = max(int(round(math.sqrt(per_region))), 1)
    n_x = max(per_region // n_t, 1)
    times = np.linspace(0.0, t_max, n_t)
    worst = (-math.inf, (0.0, 0.0))
    count = 0
    bad = 0
    for t in times:
        tau = bp.T + t
        reach = bp.a * tau ** bp.beta
        # outer region: s = log r = (1 - F) a tau^beta, and r >= e needs s >= 1
        f_high = min(1.0 - margin, 1.0 - 1.0 / reach)
        if f_high >= margin:
            for F in np.linspace(margin, f_high, n_x):
                r = math.exp((1.0 - F) * reach)
                value = subsolution_residual(r, float(t), bp, m, p, weight, dimension)
                count += 1
                bad += value > tolerance
                worst = max(worst, (value, (r, float(t))))
        for G in np.linspace(max(0.5, margin), 1.0 - margin, n_x):
            r = E * math.sqrt(2.0 * G - 1.0)
            value = subsolution_residual(r, float(t), bp, m, p, weight, dimension)
            count += 1
            bad += value > tolerance
            worst = max(worst, (value, (r, float(t))))
    logger.info("barrier residual sweep: %d samples, max %.4g, %d above %.0e",
                count, worst[0], bad, tolerance)
    return ResidualSweep(samples=count, max_residual=float(worst[0]),
                         counterexamples=int(bad), worst_point=worst[1])


# -- manifold barrier ------------------------------------------------------

def manifold_barrier_eval(r: float, t: float, bp: BarrierParams, m: float) -> float:
    """C zeta(t) [1 - (r/a) eta(t)]_+^(1/(m-1)) with zeta = (tau+t)^alpha, eta = (tau+t)^(-beta)."""
    if not 0.0 < bp.alpha < 1.0 / (m - 1.0):
        raise ParameterError("alpha", bp.alpha, f"must lie in (0, {1.0 / (m - 1.0):g})")
    if abs(bp.beta - balanced_beta(bp.alpha, m)) > 1e-12:
        raise ParameterError("beta", bp.beta, "must equal (alpha (m-1) + 1)/2")
    shifted = bp.tau + t
    F = 1.0 - (r / bp.a) * shifted ** (-bp.beta)
    if F <= 0.0:
        return 0.0
    return bp.C * shifted ** bp.alpha * F ** (1.0 / (m - 1.0))


def manifold_barrier_profile(r: np.ndarray, t: float, bp: BarrierParams, m: float) -> np.ndarray:
    return np.array([manifold_barrier_eval(float(x), t, bp, m) for x in np.asarray(r, dtype=float)])


def support_radius(t: float, bp: BarrierParams) -> float:
    """a (tau+t)^beta."""
    return bp.a * (bp.tau + t) ** bp.beta


def center_value(t: float, bp: BarrierParams) -> float:
    """C (tau+t)^alpha."""
    return bp.C * (bp.tau + t) ** bp.alpha


def manifold_barrier_residual(r: float, t: float, bp: BarrierParams, m: float, p: float,
                              geometry: RadialGeometry) -> float:
    """w_t - Lap w^m - w^p for the manifold barrier at r > 0 inside the support."""
    shifted = bp.tau + t
    eta = shifted ** (-bp.beta)
    F = 1.0 - (r / bp.a) * eta
    if F <= 0.0:
        return 0.0
    if F < FREE_BOUNDARY_TOL:
        raise ParameterError("F", F, "residual is singular at the free boundary")
    C, alpha, beta = bp.C, bp.alpha, bp.beta
    k = 1.0 / (m - 1.0)
    w = C * shifted ** alpha * F ** k
    w_t = C * shifted ** (alpha - 1.0) * (alpha * F ** k + beta * k * F ** (k - 1.0) * (1.0 - F))
    F_r = -eta / bp.a
    scale = C ** m * shifted ** (m * alpha) * (m / (m - 1.0))
    second = scale * k * F ** (k - 1.0) * F_r ** 2
    flux = scale * F ** k * F_r
    return w_t - (second + geometry.drift_coefficient(r) * flux) - w ** p


def manifold_margins(bp: BarrierParams, m: float, p: float, geometry: RadialGeometry,
                     times: Sequence[float], r_min: float = 1.0, margin: float = 0.05,
                     points: int = 50) -> Dict[str, float]:
    """Largest residual of the manifold barrier away from the pole and the front."""
    worst = -math.inf
    for t in times:
        edge = support_radius(float(t), bp)
        lo, hi = r_min, (1.0 - margin) * edge
        if hi <= lo:
            continue
        for r in np.linspace(lo, hi, points):
            worst = max(worst, manifold_barrier_residual(float(r), float(t), bp, m, p, geometry))
    return {"max_residual": worst, "r_min": r_min, "margin": margin}


def growth_exponent(times: Sequence[float], values: Sequence[float], shift: float = 0.0) -> float:
    """Least-squares slope of log(values) against log(shift + t)."""
    x = np.log(np.asarray(times, dtype=float) + shift)
    y = np.log(np.asarray(values, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
