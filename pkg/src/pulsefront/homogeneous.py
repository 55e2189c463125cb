"""Space-homogeneous dynamics in closed form.

Between two fires the dimensionless system reduces to a planar ODE whose
solution is explicit: the tree fraction follows the logistic curve and the
grass equation is linear after the substitution z = 1/(1 - v), leaving a
single weighted integral that is evaluated by adaptive quadrature. Composing
the fire impulse with that season flow gives the one-generation map acting on
end-of-season (pre-fire) states; its fixed points and triangular Jacobians
classify the homogeneous equilibria.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .savanna import (
    ConfigError,
    NormalizedParams,
    ThresholdReport,
    classify_eigenvalues,
)

__all__ = [
    "HomogeneousState",
    "StabilityVerdict",
    "logistic_exact",
    "log_mass_Iu",
    "v_exact",
    "season_map",
    "iterate_season_map",
    "vbar",
    "fixed_points",
    "thresholds",
    "jacobian_at",
    "stability",
    "classify",
]

# Absolute quadrature tolerance for the season-flow integral.
QUAD_ABS_TOL = 1e-10

# Inputs may sit this far outside the unit box (finite-difference probes,
# projection slack from the grid solver) and are still accepted.
DOMAIN_SLACK = 1e-3

# Finite-difference step for the one Jacobian entry without a closed form.
FD_STEP = 1e-6

EQUILIBRIUM_LABELS = ("extinction", "forest", "grassland")


@dataclass(frozen=True)
class HomogeneousState:
    """A spatially uniform state: tree fraction, cooperative grass deficit,
    and the generation it belongs to (sampled at season end, pre-fire)."""

    u: float
    v: float
    generation: int = 0


@dataclass(frozen=True)
class StabilityVerdict:
    label: str
    eigenvalues: tuple[float, float]
    verdict: str


def logistic_exact(u0: float, t: float) -> float:
    """Logistic growth from u0 after time t: u0 / (u0 + (1 - u0) e^{-t})."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    emt = math.exp(-t)
    return u0 / (u0 + (1.0 - u0) * emt)


def log_mass_Iu(u0: float, t: float) -> float:
    """exp of the time-integrated logistic solution: 1 + u0 (e^t - 1).

    This is exp(integral of u(s) ds from 0 to t) for u following
    :func:`logistic_exact` from u0.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return 1.0 + u0 * math.expm1(t)


def _flow_integral(u0: float, t: float, lam: float, gamma: float) -> float:
    """integral of e^{lam s} * (1 + u0 (e^s - 1))^(-lam gamma) over [0, t]."""
    if t == 0.0:
        return 0.0
    if u0 == 0.0 or gamma == 0.0:
        return math.expm1(lam * t) / lam
    lg = lam * gamma

    def integrand(s: float) -> float:
        return math.exp(lam * s) * (1.0 + u0 * math.expm1(s)) ** (-lg)

    value, _ = quad(integrand, 0.0, t, epsabs=QUAD_ABS_TOL, epsrel=1e-11, limit=200)
    return value


def v_exact(v0: float, u0: float, t: float, lam: float, gamma: float) -> float:
    """Grass-deficit component of the season flow, in closed form.

    Solves dv/dt = lam (1 - v)(gamma u - v) with u following the logistic
    curve from u0, via the substitution z = 1/(1 - v) which makes the
    equation linear. v0 = 1 is invariant; the remaining integral is evaluated
    by adaptive quadrature to 1e-10 absolute.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    one_minus = 1.0 - v0
    if one_minus == 0.0:
        return 1.0
    growth = math.exp(lam * t) * log_mass_Iu(u0, t) ** (-lam * gamma)
    integral = _flow_integral(u0, t, lam, gamma)
    return 1.0 - one_minus * growth / (1.0 + lam * one_minus * integral)


def vbar(params: NormalizedParams) -> float:
    """Pre-fire grass deficit of the grassland state: eta / ((1-eta)(e^{lam tau} - 1)).

    Lies in (0, 1) exactly when R0 = (1-eta) e^{lam tau} > 1; raises otherwise
    because the grassland state then does not exist.
    """
    R0 = (1.0 - params.eta) * math.exp(params.lam * params.tau)
    if not R0 > 1.0:
        raise ConfigError(
            f"grassland state undefined: R0 = {R0!r} <= 1 for these parameters"
        )
    return params.eta / ((1.0 - params.eta) * math.expm1(params.lam * params.tau))


def _check_pair(u: float, v: float, lo2: float, hi2: float, frame: str) -> None:
    if not (-DOMAIN_SLACK <= u <= 1.0 + DOMAIN_SLACK):
        raise ValueError(f"first component {u!r} outside [0, 1] ({frame} frame)")
    if not (lo2 - DOMAIN_SLACK <= v <= hi2 + DOMAIN_SLACK):
        raise ValueError(
            f"second component {v!r} outside [{lo2}, {hi2}] ({frame} frame)"
        )


def season_map(
    pair: tuple[float, float],
    params: NormalizedParams,
    frame: str = "cooperative",
) -> tuple[float, float]:
    """One generation of the homogeneous dynamics, end of season to end of season.

    The fire impulse acts on the pre-fire input state, then the closed-form
    season flow runs for time tau. Frames: "cooperative" (u, v) or "shifted"
    (u, q) with q = v - vbar.
    """
    u_end, second = pair
    if frame == "cooperative":
        v_end = second
        _check_pair(u_end, v_end, 0.0, 1.0, frame)
    elif frame == "shifted":
        vb = vbar(params)
        _check_pair(u_end, second, -vb, 1.0 - vb, frame)
        v_end = second + vb
    else:
        raise ValueError(f"unsupported frame for the homogeneous map: {frame!r}")

    alpha2 = params.alpha * params.alpha
    deficit = 1.0 - v_end
    w = deficit * deficit / (deficit * deficit + alpha2)
    psi = params.a_min + (params.a_max - params.a_min) * math.exp(-params.p * u_end)
    u0 = (1.0 - w * psi) * u_end
    v0 = (1.0 - params.eta) * v_end + params.eta

    u_next = logistic_exact(u0, params.tau)
    v_next = v_exact(v0, u0, params.tau, params.lam, params.gamma)
    if frame == "shifted":
        return u_next, v_next - vb
    return u_next, v_next


def iterate_season_map(
    state: HomogeneousState, params: NormalizedParams, n_generations: int
) -> HomogeneousState:
    """Apply the one-generation map n times (cooperative frame)."""
    u, v = state.u, state.v
    for _ in range(n_generations):
        u, v = season_map((u, v), params)
    return HomogeneousState(u=u, v=v, generation=state.generation + n_generations)


def thresholds(params: NormalizedParams) -> tuple[float, float, float]:
    """The three dimensionless thresholds (R0, R1, R2)."""
    one_minus_eta = 1.0 - params.eta
    R0 = one_minus_eta * math.exp(params.lam * params.tau)
    R1 = one_minus_eta * math.exp(params.lam * params.tau * (1.0 - params.gamma))
    if R0 > 1.0:
        vb = vbar(params)
        deficit = 1.0 - vb
        w0 = deficit * deficit / (deficit * deficit + params.alpha * params.alpha)
    else:
        w0 = 0.0
    R2 = (1.0 - w0 * params.a_max) * math.exp(params.tau)
    return R0, R1, R2


def fixed_points(params: NormalizedParams) -> tuple[tuple[str, tuple[float, float]], ...]:
    """Homogeneous equilibria in cooperative coordinates (pre-fire states).

    extinction (0, 1) and forest (1, 1) always exist; grassland (0, vbar)
    exists exactly when R0 > 1.
    """
    points: list[tuple[str, tuple[float, float]]] = [
        ("extinction", (0.0, 1.0)),
        ("forest", (1.0, 1.0)),
    ]
    R0 = (1.0 - params.eta) * math.exp(params.lam * params.tau)
    if R0 > 1.0:
        points.append(("grassland", (0.0, vbar(params))))
    return tuple(points)


def _season_map_shifted_unchecked(
    u: float, q: float, params: NormalizedParams, vb: float
) -> tuple[float, float]:
    # Finite-difference probes step slightly outside the box; the closed
    # forms are analytic there, so skip domain validation.
    v_end = q + vb
    alpha2 = params.alpha * params.alpha
    deficit = 1.0 - v_end
    w = deficit * deficit / (deficit * deficit + alpha2)
    psi = params.a_min + (params.a_max - params.a_min) * math.exp(-params.p * u)
    u0 = (1.0 - w * psi) * u
    v0 = (1.0 - params.eta) * v_end + params.eta
    u_next = logistic_exact(u0, params.tau)
    v_next = v_exact(v0, u0, params.tau, params.lam, params.gamma)
    return u_next, v_next - vb


def jacobian_at(label: str, params: NormalizedParams):
    """Jacobian of the one-generation map at a named equilibrium.

    Shifted coordinates (u, q = v - vbar). All three Jacobians are lower
    triangular, with closed-form entries except the off-diagonal at the
    grassland state, which is obtained by central differences (step 1e-6);
    eigenvalues are read off the diagonal.

    Returns (J, eigenvalues) with J a 2x2 array.
    """
    R0, R1, R2 = thresholds(params)
    exp_tau = math.exp(params.tau)
    if label == "extinction":
        J = np.array([[exp_tau, 0.0], [0.0, R0]])
    elif label == "forest":
        J = np.array([[1.0 / exp_tau, 0.0], [0.0, R1]])
    elif label == "grassland":
        if not R0 > 1.0:
            raise ConfigError("grassland state does not exist: R0 <= 1")
        vb = vbar(params)
        h = FD_STEP
        _, f2_plus = _season_map_shifted_unchecked(h, 0.0, params, vb)
        _, f2_minus = _season_map_shifted_unchecked(-h, 0.0, params, vb)
        J21 = (f2_plus - f2_minus) / (2.0 * h)
        J = np.array([[R2, 0.0], [J21, 1.0 / R0]])
    else:
        raise ValueError(f"unknown equilibrium label {label!r}")
    return J, (float(J[0, 0]), float(J[1, 1]))


def stability(params: NormalizedParams) -> tuple[StabilityVerdict, ...]:
    """Eigenvalues and verdict for each existing homogeneous equilibrium."""
    verdicts = []
    for label, _ in fixed_points(params):
        _, eigs = jacobian_at(label, params)
        verdicts.append(StabilityVerdict(label=label, eigenvalues=eigs, verdict=classify_eigenvalues(eigs)))
    return tuple(verdicts)


def classify(params: NormalizedParams) -> ThresholdReport:
    """Threshold report in normalized units (cooperative coordinates)."""
    R0, R1, R2 = thresholds(params)
    points = fixed_points(params)
    verdicts = stability(params)
    return ThresholdReport(
        units="normalized",
        R0=R0,
        R1=R1,
        R2=R2,
        grass_level=vbar(params) if R0 > 1.0 else float("nan"),
        equilibria=points,
        verdicts=tuple((sv.label, sv.verdict) for sv in verdicts),
    )
