"""Raw savanna tree-grass model: parameters, rainfall and fire response curves,
reduction to dimensionless form, and closed-form stability thresholds.

Biomasses are in t/ha, rates in 1/yr, rainfall in mm/yr. The dimensionless
system produced by :func:`normalize` measures tree and grass biomass as
fractions of their effective carrying capacities and runs on rescaled space
and time; :func:`scale_info` exposes the conversion factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "ConfigError",
    "SavannaParams",
    "NormalizedParams",
    "ScaleInfo",
    "ThresholdReport",
    "growth_rate",
    "carrying_capacity",
    "fire_intensity",
    "fire_mortality",
    "normalize",
    "scale_info",
    "thresholds_raw",
    "parse_config_text",
    "load_config",
    "format_config",
    "CONFIG_KEYS",
]

# Equilibria within this margin of an eigenvalue modulus of 1 are reported as
# nonhyperbolic rather than classified.
NONHYPERBOLIC_MARGIN = 1e-9

# Division by R - 1 in the effective carrying capacities blows up at R = 1;
# growth/loss ratios must clear 1 by at least this much.
MIN_RATIO_EXCESS = 1e-12


class ConfigError(ValueError):
    """Invalid parameter set or configuration file."""


@dataclass(frozen=True)
class SavannaParams:
    """Raw model parameters plus the scenario inputs (rainfall, fire period).

    The sigmoid inflection controls are named ``d_G_shape``/``d_T_shape``
    because the customary symbols collide with the diffusion coefficients;
    the diffusion coefficients are ``diff_T``/``diff_G`` (config keys
    ``d_T_diff``/``d_G_diff``).
    """

    c_G: float            # max grass carrying capacity, t/ha
    c_T: float            # max tree carrying capacity, t/ha
    b_G: float            # grass half-saturation rainfall, mm/yr
    b_T: float            # tree half-saturation rainfall, mm/yr
    a_G: float            # grass sigmoid steepness, 1/(mm/yr)
    a_T: float            # tree sigmoid steepness, 1/(mm/yr)
    d_G_shape: float      # grass sigmoid inflection control, dimensionless
    d_T_shape: float      # tree sigmoid inflection control, dimensionless
    gamma_G: float        # max grass growth rate, 1/yr
    gamma_T: float        # max tree growth rate, 1/yr
    delta_G: float        # grass loss rate, 1/yr
    delta_T: float        # tree loss rate, 1/yr
    eta: float            # grass fraction lost per fire, in [0, 1)
    lambda_fT_min: float  # min fire-induced tree mortality fraction
    lambda_fT_max: float  # max fire-induced tree mortality fraction
    p_T: float            # tree mortality shape, ha/t
    alpha_G: float        # grass biomass at half fire intensity, t/ha
    eta_TG: float         # tree-on-grass suppression, ha/(t yr)
    diff_T: float         # tree diffusion coefficient, space^2/yr
    diff_G: float         # grass diffusion coefficient, space^2/yr
    W: float              # mean annual rainfall, mm/yr
    tau_tilde: float      # fire return period, yr

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"parameter {f.name} must be a finite number, got {value!r}")
            if value < 0:
                raise ConfigError(f"parameter {f.name} must be nonnegative, got {value}")
        if not 0 <= self.eta < 1:
            raise ConfigError(f"eta must lie in [0, 1), got {self.eta}")
        if not 0 <= self.lambda_fT_min <= self.lambda_fT_max <= 1:
            raise ConfigError(
                "fire mortality bounds must satisfy 0 <= lambda_fT_min <= lambda_fT_max <= 1, "
                f"got ({self.lambda_fT_min}, {self.lambda_fT_max})"
            )
        if self.W <= 0:
            raise ConfigError(f"rainfall W must be positive, got {self.W}")
        if self.tau_tilde <= 0:
            raise ConfigError(f"fire period tau_tilde must be positive, got {self.tau_tilde}")


@dataclass(frozen=True)
class NormalizedParams:
    """Dimensionless parameter set of the rescaled system.

    ``lam`` is the grass growth rate relative to the tree growth rate,
    ``gamma`` the tree-on-grass suppression strength, ``tau`` the
    dimensionless fire period, ``alpha`` the half-intensity grass fraction,
    ``p`` the mortality shape against tree fraction, and ``a_min``/``a_max``
    the bounds of the fire-induced tree mortality fraction. Diffusion
    coefficients carry over unchanged because space and time rescale by the
    same factor.
    """

    lam: float
    gamma: float
    tau: float
    eta: float
    alpha: float
    p: float
    a_min: float
    a_max: float
    d_u: float
    d_v: float

    def __post_init__(self) -> None:
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ConfigError(f"lam must be positive, got {self.lam}")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if not 0 <= self.eta < 1:
            raise ConfigError(f"eta must lie in [0, 1), got {self.eta}")
        if not 0 < self.a_min <= self.a_max <= 1:
            raise ConfigError(
                f"mortality bounds must satisfy 0 < a_min <= a_max <= 1, "
                f"got ({self.a_min}, {self.a_max})"
            )
        for name in ("gamma", "alpha", "p", "d_u", "d_v"):
            value = getattr(self, name)
            if value < 0 or not math.isfinite(value):
                raise ConfigError(f"{name} must be finite and nonnegative, got {value}")


@dataclass(frozen=True)
class ScaleInfo:
    """Conversion factors between raw and dimensionless variables.

    tree biomass = K_T_prime * u, grass biomass = K_G_prime * V,
    raw time = t / time_factor, raw space = x / space_factor.
    """

    K_T_prime: float
    K_G_prime: float
    K_T_W: float
    K_G_W: float
    R_T: float
    R_G: float
    time_factor: float   # dimensionless time per year
    space_factor: float  # dimensionless length per raw length unit


@dataclass(frozen=True)
class ThresholdReport:
    """Stability thresholds, homogeneous equilibria, and verdicts.

    ``units`` is "raw" (biomasses in t/ha, grass level Gbar) or "normalized"
    (cooperative coordinates, grass level vbar). ``equilibria`` maps each
    existing state to its coordinate pair; ``verdicts`` to one of
    "LAS", "unstable", "nonhyperbolic".
    """

    units: str
    R0: float
    R1: float
    R2: float
    grass_level: float
    equilibria: tuple[tuple[str, tuple[float, float]], ...]
    verdicts: tuple[tuple[str, str], ...]

    def to_text(self) -> str:
        unit_name = "Gbar" if self.units == "raw" else "vbar"
        lines = [
            f"units = {self.units}",
            f"R0 = {self.R0!r}",
            f"R1 = {self.R1!r}",
            f"R2 = {self.R2!r}",
            f"{unit_name} = {self.grass_level!r}",
        ]
        verdict_by_label = dict(self.verdicts)
        for label, (x, y) in self.equilibria:
            lines.append(
                f"equilibrium {label} = ({x!r}, {y!r}) : {verdict_by_label[label]}"
            )
        return "\n".join(lines) + "\n"

    def to_csv_rows(self) -> list[tuple[str, str]]:
        unit_name = "Gbar" if self.units == "raw" else "vbar"
        rows = [
            ("units", self.units),
            ("R0", repr(self.R0)),
            ("R1", repr(self.R1)),
            ("R2", repr(self.R2)),
            (unit_name, repr(self.grass_level)),
        ]
        verdict_by_label = dict(self.verdicts)
        for label, (x, y) in self.equilibria:
            rows.append((f"{label}_1", repr(x)))
            rows.append((f"{label}_2", repr(y)))
            rows.append((f"{label}_verdict", verdict_by_label[label]))
        return rows


def growth_rate(gamma_max: float, b: float, W: float) -> float:
    """Rainfall-limited maximal growth rate, gamma_max * W / (b + W).

    Saturating in rainfall: approaches gamma_max as W grows, with
    half-saturation at W = b.
    """
    if W <= 0:
        raise ConfigError(f"rainfall W must be positive, got {W}")
    if b < 0:
        raise ConfigError(f"half-saturation b must be nonnegative, got {b}")
    return gamma_max * W / (b + W)


def carrying_capacity(c: float, d_shape: float, a: float, W: float) -> float:
    """Rainfall-dependent carrying capacity, c / (1 + d_shape * exp(-a W)).

    ``d_shape`` places the sigmoid inflection; zero collapses the curve to
    the constant c.
    """
    if c <= 0:
        raise ConfigError(f"maximal capacity c must be positive, got {c}")
    if d_shape < 0:
        raise ConfigError(f"shape parameter must be nonnegative, got {d_shape}")
    return c / (1.0 + d_shape * math.exp(-a * W))


def fire_intensity(G, alpha_G):
    """Fire intensity as a function of grass biomass, G^2 / (G^2 + alpha_G^2).

    Increasing from 0 to 1 with half intensity at G = alpha_G; the quadratic
    form has zero slope at zero biomass. Accepts scalars or arrays.
    """
    if alpha_G <= 0:
        raise ConfigError(f"alpha_G must be positive, got {alpha_G}")
    G2 = np.square(G)
    out = G2 / (G2 + alpha_G * alpha_G)
    return float(out) if np.isscalar(G) or getattr(G, "ndim", 0) == 0 else out


def fire_mortality(T, params: SavannaParams):
    """Fire-induced tree mortality fraction at tree biomass T.

    Decays from lambda_fT_max at T = 0 toward lambda_fT_min as trees grow
    tall enough to escape the flame zone. Accepts scalars or arrays.
    """
    lo, hi = params.lambda_fT_min, params.lambda_fT_max
    out = lo + (hi - lo) * np.exp(-params.p_T * np.asarray(T, dtype=float))
    return float(out) if np.isscalar(T) or getattr(T, "ndim", 0) == 0 else out


def _ratios(params: SavannaParams) -> tuple[float, float]:
    R_T = growth_rate(params.gamma_T, params.b_T, params.W) / params.delta_T
    R_G = growth_rate(params.gamma_G, params.b_G, params.W) / params.delta_G
    return R_T, R_G


def scale_info(params: SavannaParams) -> ScaleInfo:
    """Effective capacities and unit conversion factors for this scenario."""
    if params.delta_T <= 0 or params.delta_G <= 0:
        raise ConfigError("loss rates delta_T, delta_G must be positive")
    R_T, R_G = _ratios(params)
    if not R_T > 1 + MIN_RATIO_EXCESS:
        raise ConfigError(
            f"tree growth/loss ratio R_T = {R_T!r} must exceed 1: "
            "growth_rate(gamma_T, b_T, W) > delta_T is required"
        )
    if not R_G > 1 + MIN_RATIO_EXCESS:
        raise ConfigError(
            f"grass growth/loss ratio R_G = {R_G!r} must exceed 1: "
            "growth_rate(gamma_G, b_G, W) > delta_G is required"
        )
    K_T_W = carrying_capacity(params.c_T, params.d_T_shape, params.a_T, params.W)
    K_G_W = carrying_capacity(params.c_G, params.d_G_shape, params.a_G, params.W)
    time_factor = params.delta_T * (R_T - 1.0)
    return ScaleInfo(
        K_T_prime=K_T_W * (1.0 - 1.0 / R_T),
        K_G_prime=K_G_W * (1.0 - 1.0 / R_G),
        K_T_W=K_T_W,
        K_G_W=K_G_W,
        R_T=R_T,
        R_G=R_G,
        time_factor=time_factor,
        space_factor=math.sqrt(time_factor),
    )


def normalize(params: SavannaParams) -> NormalizedParams:
    """Reduce the raw model to its dimensionless form.

    Rejects scenarios where either biomass cannot persist even without fire
    (growth/loss ratio at or below 1), since the effective capacities then
    degenerate.
    """
    info = scale_info(params)
    tree_rate = params.delta_T * (info.R_T - 1.0)
    grass_rate = params.delta_G * (info.R_G - 1.0)
    return NormalizedParams(
        lam=grass_rate / tree_rate,
        gamma=params.eta_TG * info.K_T_prime / grass_rate,
        tau=tree_rate * params.tau_tilde,
        eta=params.eta,
        alpha=params.alpha_G / info.K_G_prime,
        p=params.p_T * info.K_T_prime,
        a_min=params.lambda_fT_min,
        a_max=params.lambda_fT_max,
        d_u=params.diff_T,
        d_v=params.diff_G,
    )


def classify_eigenvalues(eigs: tuple[float, float]) -> str:
    """Verdict from one-generation eigenvalue moduli with a nonhyperbolic margin."""
    mods = [abs(e) for e in eigs]
    if any(abs(m - 1.0) <= NONHYPERBOLIC_MARGIN for m in mods):
        return "nonhyperbolic"
    if any(m > 1.0 for m in mods):
        return "unstable"
    return "LAS"


def thresholds_raw(params: SavannaParams) -> ThresholdReport:
    """Closed-form thresholds and equilibria in raw units.

    R0 governs existence of the grassland state, R1 stability of the forest
    state against grass invasion, R2 stability of the grassland state against
    tree invasion. The forest state is (K_T_prime, 0); the grassland state
    (0, Gbar) exists exactly when R0 > 1.
    """
    info = scale_info(params)
    tt = params.tau_tilde
    grass_growth = growth_rate(params.gamma_G, params.b_G, params.W)
    tree_growth = growth_rate(params.gamma_T, params.b_T, params.W)
    one_minus_eta = 1.0 - params.eta

    R0 = one_minus_eta * math.exp((grass_growth - params.delta_G) * tt)
    R1 = one_minus_eta * math.exp(
        (grass_growth - params.delta_G - params.eta_TG * info.K_T_prime) * tt
    )

    # Grassland level just before a fire; defined whenever R0 > 1.
    exp_growth = math.exp((grass_growth - params.delta_G) * tt)
    grassland_exists = R0 > 1.0
    if grassland_exists:
        vbar = params.eta / (one_minus_eta * (exp_growth - 1.0))
        Gbar = (1.0 - vbar) * info.K_G_prime
    else:
        vbar = float("nan")
        Gbar = float("nan")

    w_at_Gbar = fire_intensity(Gbar, params.alpha_G) if grassland_exists else 0.0
    R2 = (1.0 - params.lambda_fT_max * w_at_Gbar) * math.exp(
        (tree_growth - params.delta_T) * tt
    )

    exp_tau = math.exp((tree_growth - params.delta_T) * tt)
    equilibria: list[tuple[str, tuple[float, float]]] = [
        ("extinction", (0.0, 0.0)),
        ("forest", (info.K_T_prime, 0.0)),
    ]
    verdicts: list[tuple[str, str]] = [
        ("extinction", classify_eigenvalues((exp_tau, R0))),
        ("forest", classify_eigenvalues((1.0 / exp_tau, R1))),
    ]
    if grassland_exists:
        equilibria.append(("grassland", (0.0, Gbar)))
        verdicts.append(("grassland", classify_eigenvalues((R2, 1.0 / R0))))

    return ThresholdReport(
        units="raw",
        R0=R0,
        R1=R1,
        R2=R2,
        grass_level=Gbar,
        equilibria=tuple(equilibria),
        verdicts=tuple(verdicts),
    )


# Config keys in canonical file order: the raw parameter symbols with the two
# documented renames (sigmoid shapes *_shape, diffusion coefficients *_diff).
CONFIG_KEYS: tuple[str, ...] = (
    "c_G", "c_T", "b_G", "b_T", "a_G", "a_T",
    "d_G_shape", "d_T_shape",
    "gamma_G", "gamma_T", "delta_G", "delta_T",
    "eta", "lambda_fT_min", "lambda_fT_max", "p_T",
    "alpha_G", "eta_TG",
    "W", "tau_tilde", "d_T_diff", "d_G_diff",
)

_KEY_TO_FIELD = {key: key for key in CONFIG_KEYS}
_KEY_TO_FIELD["d_T_diff"] = "diff_T"
_KEY_TO_FIELD["d_G_diff"] = "diff_G"
_FIELD_TO_KEY = {field: key for key, field in _KEY_TO_FIELD.items()}


def parse_config_text(text: str, source: str = "<config>") -> SavannaParams:
    """Parse a flat ``key = value`` configuration.

    One assignment per line, ``#`` starts a comment, blank lines ignored.
    Every key is required (no defaults), unknown and duplicate keys are
    rejected, so a misconfigured scenario fails loudly.
    """
    values: dict[str, float] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in _KEY_TO_FIELD:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(value_text)
        except ValueError:
            raise ConfigError(
                f"{source}:{lineno}: value for {key!r} is not a number: {value_text!r}"
            ) from None
    missing = [key for key in CONFIG_KEYS if key not in values]
    if missing:
        raise ConfigError(f"{source}: missing required key(s): {', '.join(missing)}")
    return SavannaParams(**{_KEY_TO_FIELD[key]: values[key] for key in values})


def load_config(path) -> SavannaParams:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def format_config(params: SavannaParams) -> str:
    """Canonical config text for the given parameters (used for provenance)."""
    lines = []
    for key in CONFIG_KEYS:
        lines.append(f"{key} = {getattr(params, _KEY_TO_FIELD[key])!r}")
    return "\n".join(lines) + "\n"
