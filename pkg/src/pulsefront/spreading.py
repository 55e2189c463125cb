"""Front tracking, spreading-speed estimation, diffusion sweeps, and the
slowest/fastest-speed recursion.

Speeds are measured two independent ways. The direct way runs the
generation recursion from a junction profile (invading state on the left,
resident state on the right), tracks a level crossing of the invading
component each generation, and regresses position on generation number.
The indirect way iterates the profile recursion
a_{n+1}(s) = max(phi(s), (Q a_n)(s + c)) for candidate frame speeds c and
bisects on the classification of its limit: if the far-right values climb
to the invaded equilibrium the frame is slower than the front (speed below
c*), if the profile stalls at the seed the frame outruns it. Dropping the
max floor gives the companion recursion whose survival classifies the
fastest speed; the two are reported side by side without assuming they
coincide.

Unit convention: regression slopes are displacement per generation; sweep
rows and power-law fits divide by the season length, so fitted
coefficients are speeds per unit (dimensionless) time.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import csv
import io

import numpy as np
from scipy.stats import t as student_t

from .dynamics import Grid1D, SolverConfig, SystemState
from .homogeneous import thresholds, vbar
from .impulses import run_generations, recursion_step
from .savanna import ConfigError, NormalizedParams

__all__ = [
    "BoundaryContaminationError",
    "WaveProfile",
    "FrontTrace",
    "SpeedEstimate",
    "SweepPoint",
    "PowerLawFit",
    "CstarEstimate",
    "FrontRunPlan",
    "junction_state",
    "track_front",
    "plan_front_run",
    "run_front_trace",
    "estimate_speed",
    "sweep_speed_vs_diffusion",
    "fit_power_law",
    "build_cstar_profile",
    "estimate_cstar",
    "estimate_cstar_fast",
    "write_sweep_csv",
    "read_sweep_csv",
    "SWEEP_COLUMNS",
]

# Crossings closer than this many cells to a wall are contaminated by the
# boundary condition and flagged invalid.
BOUNDARY_GUARD_CELLS = 10

# Fraction of the invaded equilibrium used as the default tracking level.
DEFAULT_THETA = 0.5

# Fraction of generations discarded before the speed regression.
DEFAULT_BURN_IN = 0.4

# Per-iteration slack allowed on the profile recursion's monotonicity.
RECURSION_ORDER_TOL = 1e-9

# Relative closeness (to the invaded equilibrium, or to zero) at which the
# profile recursion's limit is classified.
CLASSIFY_MARGIN = 0.1

# Supremum-norm change per iteration under which the recursion counts as
# converged.
RECURSION_CONVERGED = 1e-10

DEFAULT_SWEEP_GENERATIONS = {"tree": 150, "grass": 700, "scalar": 100}

SWEEP_COLUMNS = ("d", "speed", "stderr", "n_generations", "dx", "dt")

# Resolution policy, in units of the invasion's linear decay length 1/mu:
# cells per decay length, left padding, and headroom ahead of the predicted
# front travel.
CELLS_PER_DECAY_LENGTH = 10
LEFT_PAD_DECAY_LENGTHS = 30.0
RIGHT_PAD_DECAY_LENGTHS = 20.0
# A profile pinned at the seed decays like exp(-x/width) or faster, so this
# many decay lengths ahead of the seed it sits far below the classification
# margin even for a component whose diffusion doubles the width.
MIN_PROBE_DECAY_LENGTHS = 8.0
TRAVEL_HEADROOM = 1.15
STEPS_PER_SEASON = 200


class BoundaryContaminationError(RuntimeError):
    """A front crossing sat inside the boundary guard; speeds from this run
    would be polluted by the wall."""


def _invasion_setup(params: NormalizedParams, kind: str):
    """Frame, tracked component, and linear-growth data for an invasion kind.

    "tree": trees invade grassland (shifted frame, requires R2 > 1, R1 < 1).
    "grass": grass invades forest (increasing frame, requires R1 > 1, R2 < 1).
    "scalar": single-component logistic baseline with inert second component
    (raw frame, no impulse effect when the grass field is identically zero).
    Returns (frame, component index, log of per-generation linear growth).
    """
    R0, R1, R2 = thresholds(params)
    if kind == "tree":
        if not (R2 > 1.0 and R1 < 1.0):
            raise ConfigError(
                f"tree invasion needs R2 > 1 > R1, got R1 = {R1!r}, R2 = {R2!r}"
            )
        return "shifted", 0, math.log(R2)
    if kind == "grass":
        if not (R1 > 1.0 and R2 < 1.0):
            raise ConfigError(
                f"grass invasion needs R1 > 1 > R2, got R1 = {R1!r}, R2 = {R2!r}"
            )
        return "increasing", 1, math.log(R1)
    if kind == "scalar":
        return "raw", 0, params.tau
    raise ConfigError(f"unknown invasion kind {kind!r}; expected tree, grass, or scalar")


def _invaded_equilibrium(params: NormalizedParams, kind: str) -> tuple[float, float]:
    """Coordinates of the invading state's target in the run frame."""
    if kind == "tree":
        return 1.0, 1.0 - vbar(params)
    if kind == "grass":
        return 1.0, 1.0 - vbar(params)
    if kind == "scalar":
        return 1.0, 0.0
    raise ConfigError(f"unknown invasion kind {kind!r}; expected tree, grass, or scalar")


def _varied_diffusion(params: NormalizedParams, kind: str) -> float:
    return params.d_v if kind == "grass" else params.d_u


@dataclass(frozen=True)
class FrontRunPlan:
    """Everything needed to launch one deterministic front run."""

    params: NormalizedParams
    kind: str
    frame: str
    component: int
    beta: tuple[float, float]
    grid: Grid1D
    solver: SolverConfig
    n_generations: int
    theta: float
    level: float
    front_width: float       # linear decay length 1/mu of the invasion
    linear_speed: float      # per-generation linearized front speed


def plan_front_run(
    params: NormalizedParams,
    kind: str,
    *,
    n_generations: int | None = None,
    dx: float | None = None,
    dt: float | None = None,
    theta: float = DEFAULT_THETA,
    deep_left: bool = False,
    scheme: str = "crank_nicolson_neumann",
) -> FrontRunPlan:
    """Size grid and solver for a front run from the invasion's linear scales.

    The decay length of the linearized invading tail is 1/mu with
    mu = sqrt(ln(R)/(d tau)); the default grid resolves it with
    CELLS_PER_DECAY_LENGTH cells and extends far enough right to hold the
    predicted travel plus padding. ``deep_left`` mirrors the travel distance
    on the left so the left half-domain stays many decay lengths behind the
    initial junction (used for interior-convergence runs).
    """
    frame, component, log_growth = _invasion_setup(params, kind)
    if not 0.0 < theta < 1.0:
        raise ConfigError(f"theta must lie in (0, 1), got {theta}")
    d_inv = _varied_diffusion(params, kind)
    d_other = params.d_u if kind == "grass" else params.d_v
    if d_inv <= 0:
        raise ConfigError(f"invading component needs positive diffusion, got {d_inv!r}")
    if n_generations is None:
        n_generations = DEFAULT_SWEEP_GENERATIONS[kind]
    if n_generations < 1:
        raise ConfigError(f"n_generations must be >= 1, got {n_generations}")

    mu = math.sqrt(log_growth / (d_inv * params.tau))
    width = 1.0 / mu
    c_gen = 2.0 * math.sqrt(d_inv * params.tau * log_growth)

    if dx is None:
        dx = width / CELLS_PER_DECAY_LENGTH
    if dt is None:
        dt = params.tau / STEPS_PER_SEASON
    x_max = TRAVEL_HEADROOM * n_generations * c_gen + RIGHT_PAD_DECAY_LENGTHS * width
    if deep_left:
        # The resident state ahead of the junction bleeds into the wake by
        # diffusion during the first generations, before the front outruns
        # it; push the left wall far enough that the half-domain midpoint
        # sits several of those diffusion lengths behind the junction.
        leak = 8.0 * math.sqrt(4.0 * d_other * n_generations * params.tau)
        x_min = -(x_max + RIGHT_PAD_DECAY_LENGTHS * width + leak)
    else:
        x_min = -LEFT_PAD_DECAY_LENGTHS * width
    n_cells = int(math.ceil((x_max - x_min) / dx)) + 1
    grid = Grid1D(x_min=x_min, x_max=x_min + (n_cells - 1) * dx, n_cells=n_cells)
    solver = SolverConfig(dt=dt, scheme=scheme)
    solver.steps_per_season(params.tau)

    beta = _invaded_equilibrium(params, kind)
    return FrontRunPlan(
        params=params,
        kind=kind,
        frame=frame,
        component=component,
        beta=beta,
        grid=grid,
        solver=solver,
        n_generations=n_generations,
        theta=theta,
        level=theta * beta[component],
        front_width=width,
        linear_speed=c_gen,
    )


def junction_state(
    grid: Grid1D,
    frame: str,
    beta: tuple[float, float],
    width: float,
    season_length: float,
) -> SystemState:
    """Pre-fire state joining the invading equilibrium (left) to the resident
    state at zero (right) through a tanh ramp of the given width, centered at
    x = 0."""
    if width <= 0:
        raise ConfigError(f"junction width must be positive, got {width}")
    ramp = 0.5 * (1.0 - np.tanh(grid.x / width))
    return SystemState(
        frame=frame,
        u=beta[0] * ramp,
        v=beta[1] * ramp,
        generation=0,
        t=season_length,
    )


@dataclass(frozen=True, eq=False)
class WaveProfile:
    """Front-like seed profile for the speed recursions.

    Both components are non-increasing, vanish for x >= 0, and approach a
    plateau strictly between the resident state (zero) and the invaded
    equilibrium ``beta`` on the far left; components whose equilibrium value
    is zero stay identically zero.
    """

    grid: Grid1D
    frame: str
    u: np.ndarray
    v: np.ndarray
    beta: tuple[float, float]

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        if u.shape != (self.grid.n_cells,) or v.shape != (self.grid.n_cells,):
            raise ConfigError("profile fields must match the grid length")
        x = self.grid.x
        if not (x[0] < 0.0 <= x[-1]):
            raise ConfigError("profile grid must contain x = 0 with room to the left")
        for field, limit, name in ((u, self.beta[0], "first"), (v, self.beta[1], "second")):
            if np.any(np.diff(field) > 0.0):
                raise ConfigError(f"profile {name} component must be non-increasing")
            if np.any(field[x >= 0.0] != 0.0):
                raise ConfigError(f"profile {name} component must vanish for x >= 0")
            if limit > 0.0:
                if not 0.0 < field[0] < limit:
                    raise ConfigError(
                        f"profile {name} component must start strictly between 0 and "
                        f"{limit!r}, got {field[0]!r}"
                    )
            elif np.any(field != 0.0):
                raise ConfigError(
                    f"profile {name} component must be identically zero (its "
                    "equilibrium value is zero)"
                )

    @classmethod
    def tanh_profile(
        cls,
        grid: Grid1D,
        frame: str,
        beta: tuple[float, float],
        amplitude: float = 0.6,
        width: float | None = None,
    ) -> "WaveProfile":
        """Ramp rising leftward from zero at x = 0 toward amplitude * beta."""
        if not 0.0 < amplitude < 1.0:
            raise ConfigError(f"amplitude must lie in (0, 1), got {amplitude}")
        if width is None:
            width = 10.0 * grid.dx
        if width <= 0:
            raise ConfigError(f"width must be positive, got {width}")
        shape = np.where(grid.x < 0.0, np.tanh(-grid.x / width), 0.0)
        return cls(
            grid=grid,
            frame=frame,
            u=amplitude * beta[0] * shape,
            v=amplitude * beta[1] * shape,
            beta=beta,
        )

    def to_state(self, season_length: float, generation: int = 0) -> SystemState:
        return SystemState(
            frame=self.frame,
            u=self.u.copy(),
            v=self.v.copy(),
            generation=generation,
            t=season_length,
        )


def track_front(state: SystemState, grid: Grid1D, component: int, level: float) -> float:
    """Position of the rightmost downward crossing of ``level`` by the chosen
    component, located by linear interpolation between the bracketing cells.
    Returns NaN when the level is never crossed."""
    if component not in (0, 1):
        raise ConfigError(f"component must be 0 or 1, got {component!r}")
    if not (math.isfinite(level) and level > 0):
        raise ConfigError(f"level must be positive, got {level!r}")
    field = state.u if component == 0 else state.v
    if field.shape != (grid.n_cells,):
        raise ConfigError("state does not match the grid")
    above = field[:-1] >= level
    below = field[1:] < level
    crossings = np.nonzero(above & below)[0]
    if crossings.size == 0:
        return float("nan")
    k = int(crossings[-1])
    f0 = float(field[k])
    f1 = float(field[k + 1])
    x = grid.x
    return float(x[k] + (x[k + 1] - x[k]) * (f0 - level) / (f0 - f1))


@dataclass(frozen=True, eq=False)
class FrontTrace:
    """Per-generation front positions of one component at one level.

    ``valid`` flags positions that exist and clear the boundary guard
    (at least BOUNDARY_GUARD_CELLS * dx from either wall).
    """

    generations: np.ndarray
    positions: np.ndarray
    valid: np.ndarray
    component: int
    theta: float
    level: float
    dx: float
    x_min: float
    x_max: float

    def __post_init__(self) -> None:
        g = np.asarray(self.generations, dtype=int)
        p = np.asarray(self.positions, dtype=float)
        m = np.asarray(self.valid, dtype=bool)
        if not (g.shape == p.shape == m.shape) or g.ndim != 1:
            raise ConfigError("trace arrays must be 1-D and of equal length")
        object.__setattr__(self, "generations", g)
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "valid", m)

    @property
    def n_observations(self) -> int:
        return int(self.generations.size)


class _FrontObserver:
    def __init__(self, grid: Grid1D, component: int, level: float):
        self.grid = grid
        self.component = component
        self.level = level
        self.generations: list[int] = []
        self.positions: list[float] = []
        guard = BOUNDARY_GUARD_CELLS * grid.dx
        self._lo = grid.x_min + guard
        self._hi = grid.x_max - guard

    def __call__(self, state: SystemState) -> None:
        pos = track_front(state, self.grid, self.component, self.level)
        self.generations.append(state.generation)
        self.positions.append(pos)

    def to_trace(self, theta: float) -> FrontTrace:
        positions = np.asarray(self.positions, dtype=float)
        finite = np.isfinite(positions)
        valid = finite & (positions >= self._lo) & (positions <= self._hi)
        return FrontTrace(
            generations=np.asarray(self.generations, dtype=int),
            positions=positions,
            valid=valid,
            component=self.component,
            theta=theta,
            level=self.level,
            dx=self.grid.dx,
            x_min=self.grid.x_min,
            x_max=self.grid.x_max,
        )


def run_front_trace(
    plan: FrontRunPlan,
    initial_state: SystemState | None = None,
    extra_observers: tuple = (),
) -> tuple[FrontTrace, SystemState]:
    """Run the generation recursion from a junction (or given) initial state,
    recording the tracked component's front position every generation."""
    if initial_state is None:
        initial_state = junction_state(
            plan.grid, plan.frame, plan.beta, plan.front_width, plan.params.tau
        )
    observer = _FrontObserver(plan.grid, plan.component, plan.level)
    final = run_generations(
        initial_state,
        plan.params,
        plan.grid,
        plan.solver,
        plan.n_generations,
        observers=(observer, *extra_observers),
    )
    return observer.to_trace(plan.theta), final


@dataclass(frozen=True)
class SpeedEstimate:
    """Least-squares front speed in space units per generation."""

    speed: float
    stderr: float
    n_points: int
    max_residual: float

    def per_time(self, season_length: float) -> float:
        """Convert to space units per unit time."""
        return self.speed / season_length


def estimate_speed(trace: FrontTrace, burn_in: float = DEFAULT_BURN_IN) -> SpeedEstimate:
    """Regress front position on generation after discarding the first
    ``burn_in`` fraction of observations.

    Requires at least 10 post-burn-in points, all valid; crossings inside the
    boundary guard raise :class:`BoundaryContaminationError`.
    """
    if not 0.0 <= burn_in < 1.0:
        raise ConfigError(f"burn_in must lie in [0, 1), got {burn_in}")
    n_total = trace.n_observations
    start = int(math.floor(burn_in * n_total))
    gens = trace.generations[start:].astype(float)
    pos = trace.positions[start:]
    valid = trace.valid[start:]
    if gens.size < 10:
        raise ValueError(
            f"need at least 10 post-burn-in points, got {gens.size} "
            f"(trace length {n_total}, burn-in {burn_in})"
        )
    if not np.all(valid):
        bad = np.nonzero(~valid)[0]
        gen_bad = int(trace.generations[start + bad[0]])
        pos_bad = trace.positions[start + bad[0]]
        if math.isnan(pos_bad):
            raise BoundaryContaminationError(
                f"front level not crossed at generation {gen_bad}"
            )
        raise BoundaryContaminationError(
            f"front position {pos_bad!r} at generation {gen_bad} is within "
            f"{BOUNDARY_GUARD_CELLS} cells of a boundary"
        )
    n = gens.size
    g_mean = float(np.mean(gens))
    p_mean = float(np.mean(pos))
    sxx = float(np.sum((gens - g_mean) ** 2))
    slope = float(np.sum((gens - g_mean) * (pos - p_mean)) / sxx)
    residuals = pos - (p_mean + slope * (gens - g_mean))
    ssr = float(np.sum(residuals**2))
    stderr = math.sqrt(max(ssr, 0.0) / (n - 2) / sxx) if n > 2 else 0.0
    return SpeedEstimate(
        speed=slope,
        stderr=stderr,
        n_points=n,
        max_residual=float(np.max(np.abs(residuals))),
    )


@dataclass(frozen=True)
class SweepPoint:
    """One sweep row: speed (per unit time) at one diffusion coefficient."""

    d: float
    speed: float
    stderr: float
    n_generations: int
    dx: float
    dt: float


def _sweep_single(
    params: NormalizedParams,
    kind: str,
    d: float,
    n_generations: int | None,
    theta: float,
    burn_in: float,
    dx: float | None,
    dt: float | None,
) -> SweepPoint:
    if not (math.isfinite(d) and d > 0):
        raise ConfigError(f"diffusion values must be positive, got {d!r}")
    if kind == "grass":
        run_params = replace(params, d_v=d)
    else:
        run_params = replace(params, d_u=d)
    plan = plan_front_run(
        run_params, kind, n_generations=n_generations, dx=dx, dt=dt, theta=theta
    )
    trace, _ = run_front_trace(plan)
    est = estimate_speed(trace, burn_in=burn_in)
    return SweepPoint(
        d=d,
        speed=est.per_time(params.tau),
        stderr=est.stderr / params.tau,
        n_generations=plan.n_generations,
        dx=plan.grid.dx,
        dt=plan.solver.dt,
    )


def _sweep_worker(task) -> SweepPoint:
    return _sweep_single(*task)


def sweep_speed_vs_diffusion(
    params: NormalizedParams,
    kind: str,
    d_values,
    *,
    n_generations: int | None = None,
    theta: float = DEFAULT_THETA,
    burn_in: float = DEFAULT_BURN_IN,
    dx: float | None = None,
    dt: float | None = None,
    jobs: int = 1,
) -> tuple[SweepPoint, ...]:
    """One front run per diffusion value, all other parameters fixed.

    ``kind`` selects which coefficient varies: "tree" sweeps the tree
    coefficient with the grass one fixed, "grass" the reverse. Rows come
    back sorted by d ascending regardless of execution order; points are
    independent jobs and may run in up to ``jobs`` processes.
    """
    ds = [float(d) for d in d_values]
    if not ds:
        raise ConfigError("d_values must not be empty")
    if len(set(ds)) != len(ds):
        raise ConfigError("d_values must be distinct")
    _invasion_setup(params, kind)
    tasks = [
        (params, kind, d, n_generations, theta, burn_in, dx, dt) for d in sorted(ds)
    ]
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(tasks) == 1:
        points = [_sweep_worker(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            points = list(pool.map(_sweep_worker, tasks))
    return tuple(sorted(points, key=lambda pt: pt.d))


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares power law c = a1 * d**a2, fitted in log-log space."""

    a1: float
    a2: float
    r2: float
    a1_ci: tuple[float, float]
    a2_ci: tuple[float, float]
    n_points: int

    def to_text(self) -> str:
        lines = [
            f"a1 = {self.a1!r}",
            f"a2 = {self.a2!r}",
            f"r2 = {self.r2!r}",
            f"a1_ci95 = ({self.a1_ci[0]!r}, {self.a1_ci[1]!r})",
            f"a2_ci95 = ({self.a2_ci[0]!r}, {self.a2_ci[1]!r})",
            f"n_points = {self.n_points}",
        ]
        return "\n".join(lines) + "\n"


def fit_power_law(pairs) -> PowerLawFit:
    """Fit c = a1 * d**a2 by linear least squares on (log d, log c).

    Needs at least 3 pairs with positive coordinates; r-squared and the 95%
    confidence intervals (from the regression t-statistics) are computed in
    log space. A noiseless power law is recovered exactly with zero-width
    intervals.
    """
    data = [(float(d), float(c)) for d, c in pairs]
    if len(data) < 3:
        raise ValueError(f"power-law fit needs at least 3 points, got {len(data)}")
    if any(d <= 0 or c <= 0 for d, c in data):
        raise ValueError("power-law fit needs strictly positive coordinates")
    x = np.log(np.array([d for d, _ in data]))
    y = np.log(np.array([c for _, c in data]))
    n = x.size
    if np.unique(x).size < 2:
        raise ValueError("power-law fit needs at least two distinct d values")
    x_mean = float(np.mean(x))
    y_mean = float(np.mean(y))
    sxx = float(np.sum((x - x_mean) ** 2))
    slope = float(np.sum((x - x_mean) * (y - y_mean)) / sxx)
    intercept = y_mean - slope * x_mean
    residuals = y - (intercept + slope * x)
    ssr = float(np.sum(residuals**2))
    sst = float(np.sum((y - y_mean) ** 2))
    r2 = 1.0 if sst == 0.0 else 1.0 - ssr / sst
    if n > 2 and ssr > 0.0:
        sigma2 = ssr / (n - 2)
        se_slope = math.sqrt(sigma2 / sxx)
        se_intercept = math.sqrt(sigma2 * (1.0 / n + x_mean**2 / sxx))
        tq = float(student_t.ppf(0.975, n - 2))
    else:
        se_slope = se_intercept = tq = 0.0
    a1 = math.exp(intercept)
    return PowerLawFit(
        a1=a1,
        a2=slope,
        r2=r2,
        a1_ci=(math.exp(intercept - tq * se_intercept), math.exp(intercept + tq * se_intercept)),
        a2_ci=(slope - tq * se_slope, slope + tq * se_slope),
        n_points=n,
    )


def build_cstar_profile(
    params: NormalizedParams,
    kind: str,
    *,
    dx: float | None = None,
    amplitude: float = 0.6,
    c_cap: float | None = None,
) -> WaveProfile:
    """Seed profile and grid for the speed recursions.

    The grid spans 30 decay lengths behind the front and, ahead of it, enough
    room for the classification probe at any frame speed up to ``c_cap``
    (default: twice the linearized speed). Each recursion iteration refills
    the rightmost ``c``-worth of cells from beyond the grid, and one
    generation of dynamics can heal at most a linearized-speed-plus-smearing
    stretch of that dent, so the limit profile is suppressed across a
    right-edge layer; the probe must clear that layer while staying several
    decay lengths ahead of the seed (see ``_classify_recursion``).
    """
    frame, _, log_growth = _invasion_setup(params, kind)
    d_inv = _varied_diffusion(params, kind)
    if d_inv <= 0:
        raise ConfigError(f"invading component needs positive diffusion, got {d_inv!r}")
    mu = math.sqrt(log_growth / (d_inv * params.tau))
    width = 1.0 / mu
    c_lin = 2.0 * math.sqrt(d_inv * params.tau * log_growth)
    if c_cap is None:
        c_cap = 2.0 * c_lin
    if dx is None:
        dx = width / CELLS_PER_DECAY_LENGTH
    x_min = -LEFT_PAD_DECAY_LENGTHS * width
    x_max = (
        (MIN_PROBE_DECAY_LENGTHS + 4.0) * width + 2.0 * float(c_cap) + c_lin
    )
    n_cells = int(math.ceil((x_max - x_min) / dx)) + 1
    grid = Grid1D(x_min=x_min, x_max=x_min + (n_cells - 1) * dx, n_cells=n_cells)
    beta = _invaded_equilibrium(params, kind)
    return WaveProfile.tanh_profile(grid, frame, beta, amplitude=amplitude, width=width)


@dataclass(frozen=True)
class CstarEstimate:
    """Bisection bracket for a critical frame speed, per generation.

    status "converged": the bracket width reached the tolerance and
    ``point`` is its midpoint. status "inconclusive": some candidate's
    classification did not resolve within the iteration budget; the bracket
    holds the best-known bounds. status "below_range"/"above_range": the
    critical speed is outside the supplied range.
    """

    lower: float
    upper: float
    status: str
    evaluations: tuple[tuple[float, str], ...]

    @property
    def point(self) -> float:
        if self.status != "converged":
            raise ValueError(f"no point estimate: status is {self.status!r}")
        return 0.5 * (self.lower + self.upper)


def _profile_kind(profile: WaveProfile) -> str:
    if profile.frame == "shifted":
        return "tree"
    if profile.frame == "increasing":
        return "grass"
    if profile.frame == "raw":
        if np.any(profile.v != 0.0):
            raise ConfigError(
                "raw-frame speed recursion supports only the scalar sub-case "
                "(second component identically zero)"
            )
        return "scalar"
    raise ConfigError(
        f"speed recursion runs in shifted, increasing, or raw frames, "
        f"got {profile.frame!r}"
    )


def _enforce_profile_shape(field: np.ndarray, name: str) -> np.ndarray:
    # Order preservation guarantees monotone iterates; roundoff may chip at
    # that by a hair, anything larger is a real defect.
    drift = float(np.max(np.diff(field), initial=0.0))
    if drift > RECURSION_ORDER_TOL:
        raise RuntimeError(
            f"{name} lost spatial monotonicity by {drift!r} in the speed recursion"
        )
    return np.minimum.accumulate(field)


def _classify_recursion(
    params: NormalizedParams,
    profile: WaveProfile,
    solver: SolverConfig,
    c: float,
    max_iterations: int,
    floored: bool,
) -> str:
    """Run the profile recursion at frame speed c and classify its limit.

    Returns "beta" when the front of the invading component passes the
    classification probe (the frame is slower than the front), "zero" when
    the profile stalls at the seed scale (the frame outruns it), or
    "inconclusive" when the budget runs out with the front still in flight.

    The test reads the invading component at the probe against half its
    invaded value. The half level separates the outcomes by orders of
    magnitude: a limit pinned at the seed decays to ~e^-8 of the invaded
    value out at the probe, while a front that has passed it leaves well
    over half. Full convergence to the invaded value is not required there
    because the refilled right edge continually injects resident state whose
    slowest-relaxing component may lag far behind the front.
    """
    grid = profile.grid
    x = grid.x
    beta = profile.beta
    phi = (profile.u, profile.v)
    a_u = profile.u.copy()
    a_v = profile.v.copy()

    kind = _profile_kind(profile)
    _, _, log_growth = _invasion_setup(params, kind)
    d_inv = _varied_diffusion(params, kind)
    width = math.sqrt(d_inv * params.tau / log_growth)
    c_lin = 2.0 * math.sqrt(d_inv * params.tau * log_growth)

    # Every iteration refills the rightmost c-worth of cells from beyond the
    # grid, where the displaced-frame state is the resident equilibrium
    # (zero), and one generation of dynamics heals at most a
    # linearized-speed-plus-smearing stretch of that dent. The limit profile
    # is therefore suppressed across a right-edge layer even when the frame
    # is slower than the front, so the probe (and the cell it reads after
    # the shift, c further right) must clear that layer. It must also stay
    # several decay lengths ahead of the seed so a supercritical limit,
    # pinned at the seed, still reads near zero there.
    probe_x = grid.x_max - (2.0 * c + c_lin + 4.0 * width)
    probe = int(math.floor((probe_x - grid.x_min) / grid.dx))
    if probe >= grid.n_cells:
        probe = grid.n_cells - 1
    if probe < 1 or x[probe] < MIN_PROBE_DECAY_LENGTHS * width:
        raise ConfigError(
            f"frame speed {c!r} needs a wider profile grid; rebuild the seed "
            "with a larger speed cap"
        )

    carrier = 0 if kind in ("tree", "scalar") else 1
    beta_c = beta[carrier]

    def front_passed(fields) -> bool:
        return float(fields[carrier][probe]) >= 0.5 * beta_c

    def stalled_low(fields) -> bool:
        return float(fields[carrier][probe]) <= CLASSIFY_MARGIN * beta_c

    for n in range(max_iterations):
        state = SystemState(
            frame=profile.frame, u=a_u, v=a_v, generation=n, t=params.tau
        )
        advanced = recursion_step(state, params, grid, solver)
        # Left of the grid the profile continues at its plateau value; right
        # of the grid the state is the resident equilibrium, i.e. zero in
        # displaced coordinates. A constant right fill would let the tail
        # regrow in place and defeat the frame shift entirely.
        next_u = np.interp(x + c, x, advanced.u, left=advanced.u[0], right=0.0)
        next_v = np.interp(x + c, x, advanced.v, left=advanced.v[0], right=0.0)
        if floored:
            next_u = np.maximum(next_u, phi[0])
            next_v = np.maximum(next_v, phi[1])
            worst = min(
                float(np.min(next_u - a_u)), float(np.min(next_v - a_v))
            )
            if worst < -RECURSION_ORDER_TOL:
                raise RuntimeError(
                    f"speed recursion lost monotonicity in n by {worst!r}"
                )
            next_u = np.maximum(next_u, a_u)
            next_v = np.maximum(next_v, a_v)
        next_u = _enforce_profile_shape(next_u, "first component")
        next_v = _enforce_profile_shape(next_v, "second component")
        delta = max(
            float(np.max(np.abs(next_u - a_u))), float(np.max(np.abs(next_v - a_v)))
        )
        a_u, a_v = next_u, next_v
        fields = (a_u, a_v)
        if front_passed(fields):
            return "beta"
        if floored and delta <= RECURSION_CONVERGED:
            # Monotone iterates have fully stalled short of the probe.
            return "zero" if stalled_low(fields) else "inconclusive"
        if not floored and not np.any(fields[carrier] >= 0.5 * beta_c):
            # Without the floor a supercritical frame drags the whole front
            # off the grid and the boundary plateau collapses behind it;
            # once nothing anywhere reaches half the invaded value the
            # profile cannot regrow.
            return "zero"
    fields = (a_u, a_v)
    if front_passed(fields):
        return "beta"
    if stalled_low(fields):
        return "zero"
    return "inconclusive"


def _bisect_speed(
    classify,
    c_range: tuple[float, float],
    tol: float,
) -> CstarEstimate:
    lo, hi = float(c_range[0]), float(c_range[1])
    if not (0.0 <= lo < hi):
        raise ConfigError(f"c range must satisfy 0 <= lo < hi, got ({lo}, {hi})")
    if tol <= 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    evaluations: list[tuple[float, str]] = []

    def run(c: float) -> str:
        branch = classify(c)
        evaluations.append((c, branch))
        return branch

    first = run(lo)
    if first == "zero":
        return CstarEstimate(lower=lo, upper=lo, status="below_range", evaluations=tuple(evaluations))
    if first == "inconclusive":
        return CstarEstimate(lower=lo, upper=hi, status="inconclusive", evaluations=tuple(evaluations))
    last = run(hi)
    if last == "beta":
        return CstarEstimate(lower=hi, upper=hi, status="above_range", evaluations=tuple(evaluations))
    if last == "inconclusive":
        return CstarEstimate(lower=lo, upper=hi, status="inconclusive", evaluations=tuple(evaluations))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        branch = run(mid)
        if branch == "beta":
            lo = mid
        elif branch == "zero":
            hi = mid
        else:
            # The recursion resolves any candidate whose distance from the
            # critical speed exceeds (probe distance)/(iteration budget); an
            # unresolved midpoint therefore pins the critical speed at least
            # as tightly as the requested bracket. Inside the loop the
            # bracket is wider than tol, so mid -/+ tol/2 lies strictly
            # within it and the tightened bracket is tol wide (up to
            # roundoff); bisecting further could only re-ask about the same
            # midpoint.
            lo = max(lo, mid - 0.5 * tol)
            hi = min(hi, mid + 0.5 * tol)
            break
    return CstarEstimate(lower=lo, upper=hi, status="converged", evaluations=tuple(evaluations))


def _cstar_defaults(
    params: NormalizedParams,
    profile: WaveProfile,
    solver: SolverConfig | None,
    c_range: tuple[float, float] | None,
    tol: float | None,
):
    kind = _profile_kind(profile)
    _, _, log_growth = _invasion_setup(params, kind)
    d_inv = _varied_diffusion(params, kind)
    c_lin = 2.0 * math.sqrt(d_inv * params.tau * log_growth)
    if solver is None:
        solver = SolverConfig(dt=params.tau / STEPS_PER_SEASON)
    if c_range is None:
        c_range = (0.0, 2.0 * c_lin)
    if tol is None:
        tol = 0.05 * c_lin
    return solver, c_range, tol


def estimate_cstar(
    params: NormalizedParams,
    profile: WaveProfile,
    *,
    solver: SolverConfig | None = None,
    c_range: tuple[float, float] | None = None,
    tol: float | None = None,
    max_iterations: int = 800,
) -> CstarEstimate:
    """Slowest spreading speed, per generation, via the floored profile
    recursion.

    For each candidate frame speed c the recursion applies one generation of
    the dynamics, pulls the profile back by c (grid interpolation; c need not
    be a multiple of dx), and floors it at the seed profile. Iterates are
    non-decreasing in n and non-increasing in x (enforced, with 1e-9
    roundoff slack); whether the invading front reaches the probe ahead of
    the seed classifies c as below or above the critical speed, and the
    bracket is bisected to ``tol``. An unresolved classification at a range
    endpoint surfaces as an interval with status "inconclusive"; an
    unresolved midpoint tightens the bracket instead, since the recursion
    resolves every speed farther from critical than the probe distance over
    the iteration budget.
    """
    solver, c_range, tol = _cstar_defaults(params, profile, solver, c_range, tol)

    def classify(c: float) -> str:
        return _classify_recursion(params, profile, solver, c, max_iterations, floored=True)

    return _bisect_speed(classify, c_range, tol)


def estimate_cstar_fast(
    params: NormalizedParams,
    profile: WaveProfile,
    *,
    solver: SolverConfig | None = None,
    c_range: tuple[float, float] | None = None,
    tol: float | None = None,
    max_iterations: int = 800,
) -> CstarEstimate:
    """Fastest spreading speed, per generation: same machinery as
    :func:`estimate_cstar` but without the seed floor, so the profile
    survives in the moving frame only below the critical speed."""
    solver, c_range, tol = _cstar_defaults(params, profile, solver, c_range, tol)

    def classify(c: float) -> str:
        branch = _classify_recursion(
            params, profile, solver, c, max_iterations, floored=False
        )
        return branch

    return _bisect_speed(classify, c_range, tol)


def write_sweep_csv(points, destination, comments: tuple[str, ...] = ()) -> None:
    """Write sweep rows as CSV with optional ``#`` provenance comments."""

    def _write(fh) -> None:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for pt in points:
            writer.writerow(
                [
                    repr(pt.d),
                    repr(pt.speed),
                    repr(pt.stderr),
                    pt.n_generations,
                    repr(pt.dx),
                    repr(pt.dt),
                ]
            )

    if isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__"):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
    elif isinstance(destination, io.TextIOBase) or hasattr(destination, "write"):
        _write(destination)
    else:
        raise TypeError(f"destination must be a path or text file, got {type(destination)!r}")


def read_sweep_csv(path) -> tuple[SweepPoint, ...]:
    """Read a sweep CSV written by :func:`write_sweep_csv`, skipping comments."""
    points = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = (line for line in fh if not line.startswith("#"))
        reader = csv.DictReader(rows)
        if reader.fieldnames is None or tuple(reader.fieldnames) != SWEEP_COLUMNS:
            raise ValueError(
                f"{path}: expected columns {SWEEP_COLUMNS}, got {reader.fieldnames}"
            )
        for row in reader:
            points.append(
                SweepPoint(
                    d=float(row["d"]),
                    speed=float(row["speed"]),
                    stderr=float(row["stderr"]),
                    n_generations=int(row["n_generations"]),
                    dx=float(row["dx"]),
                    dt=float(row["dt"]),
                )
            )
    return tuple(points)
