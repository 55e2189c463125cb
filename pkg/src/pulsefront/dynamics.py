"""Spatial dynamics on a 1-D grid: frames, reaction terms, diffusion schemes,
and the between-fires season flow.

The season flow advances a state from the start of a season (t = 0, just
after a fire) to its end (t = tau, just before the next fire) by Strang
splitting: a half step of diffusion, one classical Runge-Kutta step of the
reaction, another half step of diffusion. Two diffusion schemes are
provided: an unconditionally stable Crank-Nicolson solve with zero-flux
(Neumann) walls, and an exact Gaussian-multiplier spectral step on a
periodic domain used as an independent cross-check.

States can be expressed in four algebraically equivalent frames; all
conversions are exact. "raw" carries (tree fraction, grass fraction), the
competitive form. "cooperative" replaces grass by its deficit,
(u, v) = (U, 1 - V), making the season dynamics order-preserving.
"shifted" recenters the cooperative deficit on the grassland level,
(u, q) = (u, v - vbar), which moves the grassland state to the origin.
"increasing" flips the tree component instead, (u, v) = (1 - U, V), the
order-preserving form for grass invading forest.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .homogeneous import vbar
from .savanna import ConfigError, NormalizedParams

__all__ = [
    "FRAMES",
    "SCHEMES",
    "BlowUpError",
    "Grid1D",
    "SystemState",
    "SolverConfig",
    "frame_bounds",
    "reaction_rhs",
    "diffusion_step",
    "reaction_step_rk4",
    "time_tau_map",
    "change_frame",
    "project_state",
    "write_snapshot",
]

FRAMES = ("raw", "cooperative", "shifted", "increasing")
SCHEMES = ("crank_nicolson_neumann", "gaussian_convolution_periodic")

SNAPSHOT_COLUMNS = ("generation", "t", "x", "component1", "component2", "frame")

# dt must tile the season length exactly; mismatch beyond this is rejected.
DT_DIVISION_TOL = 1e-12


class BlowUpError(RuntimeError):
    """The numerical solution left the invariant box by more than the
    projection tolerance; results past this point would be meaningless."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform vertex-centered grid on [x_min, x_max] with n_cells points."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_cells, int) or self.n_cells < 3:
            raise ConfigError(f"n_cells must be an integer >= 3, got {self.n_cells!r}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ConfigError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise ConfigError(
                f"grid needs x_max > x_min, got [{self.x_min}, {self.x_max}]"
            )

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_cells - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells)

    @property
    def period(self) -> float:
        """Circumference used by the periodic scheme: n_cells * dx."""
        return self.n_cells * self.dx


@dataclass(frozen=True, eq=False)
class SystemState:
    """Two spatial fields in a named frame, stamped with the generation they
    belong to and the within-season time t (0 = just after a fire, tau = just
    before the next one)."""

    frame: str
    u: np.ndarray
    v: np.ndarray
    generation: int
    t: float

    def __post_init__(self) -> None:
        if self.frame not in FRAMES:
            raise ConfigError(f"unknown frame {self.frame!r}; expected one of {FRAMES}")
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
            raise ConfigError(
                f"fields must be 1-D arrays of equal length, got {u.shape} and {v.shape}"
            )
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        if not isinstance(self.generation, int) or self.generation < 0:
            raise ConfigError(f"generation must be a nonnegative int, got {self.generation!r}")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ConfigError(f"within-season time must be finite and >= 0, got {self.t!r}")

    def replace(self, **changes) -> "SystemState":
        merged = {
            "frame": self.frame,
            "u": self.u,
            "v": self.v,
            "generation": self.generation,
            "t": self.t,
        }
        merged.update(changes)
        return SystemState(**merged)


@dataclass(frozen=True)
class SolverConfig:
    """Numerical controls for the season flow.

    dt is the splitting step (must divide the season length exactly);
    projection_tol is how far outside the frame's invariant box the solution
    may drift before the run is declared blown up (smaller excursions are
    clipped).
    """

    dt: float
    scheme: str = "crank_nicolson_neumann"
    projection_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not (math.isfinite(self.projection_tol) and self.projection_tol > 0):
            raise ConfigError(f"projection_tol must be positive, got {self.projection_tol!r}")

    def steps_per_season(self, tau: float) -> int:
        n = round(tau / self.dt)
        if n < 1 or abs(n * self.dt - tau) > DT_DIVISION_TOL * max(1.0, tau):
            raise ConfigError(
                f"dt = {self.dt!r} does not divide the season length tau = {tau!r}"
            )
        return n


def frame_bounds(
    frame: str, params: NormalizedParams
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Invariant box ((lo1, hi1), (lo2, hi2)) of the season dynamics per frame.

    The shifted second component can swing below its start-of-season range
    during the flow, so its box is the full physical one, [-vbar, 1 - vbar].
    """
    if frame == "shifted":
        vb = vbar(params)
        return (0.0, 1.0), (-vb, 1.0 - vb)
    if frame in FRAMES:
        return (0.0, 1.0), (0.0, 1.0)
    raise ConfigError(f"unknown frame {frame!r}; expected one of {FRAMES}")


def reaction_rhs(u, v, params: NormalizedParams, frame: str):
    """Right-hand side of the between-fires reaction kinetics in the given frame.

    Trees grow logistically regardless of grass; grass grows logistically and
    is suppressed by trees (one-sided interaction). Accepts scalars or arrays,
    returns a pair matching the input shape.
    """
    lam, gamma = params.lam, params.gamma
    if frame == "raw":
        du = u * (1.0 - u)
        dv = lam * v * (1.0 - v - gamma * u)
    elif frame == "cooperative":
        du = u * (1.0 - u)
        dv = lam * (1.0 - v) * (gamma * u - v)
    elif frame == "shifted":
        vb = vbar(params)
        du = u * (1.0 - u)
        dv = lam * (1.0 - v - vb) * (gamma * u - (v + vb))
    elif frame == "increasing":
        du = -u * (1.0 - u)
        dv = lam * v * (1.0 - v - gamma * (1.0 - u))
    else:
        raise ConfigError(f"unknown frame {frame!r}; expected one of {FRAMES}")
    return du, dv


def _neumann_laplacian(field: np.ndarray) -> np.ndarray:
    """Second-difference stencil with zero-flux closure (no dx factor)."""
    out = np.empty_like(field)
    out[1:-1] = field[:-2] - 2.0 * field[1:-1] + field[2:]
    out[0] = field[1] - field[0]
    out[-1] = field[-2] - field[-1]
    return out


@lru_cache(maxsize=64)
def _cn_cholesky(n_cells: int, r: float):
    """Banded Cholesky factor of I - (r/2) L for the zero-flux Laplacian L.

    L is symmetric (zero-flux closure mirrors through the wall face), so the
    implicit matrix is symmetric positive definite for every r > 0 and the
    factorization is reused across steps.
    """
    ab = np.zeros((2, n_cells))
    ab[0, 1:] = -r / 2.0
    ab[1, :] = 1.0 + r
    ab[1, 0] = 1.0 + r / 2.0
    ab[1, -1] = 1.0 + r / 2.0
    return cholesky_banded(ab)


def _diffusion_cn(field: np.ndarray, r: float) -> np.ndarray:
    rhs = field + (r / 2.0) * _neumann_laplacian(field)
    factor = _cn_cholesky(field.shape[0], r)
    return cho_solve_banded((factor, False), rhs)


def _diffusion_gaussian(field: np.ndarray, d: float, dt: float, grid: Grid1D) -> np.ndarray:
    freq = np.fft.rfftfreq(grid.n_cells, d=grid.dx)
    multiplier = np.exp(-d * dt * (2.0 * np.pi * freq) ** 2)
    return np.fft.irfft(np.fft.rfft(field) * multiplier, n=grid.n_cells)


def diffusion_step(
    field: np.ndarray,
    coefficient: float,
    dt: float,
    grid: Grid1D,
    scheme: str = "crank_nicolson_neumann",
) -> np.ndarray:
    """Advance one field by time dt under pure diffusion.

    "crank_nicolson_neumann" solves the trapezoidal scheme against zero-flux
    walls; its explicit half has nonnegative weights when
    coefficient * dt / dx^2 <= 1, which the default resolutions satisfy, so
    the step then obeys a discrete maximum principle. The zero-flux closure
    is symmetric, conserving the field's sum exactly.
    "gaussian_convolution_periodic" applies the exact periodic heat kernel
    (period n_cells * dx) through a Fourier multiplier. Both schemes fix
    constant fields exactly.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if not (math.isfinite(coefficient) and coefficient >= 0):
        raise ConfigError(f"diffusion coefficient must be >= 0, got {coefficient!r}")
    if not (math.isfinite(dt) and dt > 0):
        raise ConfigError(f"dt must be positive, got {dt!r}")
    field = np.asarray(field, dtype=float)
    if field.shape != (grid.n_cells,):
        raise ConfigError(
            f"field shape {field.shape} does not match grid ({grid.n_cells} points)"
        )
    if coefficient == 0.0:
        return field.copy()
    if scheme == "gaussian_convolution_periodic":
        return _diffusion_gaussian(field, coefficient, dt, grid)
    r = coefficient * dt / grid.dx**2
    return _diffusion_cn(field, r)


def reaction_step_rk4(
    u: np.ndarray, v: np.ndarray, dt: float, params: NormalizedParams, frame: str
):
    """One classical fourth-order Runge-Kutta step of the reaction kinetics."""
    k1u, k1v = reaction_rhs(u, v, params, frame)
    k2u, k2v = reaction_rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, params, frame)
    k3u, k3v = reaction_rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, params, frame)
    k4u, k4v = reaction_rhs(u + dt * k3u, v + dt * k3v, params, frame)
    u_next = u + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
    v_next = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return u_next, v_next


def _project_fields(
    u: np.ndarray,
    v: np.ndarray,
    frame: str,
    params: NormalizedParams,
    tol: float,
) -> tuple[np.ndarray, np.ndarray]:
    (lo1, hi1), (lo2, hi2) = frame_bounds(frame, params)
    worst = 0.0
    for field, lo, hi in ((u, lo1, hi1), (v, lo2, hi2)):
        if field.size:
            worst = max(
                worst, float(np.max(lo - field, initial=0.0)), float(np.max(field - hi, initial=0.0))
            )
    if not math.isfinite(worst) or worst > tol:
        raise BlowUpError(
            f"solution left the {frame}-frame box by {worst!r} (tolerance {tol!r})"
        )
    return np.clip(u, lo1, hi1), np.clip(v, lo2, hi2)


def project_state(state: SystemState, params: NormalizedParams, tol: float = 1e-9) -> SystemState:
    """Clip a state to its frame's invariant box; excursions beyond tol raise
    :class:`BlowUpError`."""
    u, v = _project_fields(state.u, state.v, state.frame, params, tol)
    return state.replace(u=u, v=v)


def time_tau_map(
    state: SystemState,
    params: NormalizedParams,
    grid: Grid1D,
    solver: SolverConfig,
) -> SystemState:
    """Season flow: advance a start-of-season state (t = 0) to t = tau.

    Second-order Strang splitting: half a diffusion step, one Runge-Kutta
    step of the reaction, half a diffusion step, repeated tau/dt times. The
    state is projected to the frame's invariant box after every step; any
    excursion beyond the projection tolerance aborts with
    :class:`BlowUpError`. Preserves the pointwise partial order between
    states in the order-preserving frames.
    """
    if abs(state.t) > 1e-9:
        raise ConfigError(
            f"season flow starts at t = 0 (just after a fire), got t = {state.t!r}"
        )
    if state.u.shape != (grid.n_cells,):
        raise ConfigError(
            f"state has {state.u.shape[0]} points but grid has {grid.n_cells}"
        )
    n_steps = solver.steps_per_season(params.tau)
    dt = solver.dt
    half = dt / 2.0
    u, v = state.u, state.v
    for _ in range(n_steps):
        u = diffusion_step(u, params.d_u, half, grid, solver.scheme)
        v = diffusion_step(v, params.d_v, half, grid, solver.scheme)
        u, v = reaction_step_rk4(u, v, dt, params, state.frame)
        u = diffusion_step(u, params.d_u, half, grid, solver.scheme)
        v = diffusion_step(v, params.d_v, half, grid, solver.scheme)
        u, v = _project_fields(u, v, state.frame, params, solver.projection_tol)
    return state.replace(u=u, v=v, t=params.tau)


def _to_raw(u: np.ndarray, v: np.ndarray, frame: str, params: NormalizedParams):
    if frame == "raw":
        return u, v
    if frame == "cooperative":
        return u, 1.0 - v
    if frame == "shifted":
        return u, 1.0 - (v + vbar(params))
    if frame == "increasing":
        return 1.0 - u, v
    raise ConfigError(f"unknown frame {frame!r}; expected one of {FRAMES}")


def _from_raw(U: np.ndarray, V: np.ndarray, frame: str, params: NormalizedParams):
    if frame == "raw":
        return U, V
    if frame == "cooperative":
        return U, 1.0 - V
    if frame == "shifted":
        return U, (1.0 - V) - vbar(params)
    if frame == "increasing":
        return 1.0 - U, V
    raise ConfigError(f"unknown frame {frame!r}; expected one of {FRAMES}")


def change_frame(
    state: SystemState, target_frame: str, params: NormalizedParams
) -> SystemState:
    """Re-express a state in another frame. The maps are affine and exact;
    round-tripping returns the original values to machine precision."""
    if target_frame == state.frame:
        return state
    U, V = _to_raw(state.u, state.v, state.frame, params)
    u, v = _from_raw(U, V, target_frame, params)
    return SystemState(
        frame=target_frame,
        u=np.asarray(u, dtype=float),
        v=np.asarray(v, dtype=float),
        generation=state.generation,
        t=state.t,
    )


def write_snapshot(state: SystemState, grid: Grid1D, destination) -> None:
    """Write one state as CSV rows (generation, t, x, component1, component2,
    frame), one row per grid point.

    ``destination`` is a path or an open text file; passing a file lets the
    caller prepend provenance comments.
    """
    if state.u.shape != (grid.n_cells,):
        raise ConfigError(
            f"state has {state.u.shape[0]} points but grid has {grid.n_cells}"
        )

    def _write(fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SNAPSHOT_COLUMNS)
        for x, cu, cv in zip(grid.x, state.u, state.v):
            writer.writerow(
                [state.generation, repr(state.t), repr(float(x)), repr(float(cu)), repr(float(cv)), state.frame]
            )

    if isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__"):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            _write(fh)
    elif isinstance(destination, io.TextIOBase) or hasattr(destination, "write"):
        _write(destination)
    else:
        raise TypeError(f"destination must be a path or text file, got {type(destination)!r}")
