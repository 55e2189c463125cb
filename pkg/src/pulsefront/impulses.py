"""Fire impulses and the generation-to-generation recursion.

A generation is one fire-season cycle observed just before a fire. The fire
acts instantaneously: grass burns down by a fixed fraction, trees suffer a
mortality fraction that grows with local grass biomass (fuel) and shrinks
with local tree biomass (escape from the flame zone). Composing the impulse
with the season flow of :mod:`.dynamics` gives the one-generation map; both
the impulse and the flow preserve the pointwise partial order in the
order-preserving frames, so the composition does too.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import FRAMES, Grid1D, SolverConfig, SystemState, time_tau_map
from .homogeneous import vbar
from .savanna import ConfigError, NormalizedParams

__all__ = [
    "ImpulseSpec",
    "impulse_map",
    "recursion_step",
    "run_generations",
    "TraceWriter",
]

# A pre-fire state must sit at the season end; its time stamp may be off by
# at most this much.
SEASON_END_TOL = 1e-9

TRACE_COLUMNS = ("generation", "x", "component1", "component2")


@dataclass(frozen=True)
class ImpulseSpec:
    """Parameters of the instantaneous fire map.

    ``season_length`` is the time stamp a pre-fire state must carry.
    ``grass_level`` is the pre-fire grass deficit of the grassland state,
    needed only to interpret shifted-frame states; it is NaN when the
    grassland state does not exist for the generating parameters.
    """

    eta: float            # grass fraction removed per fire
    alpha: float          # grass fraction at half fire intensity
    p: float              # tree-escape shape against tree fraction
    a_min: float          # fire mortality floor (tall trees)
    a_max: float          # fire mortality ceiling (seedlings)
    season_length: float  # dimensionless time between fires
    grass_level: float = float("nan")

    def __post_init__(self) -> None:
        if not 0 <= self.eta < 1:
            raise ConfigError(f"eta must lie in [0, 1), got {self.eta}")
        if not 0 < self.a_min <= self.a_max <= 1:
            raise ConfigError(
                f"mortality bounds must satisfy 0 < a_min <= a_max <= 1, "
                f"got ({self.a_min}, {self.a_max})"
            )
        if not (math.isfinite(self.season_length) and self.season_length > 0):
            raise ConfigError(
                f"season_length must be positive, got {self.season_length!r}"
            )
        for name in ("alpha", "p"):
            value = getattr(self, name)
            if value < 0 or not math.isfinite(value):
                raise ConfigError(f"{name} must be finite and nonnegative, got {value}")

    @classmethod
    def from_params(cls, params: NormalizedParams) -> "ImpulseSpec":
        R0 = (1.0 - params.eta) * math.exp(params.lam * params.tau)
        return cls(
            eta=params.eta,
            alpha=params.alpha,
            p=params.p,
            a_min=params.a_min,
            a_max=params.a_max,
            season_length=params.tau,
            grass_level=vbar(params) if R0 > 1.0 else float("nan"),
        )

    def escape_mortality(self, tree_fraction):
        """Per-fire tree mortality cap at the given tree fraction."""
        return self.a_min + (self.a_max - self.a_min) * np.exp(-self.p * np.asarray(tree_fraction, dtype=float))

    def intensity_raw(self, grass_fraction):
        """Fire intensity from raw grass fraction: quadratic saturation with
        zero slope at zero fuel."""
        g2 = np.square(np.asarray(grass_fraction, dtype=float))
        return g2 / (g2 + self.alpha * self.alpha)


def impulse_map(state: SystemState, spec: ImpulseSpec) -> SystemState:
    """Apply one fire to a pre-fire state (t = tau), yielding the start of the
    next generation (t = 0, generation + 1). Exact pointwise algebra, no grid
    coupling; order-preserving in the order-preserving frames."""
    if abs(state.t - spec.season_length) > SEASON_END_TOL:
        raise ConfigError(
            f"impulse acts on pre-fire states (t = {spec.season_length!r}), "
            f"got t = {state.t!r}"
        )
    u, v = state.u, state.v
    if state.frame == "raw":
        U, V = u, v
        mortality = spec.intensity_raw(V) * spec.escape_mortality(U)
        u_next = (1.0 - mortality) * U
        v_next = (1.0 - spec.eta) * V
    elif state.frame == "cooperative":
        V = 1.0 - v
        mortality = spec.intensity_raw(V) * spec.escape_mortality(u)
        u_next = (1.0 - mortality) * u
        v_next = (1.0 - spec.eta) * v + spec.eta
    elif state.frame == "shifted":
        if not math.isfinite(spec.grass_level):
            raise ConfigError(
                "shifted frame requires the grassland state; it does not exist "
                "for these parameters (R0 <= 1)"
            )
        vb = spec.grass_level
        V = 1.0 - (v + vb)
        mortality = spec.intensity_raw(V) * spec.escape_mortality(u)
        u_next = (1.0 - mortality) * u
        v_next = (1.0 - spec.eta) * v + spec.eta * (1.0 - vb)
    elif state.frame == "increasing":
        U = 1.0 - u
        mortality = spec.intensity_raw(v) * spec.escape_mortality(U)
        u_next = u + mortality * U
        v_next = (1.0 - spec.eta) * v
    else:
        raise ConfigError(f"unknown frame {state.frame!r}; expected one of {FRAMES}")
    return SystemState(
        frame=state.frame,
        u=np.asarray(u_next, dtype=float),
        v=np.asarray(v_next, dtype=float),
        generation=state.generation + 1,
        t=0.0,
    )


def recursion_step(
    state: SystemState,
    params: NormalizedParams,
    grid: Grid1D,
    solver: SolverConfig,
    spec: ImpulseSpec | None = None,
) -> SystemState:
    """One full generation acting on pre-fire states: fire, then season flow.

    Input and output both sit at the season end (t = tau), one generation
    apart. On spatially constant fields this reproduces the closed-form
    homogeneous map of :mod:`.homogeneous` to solver accuracy.
    """
    if abs(state.t - params.tau) > SEASON_END_TOL:
        raise ConfigError(
            f"recursion acts on pre-fire states (t = tau = {params.tau!r}), "
            f"got t = {state.t!r}"
        )
    if spec is None:
        spec = ImpulseSpec.from_params(params)
    burned = impulse_map(state, spec)
    return time_tau_map(burned, params, grid, solver)


def run_generations(
    state: SystemState,
    params: NormalizedParams,
    grid: Grid1D,
    solver: SolverConfig,
    n_generations: int,
    observers: tuple = (),
) -> SystemState:
    """Iterate the one-generation recursion n_generations times.

    Observers are callables ``observer(state)``; each is invoked on the
    initial state and again after every completed generation, always with a
    pre-fire (t = tau) state. Returns the final state.
    """
    if n_generations < 0:
        raise ConfigError(f"n_generations must be >= 0, got {n_generations}")
    spec = ImpulseSpec.from_params(params)
    for observer in observers:
        observer(state)
    for _ in range(n_generations):
        state = recursion_step(state, params, grid, solver, spec=spec)
        for observer in observers:
            observer(state)
    return state


class TraceWriter:
    """Observer that appends every observed state to a CSV trace.

    Columns: generation, x, component1, component2; one row per grid point
    per observed generation, flushed after each generation so a partial file
    is still usable if the run dies.
    """

    def __init__(self, destination, grid: Grid1D, comments: tuple[str, ...] = ()):
        self._grid = grid
        if isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__"):
            self._fh = open(destination, "w", encoding="utf-8", newline="")
            self._owns = True
        else:
            self._fh = destination
            self._owns = False
        for line in comments:
            self._fh.write(f"# {line}\n")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(TRACE_COLUMNS)
        self._fh.flush()

    def __call__(self, state: SystemState) -> None:
        for x, cu, cv in zip(self._grid.x, state.u, state.v):
            self._writer.writerow(
                [state.generation, repr(float(x)), repr(float(cu)), repr(float(cv))]
            )
        self._fh.flush()

    def close(self) -> None:
        if self._owns:
            self._fh.close()

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
