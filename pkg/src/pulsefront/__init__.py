"""Fire-pulsed savanna invasion toolkit.

A tree/grass competition model driven by seasonal fire pulses: a continuous
growth-and-competition flow between fires, an instantaneous fire impulse at
the end of each season, and the generation map obtained by composing the
two. The package provides closed-form single-season solutions and stability
thresholds (:mod:`pulsefront.homogeneous`, :mod:`pulsefront.savanna`), a
splitting solver for the spatial model (:mod:`pulsefront.dynamics`,
:mod:`pulsefront.impulses`), and spreading-speed measurement via front
tracking, diffusion sweeps, and profile recursions
(:mod:`pulsefront.spreading`).
"""

__version__ = "0.1.0"

from .savanna import (
    ConfigError,
    NormalizedParams,
    SavannaParams,
    ScaleInfo,
    ThresholdReport,
    carrying_capacity,
    fire_intensity,
    fire_mortality,
    format_config,
    growth_rate,
    load_config,
    normalize,
    parse_config_text,
    scale_info,
    thresholds_raw,
)
from .homogeneous import (
    HomogeneousState,
    StabilityVerdict,
    classify,
    fixed_points,
    iterate_season_map,
    jacobian_at,
    logistic_exact,
    log_mass_Iu,
    season_map,
    stability,
    thresholds,
    v_exact,
    vbar,
)
from .dynamics import (
    BlowUpError,
    Grid1D,
    SolverConfig,
    SystemState,
    change_frame,
    diffusion_step,
    frame_bounds,
    project_state,
    reaction_rhs,
    reaction_step_rk4,
    time_tau_map,
    write_snapshot,
)
from .impulses import (
    ImpulseSpec,
    TraceWriter,
    impulse_map,
    recursion_step,
    run_generations,
)
from .spreading import (
    BoundaryContaminationError,
    CstarEstimate,
    FrontRunPlan,
    FrontTrace,
    PowerLawFit,
    SpeedEstimate,
    SweepPoint,
    WaveProfile,
    build_cstar_profile,
    estimate_cstar,
    estimate_cstar_fast,
    estimate_speed,
    fit_power_law,
    junction_state,
    plan_front_run,
    read_sweep_csv,
    run_front_trace,
    sweep_speed_vs_diffusion,
    track_front,
    write_sweep_csv,
)

__all__ = [
    "__version__",
    # savanna
    "ConfigError",
    "NormalizedParams",
    "SavannaParams",
    "ScaleInfo",
    "ThresholdReport",
    "carrying_capacity",
    "fire_intensity",
    "fire_mortality",
    "format_config",
    "growth_rate",
    "load_config",
    "normalize",
    "parse_config_text",
    "scale_info",
    "thresholds_raw",
    # homogeneous
    "HomogeneousState",
    "StabilityVerdict",
    "classify",
    "fixed_points",
    "iterate_season_map",
    "jacobian_at",
    "logistic_exact",
    "log_mass_Iu",
    "season_map",
    "stability",
    "thresholds",
    "v_exact",
    "vbar",
    # dynamics
    "BlowUpError",
    "Grid1D",
    "SolverConfig",
    "SystemState",
    "change_frame",
    "diffusion_step",
    "frame_bounds",
    "project_state",
    "reaction_rhs",
    "reaction_step_rk4",
    "time_tau_map",
    "write_snapshot",
    # impulses
    "ImpulseSpec",
    "TraceWriter",
    "impulse_map",
    "recursion_step",
    "run_generations",
    # spreading
    "BoundaryContaminationError",
    "CstarEstimate",
    "FrontRunPlan",
    "FrontTrace",
    "PowerLawFit",
    "SpeedEstimate",
    "SweepPoint",
    "WaveProfile",
    "build_cstar_profile",
    "estimate_cstar",
    "estimate_cstar_fast",
    "estimate_speed",
    "fit_power_law",
    "junction_state",
    "plan_front_run",
    "read_sweep_csv",
    "run_front_trace",
    "sweep_speed_vs_diffusion",
    "track_front",
    "write_sweep_csv",
]
