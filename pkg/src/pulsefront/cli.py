"""Command-line front end.

Subcommands: ``thresholds`` (closed-form stability report), ``simulate``
(front or zero initialized generation runs with snapshot/trace output),
``speed-sweep`` (front speed versus diffusion coefficient), ``fit``
(power-law fit of a sweep CSV), and ``cstar`` (slowest/fastest speed
recursion). Configuration comes only from the config file and flags; no
environment variables are read. Identical invocations produce byte-identical
outputs: every file is written with repr-precision floats, no timestamps,
and rows in a deterministic order, and each output file starts with ``#``
provenance comments carrying the fully resolved configuration.

Exit codes: 0 success, 2 configuration or validation error, 3 numerical
failure (blow-up or a boundary-contaminated front), 4 inconclusive
speed-recursion classification.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import shutil
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    BlowUpError,
    SolverConfig,
    SystemState,
    change_frame,
    write_snapshot,
)
from .homogeneous import classify, thresholds
from .impulses import TraceWriter
from .savanna import (
    ConfigError,
    SavannaParams,
    format_config,
    load_config,
    normalize,
    thresholds_raw,
)
from .spreading import (
    BoundaryContaminationError,
    STEPS_PER_SEASON,
    build_cstar_profile,
    estimate_cstar,
    estimate_cstar_fast,
    fit_power_law,
    junction_state,
    plan_front_run,
    read_sweep_csv,
    run_front_trace,
    sweep_speed_vs_diffusion,
    write_sweep_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INCONCLUSIVE = 4

FRAME_CHOICES = ("raw", "cooperative", "shifted", "increasing")

# Default diffusion sweep ranges per invasion kind (normalized units).
DEFAULT_SWEEP_RANGE = {"tree": (0.001, 0.9), "grass": (0.001, 1.0)}
DEFAULT_SWEEP_COUNT = 6
DEFAULT_SIMULATE_GENERATIONS = 60


@dataclass(frozen=True)
class RunManifest:
    """Resolved description of one invocation, embedded in every output."""

    subcommand: str
    config_path: str | None
    out_dir: str | None
    overrides: tuple[tuple[str, str], ...]
    force: bool

    def comment_lines(self, params: SavannaParams | None) -> tuple[str, ...]:
        lines = [
            f"pulsefront {__version__} {self.subcommand}",
            f"config = {self.config_path}",
            f"force = {self.force}",
        ]
        for key, value in self.overrides:
            lines.append(f"{key} = {value}")
        if params is not None:
            lines.append("resolved config:")
            for cfg_line in format_config(params).splitlines():
                lines.append(f"  {cfg_line}")
        return tuple(lines)


def _manifest_from_args(args, keys: tuple[str, ...]) -> RunManifest:
    overrides = []
    for key in sorted(keys):
        value = getattr(args, key.replace("-", "_"))
        if value is not None:
            overrides.append((key, str(value)))
    return RunManifest(
        subcommand=args.subcommand,
        config_path=getattr(args, "config", None),
        out_dir=getattr(args, "out", None),
        overrides=tuple(overrides),
        force=bool(getattr(args, "force", False)),
    )


class _OutputDir:
    """Builds the output tree in a temporary sibling, then renames it into
    place, so a crashed run never leaves a half-written output directory."""

    def __init__(self, out: str, force: bool):
        self.final = Path(out)
        self.force = force
        if self.final.exists():
            if not self.final.is_dir():
                raise ConfigError(f"output path {out!r} exists and is not a directory")
            if any(self.final.iterdir()) and not force:
                raise ConfigError(
                    f"output directory {out!r} is not empty (use --force to replace it)"
                )
        parent = self.final.parent
        parent.mkdir(parents=True, exist_ok=True)
        self._tmp = Path(
            tempfile.mkdtemp(prefix=f".{self.final.name}.partial-", dir=parent)
        )

    @property
    def staging(self) -> Path:
        return self._tmp

    def commit(self) -> None:
        if self.final.exists():
            if any(self.final.iterdir()) and not self.force:
                raise ConfigError(
                    f"output directory {self.final} became non-empty during the run"
                )
            shutil.rmtree(self.final)
        os.replace(self._tmp, self.final)

    def abort(self) -> None:
        shutil.rmtree(self._tmp, ignore_errors=True)


def _write_text(path: Path, comments: tuple[str, ...], body: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(body)


def _write_report_csv(path: Path, comments: tuple[str, ...], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("quantity", "value"))
        for row in rows:
            writer.writerow(row)


def _auto_kind(norm) -> str:
    R0, R1, R2 = thresholds(norm)
    if R2 > 1.0 and R1 < 1.0:
        return "tree"
    if R1 > 1.0 and R2 < 1.0:
        return "grass"
    raise ConfigError(
        f"configuration is not monostable (R1 = {R1!r}, R2 = {R2!r}); "
        "choose parameters where exactly one vegetation state is stable"
    )


def cmd_thresholds(args) -> int:
    manifest = _manifest_from_args(args, ())
    params = load_config(args.config)
    raw_report = thresholds_raw(params)
    norm_report = classify(normalize(params))
    comments = manifest.comment_lines(params)

    print("raw units:")
    print(f"  R0 = {raw_report.R0:.4f}")
    print(f"  R1 = {raw_report.R1:.4f}")
    print(f"  R2 = {raw_report.R2:.4f}")
    if math.isfinite(raw_report.grass_level):
        print(f"  Gbar = {raw_report.grass_level:.4f}")
    for label, (x, y) in raw_report.equilibria:
        verdict = dict(raw_report.verdicts)[label]
        print(f"  {label} = ({x:.4f}, {y:.4f}) : {verdict}")
    print("normalized units:")
    print(f"  R0 = {norm_report.R0:.4f}")
    print(f"  R1 = {norm_report.R1:.4f}")
    print(f"  R2 = {norm_report.R2:.4f}")
    if math.isfinite(norm_report.grass_level):
        print(f"  vbar = {norm_report.grass_level:.4f}")

    if args.out is not None:
        out = _OutputDir(args.out, args.force)
        try:
            _write_text(out.staging / "thresholds_raw.txt", comments, raw_report.to_text())
            _write_report_csv(
                out.staging / "thresholds_raw.csv", comments, raw_report.to_csv_rows()
            )
            _write_text(
                out.staging / "thresholds_normalized.txt", comments, norm_report.to_text()
            )
            _write_report_csv(
                out.staging / "thresholds_normalized.csv",
                comments,
                norm_report.to_csv_rows(),
            )
            out.commit()
        except BaseException:
            out.abort()
            raise
    return EXIT_OK


class _ConvertingObserver:
    def __init__(self, inner, frame: str, norm):
        self._inner = inner
        self._frame = frame
        self._norm = norm

    def __call__(self, state: SystemState) -> None:
        self._inner(change_frame(state, self._frame, self._norm))


def cmd_simulate(args) -> int:
    manifest = _manifest_from_args(
        args, ("generations", "frame", "init", "dx", "dt")
    )
    params = load_config(args.config)
    norm = normalize(params)
    kind = _auto_kind(norm)
    n_generations = args.generations or DEFAULT_SIMULATE_GENERATIONS
    plan = plan_front_run(
        norm,
        kind,
        n_generations=n_generations,
        dx=args.dx,
        dt=args.dt,
        deep_left=True,
    )
    out_frame = args.frame or plan.frame
    comments = manifest.comment_lines(params) + (
        f"invasion kind = {kind}",
        f"run frame = {plan.frame}",
        f"output frame = {out_frame}",
        f"grid = [{plan.grid.x_min!r}, {plan.grid.x_max!r}] with {plan.grid.n_cells} cells",
        f"dt = {plan.solver.dt!r}",
    )

    if args.init == "front":
        initial = junction_state(
            plan.grid, plan.frame, plan.beta, plan.front_width, norm.tau
        )
    else:
        zeros = np.zeros(plan.grid.n_cells)
        initial = SystemState(
            frame=plan.frame, u=zeros, v=zeros.copy(), generation=0, t=norm.tau
        )

    out = _OutputDir(args.out, args.force)
    try:
        with open(
            out.staging / "snapshot_initial.csv", "w", encoding="utf-8", newline=""
        ) as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            write_snapshot(change_frame(initial, out_frame, norm), plan.grid, fh)

        trace_writer = TraceWriter(
            out.staging / "trace.csv", plan.grid, comments=comments
        )
        observer = _ConvertingObserver(trace_writer, out_frame, norm)
        try:
            trace, final = run_front_trace(
                plan, initial_state=initial, extra_observers=(observer,)
            )
        finally:
            trace_writer.close()

        with open(
            out.staging / "snapshot_final.csv", "w", encoding="utf-8", newline=""
        ) as fh:
            for line in comments:
                fh.write(f"# {line}\n")
            write_snapshot(change_frame(final, out_frame, norm), plan.grid, fh)
        out.commit()
    except BaseException:
        out.abort()
        raise
    n_valid = int(np.sum(trace.valid))
    print(f"ran {n_generations} generations ({kind} invasion, {plan.frame} frame)")
    print(f"front crossings tracked: {n_valid} of {trace.n_observations} observations")
    print(f"outputs written to {args.out}")
    return EXIT_OK


def _parse_d_values(args, kind: str) -> list[float]:
    if args.d_grid is not None:
        try:
            values = [float(part) for part in args.d_grid.split(",") if part.strip()]
        except ValueError:
            raise ConfigError(f"--d-grid must be comma-separated numbers, got {args.d_grid!r}") from None
        if not values:
            raise ConfigError("--d-grid must contain at least one value")
        return values
    lo, hi = DEFAULT_SWEEP_RANGE[kind]
    lo = args.d_min if args.d_min is not None else lo
    hi = args.d_max if args.d_max is not None else hi
    count = args.d_count if args.d_count is not None else DEFAULT_SWEEP_COUNT
    if not (lo > 0 and hi > lo):
        raise ConfigError(f"need 0 < --d-min < --d-max, got ({lo}, {hi})")
    if count < 1:
        raise ConfigError(f"--d-count must be >= 1, got {count}")
    if count == 1:
        return [lo]
    return [float(d) for d in np.geomspace(lo, hi, count)]


def cmd_speed_sweep(args) -> int:
    manifest = _manifest_from_args(
        args,
        ("component", "d-grid", "d-min", "d-max", "d-count", "generations", "dx", "dt", "jobs"),
    )
    params = load_config(args.config)
    norm = normalize(params)
    kind = args.component or _auto_kind(norm)
    d_values = _parse_d_values(args, kind)
    points = sweep_speed_vs_diffusion(
        norm,
        kind,
        d_values,
        n_generations=args.generations,
        dx=args.dx,
        dt=args.dt,
        jobs=args.jobs,
    )
    comments = manifest.comment_lines(params) + (
        f"invasion kind = {kind}",
        "speed unit = space per unit normalized time",
    )
    out = _OutputDir(args.out, args.force)
    try:
        write_sweep_csv(points, out.staging / "sweep.csv", comments=comments)
        out.commit()
    except BaseException:
        out.abort()
        raise
    for pt in points:
        print(f"d = {pt.d!r}: speed = {pt.speed!r} (stderr {pt.stderr!r})")
    print(f"outputs written to {args.out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    manifest = _manifest_from_args(args, ())
    points = read_sweep_csv(args.input)
    if len(points) < 3:
        raise ConfigError(
            f"{args.input}: power-law fit needs at least 3 sweep rows, got {len(points)}"
        )
    fit = fit_power_law([(pt.d, pt.speed) for pt in points])
    carried = []
    with open(args.input, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            carried.append(f"from input: {line[1:].strip()}")
    comments = manifest.comment_lines(None) + (f"input = {args.input}",) + tuple(carried)
    print(fit.to_text(), end="")
    if args.out is not None:
        out = _OutputDir(args.out, args.force)
        try:
            _write_text(out.staging / "fit.txt", comments, fit.to_text())
            out.commit()
        except BaseException:
            out.abort()
            raise
        print(f"outputs written to {args.out}")
    return EXIT_OK


def cmd_cstar(args) -> int:
    manifest = _manifest_from_args(
        args, ("component", "c-min", "c-max", "tol", "max-iterations", "dx", "dt")
    )
    params = load_config(args.config)
    norm = normalize(params)
    kind = args.component or _auto_kind(norm)
    solver = SolverConfig(dt=args.dt if args.dt is not None else norm.tau / STEPS_PER_SEASON)
    c_range = None
    if (args.c_min is None) != (args.c_max is None):
        raise ConfigError("--c-min and --c-max must be given together")
    if args.c_min is not None:
        c_range = (args.c_min, args.c_max)
    profile = build_cstar_profile(norm, kind, dx=args.dx, c_cap=args.c_max)
    slowest = estimate_cstar(
        norm,
        profile,
        solver=solver,
        c_range=c_range,
        tol=args.tol,
        max_iterations=args.max_iterations,
    )
    fastest = estimate_cstar_fast(
        norm,
        profile,
        solver=solver,
        c_range=c_range,
        tol=args.tol,
        max_iterations=args.max_iterations,
    )
    comments = manifest.comment_lines(params) + (
        f"invasion kind = {kind}",
        "speed unit = space per generation",
    )

    def report(name, est) -> str:
        lines = [f"{name}:"]
        lines.append(f"  status = {est.status}")
        lines.append(f"  lower = {est.lower!r}")
        lines.append(f"  upper = {est.upper!r}")
        if est.status == "converged":
            lines.append(f"  point = {est.point!r}")
        lines.append(
            "  evaluations = "
            + "; ".join(f"{c!r} -> {branch}" for c, branch in est.evaluations)
        )
        return "\n".join(lines) + "\n"

    body = report("slowest speed", slowest) + report("fastest speed", fastest)
    print(body, end="")
    if args.out is not None:
        out = _OutputDir(args.out, args.force)
        try:
            _write_text(out.staging / "cstar.txt", comments, body)
            rows = [
                ("slowest_lower", repr(slowest.lower)),
                ("slowest_upper", repr(slowest.upper)),
                ("slowest_status", slowest.status),
                ("fastest_lower", repr(fastest.lower)),
                ("fastest_upper", repr(fastest.upper)),
                ("fastest_status", fastest.status),
            ]
            _write_report_csv(out.staging / "cstar.csv", comments, rows)
            out.commit()
        except BaseException:
            out.abort()
            raise
        print(f"outputs written to {args.out}")
    if slowest.status != "converged" or fastest.status != "converged":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsefront",
        description=(
            "Savanna fire-pulse invasion toolkit: stability thresholds, "
            "generation simulations, and spreading-speed experiments."
        ),
    )
    parser.add_argument("--version", action="version", version=f"pulsefront {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, out_required: bool):
        p.add_argument("--config", required=True, help="scenario config file (key = value lines)")
        p.add_argument(
            "--out",
            required=out_required,
            default=None,
            help="output directory (created atomically)",
        )
        p.add_argument(
            "--force",
            action="store_true",
            help="replace a non-empty output directory",
        )

    p_thresh = sub.add_parser(
        "thresholds", help="closed-form stability thresholds and equilibria"
    )
    add_common(p_thresh, out_required=False)
    p_thresh.set_defaults(func=cmd_thresholds)

    p_sim = sub.add_parser(
        "simulate", help="run the generation recursion and write snapshots"
    )
    add_common(p_sim, out_required=True)
    p_sim.add_argument("--generations", type=int, default=None, help="number of fire seasons")
    p_sim.add_argument(
        "--frame",
        choices=FRAME_CHOICES,
        default=None,
        help="frame for the output files (default: the run's own frame)",
    )
    p_sim.add_argument(
        "--init", choices=("front", "zero"), default="front", help="initial condition"
    )
    p_sim.add_argument("--dx", type=float, default=None, help="grid spacing override")
    p_sim.add_argument("--dt", type=float, default=None, help="splitting step override")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser(
        "speed-sweep", help="front speed at each diffusion coefficient"
    )
    add_common(p_sweep, out_required=True)
    p_sweep.add_argument(
        "--component",
        choices=("tree", "grass"),
        default=None,
        help="which coefficient to sweep (default: inferred from the thresholds)",
    )
    p_sweep.add_argument("--d-grid", default=None, help="comma-separated diffusion values")
    p_sweep.add_argument("--d-min", type=float, default=None, help="smallest diffusion value")
    p_sweep.add_argument("--d-max", type=float, default=None, help="largest diffusion value")
    p_sweep.add_argument(
        "--d-count", type=int, default=None, help="number of log-spaced values"
    )
    p_sweep.add_argument("--generations", type=int, default=None, help="generations per run")
    p_sweep.add_argument("--dx", type=float, default=None, help="grid spacing override")
    p_sweep.add_argument("--dt", type=float, default=None, help="splitting step override")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel sweep processes")
    p_sweep.set_defaults(func=cmd_speed_sweep)

    p_fit = sub.add_parser("fit", help="power-law fit of a speed-sweep CSV")
    p_fit.add_argument("--input", required=True, help="sweep.csv from speed-sweep")
    p_fit.add_argument("--out", default=None, help="output directory (created atomically)")
    p_fit.add_argument("--force", action="store_true", help="replace a non-empty output directory")
    p_fit.set_defaults(func=cmd_fit)

    p_cstar = sub.add_parser(
        "cstar", help="slowest/fastest spreading speed via the profile recursion"
    )
    add_common(p_cstar, out_required=False)
    p_cstar.add_argument(
        "--component",
        choices=("tree", "grass"),
        default=None,
        help="invasion kind (default: inferred from the thresholds)",
    )
    p_cstar.add_argument("--c-min", type=float, default=None, help="lower frame speed")
    p_cstar.add_argument("--c-max", type=float, default=None, help="upper frame speed")
    p_cstar.add_argument("--tol", type=float, default=None, help="bisection tolerance")
    p_cstar.add_argument(
        "--max-iterations", type=int, default=800, help="profile recursion budget per candidate"
    )
    p_cstar.add_argument("--dx", type=float, default=None, help="grid spacing override")
    p_cstar.add_argument("--dt", type=float, default=None, help="splitting step override")
    p_cstar.set_defaults(func=cmd_cstar)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BlowUpError, BoundaryContaminationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
