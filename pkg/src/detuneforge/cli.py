"""Command-line interface.

Subcommands synthesize schedules, simulate faulty dynamics, run target-angle
sweeps, scan infidelity against error strength, and emit the bang-bang phase
portrait.  All tabular artifacts are CSV (or JSON records with --format json)
with floats printed to 12 significant digits, so identical configurations
produce byte-identical files.

Exit codes: 0 success, 2 bad arguments, 3 solver failure, 4 verification
failure.
"""

from __future__ import annotations

import json
import math
import os
import sys
from pathlib import Path

import click

from . import solver
from .propagation import (
    DEFAULT_SCAN_GRID,
    bloch_trajectory,
    costs,
    fit_loglog_slope,
    infidelity_scan,
    propagate_order_by_order,
    simulate,
)
from .schedules import (
    DEFAULT_SAMPLES,
    direct_schedule,
    pa_optimal_schedule,
    rotate_axis,
    short_corpse,
    short_corpse_params,
)
from .su2 import target_gate, trace_fidelity

EXIT_SOLVER_FAILURE = 3
EXIT_VERIFICATION_FAILURE = 4

U1_VERIFY_TOL = 1e-6
FIDELITY_VERIFY_TOL = 1e-6

_KINDS = ("direct", "short_corpse", "pa_optimal")
_TRAJECTORY_POINTS = 201


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_table(out_dir: Path, name: str, fmt: str, header: list[str], rows) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out_dir / f"{name}.json"
        records = [
            {key: (float(v) if isinstance(v, float) else v) for key, v in zip(header, row)}
            for row in rows
        ]
        path.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")
    else:
        path = out_dir / f"{name}.csv"
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
    return path


def _write_json(out_dir: Path, name: str, payload: dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _angle(value: float, in_pi: bool) -> float:
    return value * math.pi if in_pi else value


def _check_theta(theta_f: float) -> float:
    if not 0.0 <= theta_f <= 2.0 * math.pi:
        raise click.BadParameter("theta_f must lie in [0, 2 pi]", param_hint="--theta-f")
    return theta_f


def _check_f(f: float) -> float:
    if not 0.0 <= f <= 0.5:
        raise click.BadParameter("f must lie in [0, 0.5]", param_hint="--f")
    return f


def _build_schedule(kind, theta_f, phi_f, samples, complement):
    if kind == "direct":
        return direct_schedule(theta_f, phi_f)
    if kind == "short_corpse":
        return short_corpse(theta_f, phi_f, use_complement=complement)[0]
    sol = solver.solve_k(theta_f)
    sched = pa_optimal_schedule(sol, samples)
    return rotate_axis(sched, phi_f) if phi_f else sched


def _threads_from_env() -> int:
    raw = os.environ.get("DETUNE_FORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@click.group()
def main():
    """Detuning-robust one-qubit control synthesis and verification."""


_common = [
    click.option("--phi-f", type=float, default=0.0, show_default=True,
                 help="Azimuth of the target rotation axis."),
    click.option("--out", type=click.Path(file_okay=False, path_type=Path),
                 default=Path("."), show_default=True, help="Output directory."),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                 default="csv", show_default=True, help="Table file format."),
    click.option("--in-pi", is_flag=True, help="Interpret angles as multiples of pi."),
]


def _add(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return deco


@main.command()
@click.option("--theta-f", type=float, required=True, help="Target rotation angle.")
@click.option("--samples", type=int, default=DEFAULT_SAMPLES, show_default=True,
              help="Sample count of the synthesized waveform.")
@_add(_common)
def solve(theta_f, samples, phi_f, out, fmt, in_pi):
    """Solve the pulse-area-optimal control and write schedule + solution."""
    theta_f = _check_theta(_angle(theta_f, in_pi))
    phi_f = _angle(phi_f, in_pi)
    try:
        sol = solver.solve_k(theta_f)
    except solver.SolverError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_SOLVER_FAILURE)
    sched = pa_optimal_schedule(sol, samples)
    if phi_f:
        sched = rotate_axis(sched, phi_f)
    _, u1 = propagate_order_by_order(sched)
    u1_norm = u1.norm()
    t = sched.times()
    rows = [(float(ti), float(wx), float(wy)) for ti, (wx, wy) in zip(t, sched.samples)]
    _write_table(out, "schedule", fmt, ["t", "omega_x", "omega_y"], rows)
    _write_json(out, "solution", {
        "theta_f": sol.theta_f,
        "k": sol.k,
        "branch": sol.branch,
        "T": sol.T,
        "g_residual": sol.g_residual,
        "u1_norm": u1_norm,
    })
    click.echo(f"theta_f={_fmt(sol.theta_f)} k={_fmt(sol.k)} branch={sol.branch} "
               f"T={_fmt(sol.T)} u1_norm={_fmt(u1_norm)}")
    if u1_norm > U1_VERIFY_TOL:
        click.echo("verification failure: first-order term does not vanish", err=True)
        sys.exit(EXIT_VERIFICATION_FAILURE)


@main.command(name="simulate")
@click.option("--theta-f", type=float, required=True, help="Target rotation angle.")
@click.option("--f", type=float, default=0.0, show_default=True, help="Detuning strength.")
@click.option("--kind", type=click.Choice(_KINDS), default="direct", show_default=True)
@click.option("--h", type=float, default=None, help="Integrator step override.")
@click.option("--samples", type=int, default=DEFAULT_SAMPLES, show_default=True)
@click.option("--complement", is_flag=True,
              help="Use the complementary short-CORPSE for theta_f <= pi.")
@_add(_common)
def simulate_cmd(theta_f, f, kind, h, samples, complement, phi_f, out, fmt, in_pi):
    """Simulate a schedule under detuning and write trajectory + summary."""
    theta_f = _check_theta(_angle(theta_f, in_pi))
    phi_f = _angle(phi_f, in_pi)
    f = _check_f(f)
    if h is not None and h <= 0.0:
        raise click.BadParameter("h must be positive", param_hint="--h")
    try:
        sched = _build_schedule(kind, theta_f, phi_f, samples, complement)
    except solver.SolverError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_SOLVER_FAILURE)
    result = simulate(sched, f, n_trajectory=_TRAJECTORY_POINTS, h=h)
    rep = costs(sched)
    target = target_gate(theta_f, phi_f)
    fidelity_f0 = trace_fidelity(target, result.u0_final)
    rows = [(t, p.x, p.y, p.z) for t, p in result.trajectory]
    _write_table(out, "trajectory", fmt, ["t", "x", "y", "z"], rows)
    _write_json(out, "summary", {
        "theta_f": theta_f,
        "schedule_kind": kind,
        "f": f,
        "L_t": rep.L_t,
        "L_p": rep.L_p,
        "L_e": rep.L_e,
        "u1_norm": result.u1_final.norm(),
        "fidelity_f0": fidelity_f0,
        "fidelity": trace_fidelity(target, result.u_final),
    })
    click.echo(f"kind={kind} f={_fmt(f)} fidelity_f0={_fmt(fidelity_f0)} "
               f"u1_norm={_fmt(result.u1_final.norm())}")
    if fidelity_f0 < 1.0 - FIDELITY_VERIFY_TOL:
        click.echo("verification failure: errorless propagation misses the target", err=True)
        sys.exit(EXIT_VERIFICATION_FAILURE)


@main.command()
@click.option("--grid-start", type=float, required=True, help="First target angle.")
@click.option("--grid-stop", type=float, required=True, help="Last target angle.")
@click.option("--grid-n", type=int, required=True, help="Number of grid points.")
@click.option("--samples", type=int, default=DEFAULT_SAMPLES, show_default=True)
@_add(_common)
def sweep(grid_start, grid_stop, grid_n, samples, phi_f, out, fmt, in_pi):
    """Sweep target angles; write per-point solution and cost columns."""
    if grid_n < 1:
        raise click.BadParameter("grid-n must be positive", param_hint="--grid-n")
    start = _check_theta(_angle(grid_start, in_pi))
    stop = _check_theta(_angle(grid_stop, in_pi))
    grid = [start + (stop - start) * i / max(grid_n - 1, 1) for i in range(grid_n)]
    rows = solver.sweep(grid, n=samples, threads=_threads_from_env(), strict=False)
    table = []
    for r in rows:
        sc = short_corpse_params(r.theta_f)
        table.append((
            r.theta_f, r.k, r.branch, r.T, r.L_p, r.g_residual, r.u1_norm,
            sc.total_time, r.theta_f,
            (r.error or "ok").replace(",", ";").replace("\n", " "),
        ))
    header = ["theta_f", "k", "branch", "T", "L_p", "g_residual", "u1_norm",
              "L_t_sc", "L_direct", "status"]
    path = _write_table(out, "sweep", fmt, header, table)
    failed = [r for r in rows if r.error]
    click.echo(f"wrote {path} ({len(rows)} rows, {len(failed)} failed)")
    if failed and len(failed) == len(rows):
        click.echo("solver failure: every grid point failed", err=True)
        sys.exit(EXIT_SOLVER_FAILURE)


@main.command()
@click.option("--theta-f", type=float, required=True, help="Target rotation angle.")
@click.option("--kind", type=click.Choice(_KINDS), default="direct", show_default=True)
@click.option("--h", type=float, default=None, help="Integrator step override.")
@click.option("--samples", type=int, default=DEFAULT_SAMPLES, show_default=True)
@click.option("--complement", is_flag=True,
              help="Use the complementary short-CORPSE for theta_f <= pi.")
@_add(_common)
def scan(theta_f, kind, h, samples, complement, phi_f, out, fmt, in_pi):
    """Scan infidelity against detuning strength and fit the log-log slope."""
    theta_f = _check_theta(_angle(theta_f, in_pi))
    phi_f = _angle(phi_f, in_pi)
    if h is not None and h <= 0.0:
        raise click.BadParameter("h must be positive", param_hint="--h")
    try:
        sched = _build_schedule(kind, theta_f, phi_f, samples, complement)
    except solver.SolverError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        sys.exit(EXIT_SOLVER_FAILURE)
    target = target_gate(theta_f, phi_f)
    points = infidelity_scan(sched, target, DEFAULT_SCAN_GRID, h=h)
    slope = fit_loglog_slope(points)
    _write_table(out, "scan", fmt, ["f", "infidelity"], points)
    _write_json(out, "scan_fit", {"theta_f": theta_f, "schedule_kind": kind, "slope": slope})
    click.echo(f"kind={kind} slope={_fmt(slope)}")


@main.command()
@click.option("--theta-f", type=float, required=True, help="Target rotation angle.")
@click.option("--samples", type=int, default=512, show_default=True,
              help="Total number of curve points.")
@_add(_common)
def portrait(theta_f, samples, phi_f, out, fmt, in_pi):
    """Emit the bang-bang phase-portrait curve of the time-optimal candidate."""
    theta_f = _check_theta(_angle(theta_f, in_pi))
    rows = solver.phase_portrait(theta_f, samples)
    path = _write_table(out, "portrait", fmt, ["Theta", "gamma_x", "segment_index"], rows)
    click.echo(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
