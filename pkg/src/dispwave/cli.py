"""Command line front end.

Five pipelines: ``branch`` traces a solution family and diagnoses it,
``refine`` re-solves a stored branch on doubled grids, ``evolve`` time
steps a stored profile, ``converge`` runs a fixed-waveheight grid
study, and ``analyze`` re-diagnoses a stored branch directory.

Exit codes: 0 success, 1 configuration or input errors, 2 a run that
stopped early (branch navigation terminated before the requested step
count, or time stepping hit the blow-up guard) but still wrote its
artifacts.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .continuation import (
    Branch,
    BranchTerminated,
    NavigationOptions,
    bootstrap,
    extend,
    refine_branch,
    solve_at_waveheight,
)
from .diagnostics import branch_report
from .equations import NoExactSolution, exact_solution, exact_waveheight_for_speed
from .evolution import (
    BlowUp,
    EvolutionOptions,
    conserved,
    default_timestep,
    evolve,
    mirror_to_full,
    shift_compensated_deviation,
)
from .reports import (
    figure_branch,
    figure_convergence,
    figure_diagnostics,
    figure_evolution,
    load_branch_points,
    write_branch_artifacts,
    write_convergence_csv,
    write_report_json,
    write_snapshot_csv,
    write_summary_csv,
    write_trajectory_csv,
)
from .solver import ContinuationFrame, SolverError, newton_solve
from .spectral import Wave, make_grid, refine, series_eval
from .stokes import ResonantMode

__all__ = ["main", "run_branch", "run_refine", "run_evolve", "run_converge", "run_analyze"]


def _navigation(cfg: RunConfig) -> NavigationOptions:
    return NavigationOptions(
        step=cfg.step, max_halvings=cfg.max_halvings, newton=cfg.newton
    )


def _diagnose_dir(cfg: RunConfig, dirpath: str, out: str, termination: str | None,
                  failed: dict[int, str] | None = None) -> None:
    """Reload a written branch and emit its diagnostic artifacts.

    Reading the points back from disk before diagnosing keeps one code
    path for fresh runs and for ``analyze`` on stored directories, so
    both produce identical reports.
    """
    points = load_branch_points(dirpath, cfg.equation)
    report = branch_report(
        cfg.equation, points, boundary=cfg.boundary_kind,
        termination=termination, failed=failed,
    )
    os.makedirs(out, exist_ok=True)
    write_summary_csv(os.path.join(out, "summary.csv"), report)
    write_report_json(os.path.join(out, "report.json"), report.to_dict())
    figure_branch(report, os.path.join(out, "branch_curves.svg"))
    figure_diagnostics(report, os.path.join(out, "diagnostics.svg"))


def run_branch(cfg: RunConfig, out: str, guess: str | None = None) -> int:
    eq = cfg.equation
    bc = cfg.make_boundary()
    grid = make_grid(eq.length, cfg.grid_n)
    opts = _navigation(cfg)
    branch = bootstrap(
        eq, bc, grid,
        waveheight=cfg.amplitude_start, options=opts, guess=guess or cfg.guess,
    )
    extend(branch, cfg.n_iter, opts)
    write_branch_artifacts(out, branch.points)
    _diagnose_dir(cfg, out, out, branch.termination)
    print(
        f"branch: {len(branch.points)} points, termination {branch.termination}, "
        f"wrote {out}"
    )
    return 0 if branch.termination == "max-steps" else 2


def run_refine(cfg: RunConfig, branch_dir: str, out: str) -> int:
    eq = cfg.equation
    points = load_branch_points(branch_dir, eq)
    branch = Branch(
        equation=eq, boundary=cfg.make_boundary(),
        points=points, steps=[], current_step=cfg.step,
    )
    stages = refine_branch(branch, cfg.doubling, _navigation(cfg))
    for k, stage in enumerate(stages, start=1):
        write_branch_artifacts(os.path.join(out, f"stage_{k}"), stage.points)
    final = stages[-1] if stages else branch
    write_branch_artifacts(out, final.points)
    _diagnose_dir(cfg, out, out, None, failed=final.failed)
    n_failed = len(final.failed)
    print(
        f"refine: {len(final.points)} points through {cfg.doubling} doublings "
        f"({n_failed} kept coarse), wrote {out}"
    )
    return 0


def run_evolve(cfg: RunConfig, out: str, profile: str | None = None) -> int:
    from .reports import read_profile_csv

    eq = cfg.equation
    path = profile or cfg.evolution.profile
    if not path:
        raise ConfigError("evolve needs a profile (flag --profile or [evolution] profile)")
    if not os.path.exists(path):
        raise ConfigError(f"profile file not found: {path}")
    x, phi = read_profile_csv(path)
    grid = make_grid(eq.length, x.size)
    field = mirror_to_full(Wave.from_samples(grid, phi))

    evo = cfg.evolution
    opts = EvolutionOptions(
        t_end=evo.t_end, dt=evo.dt, dealias=evo.dealias,
        snapshot_stride=evo.snapshot_stride,
    )
    dt = evo.dt if evo.dt is not None else default_timestep(eq, field)
    blowup = None
    try:
        snaps = evolve(eq, field, opts)
    except BlowUp as bu:
        snaps = bu.snapshots
        blowup = {"time": bu.time, "maxnorm": bu.maxnorm}

    os.makedirs(out, exist_ok=True)
    rows = []
    for i, (t, f) in enumerate(snaps):
        name = f"snap_{i:04d}.csv"
        write_snapshot_csv(os.path.join(out, name), f)
        mass, momentum = conserved(eq, f)
        rows.append(
            {
                "t": t,
                "file": name,
                "mass": mass,
                "momentum": momentum,
                "max_u": float(np.max(np.abs(f.samples))),
            }
        )
    write_trajectory_csv(os.path.join(out, "trajectory.csv"), rows)

    payload = {
        "equation": eq.label(),
        "grid_m": field.m,
        "dt": dt,
        "t_end": evo.t_end,
        "dealias": evo.dealias,
        "snapshots": len(snaps),
        "mass_drift": max(abs(r["mass"] - rows[0]["mass"]) for r in rows),
        "momentum_drift": max(
            abs(r["momentum"] - rows[0]["momentum"]) for r in rows
        )
        / max(abs(rows[0]["momentum"]), 1e-300),
        "blowup": blowup,
    }
    if blowup is None and len(snaps) > 1:
        shift, deviation = shift_compensated_deviation(snaps[0][1], snaps[-1][1])
        payload["shift"] = shift
        payload["shape_deviation"] = deviation
    write_report_json(os.path.join(out, "evolution_report.json"), payload)
    if len(snaps) > 1:
        figure_evolution(snaps, rows, os.path.join(out, "evolution.svg"))
    status = "blow-up" if blowup else "done"
    print(f"evolve: {status}, {len(snaps)} snapshots, dt {dt:g}, wrote {out}")
    return 2 if blowup else 0


def run_converge(cfg: RunConfig, out: str) -> int:
    eq = cfg.equation
    bc = cfg.make_boundary()
    grids = cfg.grids
    for prev, nxt in zip(grids, grids[1:]):
        if nxt != 2 * prev:
            raise ConfigError(
                f"key 'grids' in section [convergence]: sizes must double "
                f"({nxt} does not follow {prev})"
            )
    opts = _navigation(cfg)
    coarse = solve_at_waveheight(
        eq, bc, make_grid(eq.length, grids[0]), cfg.waveheight,
        options=opts, guess=cfg.guess,
    )
    points = [coarse]
    for _ in grids[1:]:
        prev = points[-1]
        fine_wave = refine(prev.wave, 2)
        frame = ContinuationFrame.anchored(prev.c, prev.a)
        points.append(
            newton_solve(eq, bc, frame, fine_wave, b=prev.b, theta=0.0,
                         options=cfg.newton)
        )

    exact_family = cfg.boundary_kind == "solitary"
    if exact_family:
        try:
            exact_waveheight_for_speed(eq, points[0].c)
        except (NoExactSolution, ValueError):
            exact_family = False
    reference = None if exact_family else points[-1]

    rows = []
    prev_l2 = None
    for p in points:
        nodes = p.wave.grid.nodes
        if exact_family:
            # compare against the family member sharing the computed
            # speed; the grid-sampled waveheight drifts O(h^2) from the
            # continuum one and would mask the spectral accuracy
            profile, _ = exact_solution(eq, exact_waveheight_for_speed(eq, p.c))
            target = profile(nodes)
        else:
            target = series_eval(reference.wave, nodes)
        diff = p.wave.samples - target
        linf = float(np.max(np.abs(diff)))
        l2 = float(np.sqrt(eq.length / nodes.size * np.sum(diff**2)))
        rows.append(
            {
                "grid_n": p.wave.grid.n,
                "log10_linf_error": float(np.log10(linf)) if linf > 0 else -np.inf,
                "log10_l2_error": float(np.log10(l2)) if l2 > 0 else -np.inf,
                "l2_error_ratio": (prev_l2 / l2) if (prev_l2 and l2 > 0) else float("nan"),
            }
        )
        prev_l2 = l2
    if not exact_family and rows:
        # self-comparison of the reference grid carries no information
        rows[-1]["l2_error_ratio"] = float("nan")
        rows[-1]["log10_linf_error"] = float("nan")
        rows[-1]["log10_l2_error"] = float("nan")
        rows = rows[:-1]

    os.makedirs(out, exist_ok=True)
    write_convergence_csv(os.path.join(out, "convergence.csv"), rows)
    figure_convergence(rows, os.path.join(out, "convergence.svg"))
    for r in rows:
        print(
            f"converge: N {r['grid_n']:5d}  log10 max err {r['log10_linf_error']:8.3f}  "
            f"ratio {r['l2_error_ratio']:.3g}"
        )
    print(f"converge: wrote {out}")
    return 0


def run_analyze(cfg: RunConfig, branch_dir: str, out: str) -> int:
    termination = None
    prior = os.path.join(branch_dir, "report.json")
    if os.path.exists(prior):
        with open(prior, encoding="utf-8") as handle:
            termination = json.load(handle).get("termination")
    _diagnose_dir(cfg, branch_dir, out, termination)
    print(f"analyze: diagnosed {branch_dir}, wrote {out}")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="INI run configuration")
    p.add_argument(
        "--out", default=None, help="output directory (default: [output] directory)"
    )
    p.add_argument(
        "--set",
        action="append",
        default=[],
        dest="overrides",
        metavar="SECTION.KEY=VALUE",
        help="override one configuration entry (repeatable)",
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dispwave",
        description="traveling waves of nonlocal dispersive equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("branch", help="trace a solution branch and diagnose it")
    _add_common(p)
    p.add_argument(
        "--guess",
        choices=["stokes:first", "stokes:corrected"],
        default=None,
        help="small-amplitude starting guess (overrides the config)",
    )

    p = sub.add_parser("refine", help="re-solve a stored branch on doubled grids")
    _add_common(p)
    p.add_argument("--branch-dir", required=True, help="directory holding branch.csv")

    p = sub.add_parser("evolve", help="time-step a stored wave profile")
    _add_common(p)
    p.add_argument("--profile", default=None, help="profile table (x,phi) to evolve")

    p = sub.add_parser("converge", help="fixed-waveheight grid refinement study")
    _add_common(p)

    p = sub.add_parser("analyze", help="recompute diagnostics for a stored branch")
    _add_common(p)
    p.add_argument("--branch-dir", required=True, help="directory holding branch.csv")

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        out = args.out or cfg.output_dir
        if args.command == "branch":
            return run_branch(cfg, out, guess=args.guess)
        if args.command == "refine":
            return run_refine(cfg, args.branch_dir, out)
        if args.command == "evolve":
            return run_evolve(cfg, out, profile=args.profile)
        if args.command == "converge":
            return run_converge(cfg, out)
        return run_analyze(cfg, args.branch_dir, out)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (SolverError, BranchTerminated, ResonantMode) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
