"""Artifact I/O: delimited text outputs, JSON reports, and figures.

Floats are serialized with %.17g so that every value round-trips
bit-exactly through the text artifacts; rerunning a pipeline on the
same inputs reproduces the delimited files byte for byte.  Figures are
rendered headless to SVG next to the delimited output.
"""
from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .diagnostics import BranchReport  # noqa: E402
from .equations import Equation  # noqa: E402
from .evolution import PeriodicField  # noqa: E402
from .solver import SolutionPoint  # noqa: E402
from .spectral import Wave, make_grid  # noqa: E402

__all__ = [
    "fmt",
    "write_branch_csv",
    "read_branch_csv",
    "write_profile_csv",
    "read_profile_csv",
    "write_snapshot_csv",
    "write_trajectory_csv",
    "write_convergence_csv",
    "write_summary_csv",
    "write_report_json",
    "write_branch_artifacts",
    "load_branch_points",
    "figure_branch",
    "figure_diagnostics",
    "figure_convergence",
    "figure_evolution",
]

matplotlib.rcParams["svg.hashsalt"] = "dispwave"

_BRANCH_HEADER = "index,c,a,B,theta,l2_norm,residual_norm,newton_iters,grid_N"
_SUMMARY_HEADER = "index,c,a,l2,V,E,d,stability_sign,crests,cusp_ratio,decay_winner"
_CONVERGENCE_HEADER = "grid_N,log10_linf_error,log10_l2_error,l2_error_ratio"
_TRAJECTORY_HEADER = "t,file,mass,momentum,max_u"


def fmt(x: float) -> str:
    """Shortest decimal form that round-trips a float64 exactly."""
    return f"{float(x):.17g}"


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


def write_branch_csv(path: str, points: list[SolutionPoint]) -> None:
    lines = [_BRANCH_HEADER]
    for i, p in enumerate(points):
        lines.append(
            ",".join(
                [
                    str(i),
                    fmt(p.c),
                    fmt(p.a),
                    fmt(p.b),
                    fmt(p.theta),
                    fmt(p.wave.l2_norm()),
                    fmt(p.residual_norm),
                    str(p.newton_iters),
                    str(p.wave.grid.n),
                ]
            )
        )
    _write_lines(path, lines)


def read_branch_csv(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        lines = [ln.strip() for ln in handle if ln.strip()]
    if not lines or lines[0] != _BRANCH_HEADER:
        raise ValueError(f"{path} is not a branch table (bad header)")
    rows = []
    for ln in lines[1:]:
        tok = ln.split(",")
        if len(tok) != 9:
            raise ValueError(f"{path}: malformed row {ln!r}")
        rows.append(
            {
                "index": int(tok[0]),
                "c": float(tok[1]),
                "a": float(tok[2]),
                "b": float(tok[3]),
                "theta": float(tok[4]),
                "l2_norm": float(tok[5]),
                "residual_norm": float(tok[6]),
                "newton_iters": int(tok[7]),
                "grid_n": int(tok[8]),
            }
        )
    return rows


def write_profile_csv(path: str, wave: Wave) -> None:
    lines = ["x,phi"]
    for x, phi in zip(wave.grid.nodes, wave.samples):
        lines.append(f"{fmt(x)},{fmt(phi)}")
    _write_lines(path, lines)


def read_profile_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path, encoding="utf-8") as handle:
        lines = [ln.strip() for ln in handle if ln.strip()]
    if not lines or lines[0] != "x,phi":
        raise ValueError(f"{path} is not a profile table (bad header)")
    x, phi = [], []
    for ln in lines[1:]:
        tok = ln.split(",")
        if len(tok) != 2:
            raise ValueError(f"{path}: malformed row {ln!r}")
        x.append(float(tok[0]))
        phi.append(float(tok[1]))
    return np.array(x), np.array(phi)


def write_snapshot_csv(path: str, field: PeriodicField) -> None:
    lines = ["x,u"]
    for x, u in zip(field.nodes, field.samples):
        lines.append(f"{fmt(x)},{fmt(u)}")
    _write_lines(path, lines)


def write_trajectory_csv(path: str, rows: list[dict]) -> None:
    lines = [_TRAJECTORY_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [fmt(r["t"]), r["file"], fmt(r["mass"]), fmt(r["momentum"]), fmt(r["max_u"])]
            )
        )
    _write_lines(path, lines)


def write_convergence_csv(path: str, rows: list[dict]) -> None:
    lines = [_CONVERGENCE_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    str(r["grid_n"]),
                    fmt(r["log10_linf_error"]),
                    fmt(r["log10_l2_error"]),
                    fmt(r["l2_error_ratio"]),
                ]
            )
        )
    _write_lines(path, lines)


def write_summary_csv(path: str, report: BranchReport) -> None:
    lines = [_SUMMARY_HEADER]
    for p in report.points:
        winner = p.fit.winner if p.fit is not None else ""
        lines.append(
            ",".join(
                [
                    str(p.index),
                    fmt(p.c),
                    fmt(p.a),
                    fmt(p.l2),
                    fmt(p.v),
                    fmt(p.e),
                    fmt(p.d),
                    str(p.stability_sign),
                    str(p.crests),
                    fmt(p.cusp),
                    winner,
                ]
            )
        )
    _write_lines(path, lines)


def write_report_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


def write_branch_artifacts(dirpath: str, points: list[SolutionPoint]) -> None:
    """Write branch.csv plus one profile table per point."""
    os.makedirs(dirpath, exist_ok=True)
    profiles = os.path.join(dirpath, "profiles")
    os.makedirs(profiles, exist_ok=True)
    write_branch_csv(os.path.join(dirpath, "branch.csv"), points)
    for i, p in enumerate(points):
        write_profile_csv(os.path.join(profiles, f"point_{i:04d}.csv"), p.wave)


def load_branch_points(dirpath: str, eq: Equation) -> list[SolutionPoint]:
    """Rebuild solution points from a branch artifact directory.

    The profile grid is reconstructed from the equation period and the
    per-row grid size; node coordinates stored in the profile tables are
    used as a consistency check only.
    """
    rows = read_branch_csv(os.path.join(dirpath, "branch.csv"))
    points = []
    for r in rows:
        path = os.path.join(dirpath, "profiles", f"point_{r['index']:04d}.csv")
        x, phi = read_profile_csv(path)
        grid = make_grid(eq.length, r["grid_n"])
        if x.size != grid.n or abs(x[0] - grid.nodes[0]) > 1e-9 * max(1.0, eq.length):
            raise ValueError(f"{path}: nodes do not match an n = {r['grid_n']} grid")
        wave = Wave.from_samples(grid, phi)
        points.append(
            SolutionPoint(
                wave=wave,
                c=r["c"],
                a=r["a"],
                b=r["b"],
                theta=r["theta"],
                residual_norm=r["residual_norm"],
                newton_iters=r["newton_iters"],
                residual_history=(),
            )
        )
    return points


def _save(fig, path: str) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def figure_branch(report: BranchReport, path: str) -> None:
    """Speed-amplitude and functional curves with landmark markers."""
    c = [p.c for p in report.points]
    a = [p.a for p in report.points]
    l2 = [p.l2 for p in report.points]
    v = [p.v for p in report.points]
    d = [p.d for p in report.points]

    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    ax = axes[0, 0]
    ax.plot(c, a, ".-", ms=3, lw=0.8)
    ax.plot(c[report.turning_index], a[report.turning_index], "v", label="turning")
    ax.plot(c[report.terminal_index], a[report.terminal_index], "s", label="terminal")
    ax.set_xlabel("c")
    ax.set_ylabel("waveheight a")
    ax.legend(fontsize=8)

    ax = axes[0, 1]
    ax.plot(c, l2, ".-", ms=3, lw=0.8)
    ax.plot(c[report.max_l2_index], l2[report.max_l2_index], "^", label="max L2")
    ax.set_xlabel("c")
    ax.set_ylabel("L2 norm")
    ax.legend(fontsize=8)

    ax = axes[1, 0]
    ax.plot(c, v, ".-", ms=3, lw=0.8)
    ax.set_xlabel("c")
    ax.set_ylabel("V")

    ax = axes[1, 1]
    ax.plot(c, d, ".-", ms=3, lw=0.8)
    ax.set_xlabel("c")
    ax.set_ylabel("d = cV - E")

    fig.suptitle(f"{report.equation}, {report.boundary}".strip(", "))
    fig.tight_layout()
    _save(fig, path)


def figure_diagnostics(report: BranchReport, path: str) -> None:
    """Identity mismatch, cusp ratio, crest count, and model contest."""
    idx = [p.index for p in report.points]
    mism = [p.dprime_mismatch for p in report.points]
    cusp = [p.cusp if np.isfinite(p.cusp) else np.nan for p in report.points]
    crests = [p.crests for p in report.points]
    contest = [
        (p.fit.aic_exp - p.fit.aic_poly) if p.fit is not None else np.nan
        for p in report.points
    ]

    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    ax = axes[0, 0]
    ax.semilogy(idx, mism, ".-", ms=3, lw=0.8)
    ax.set_xlabel("index")
    ax.set_ylabel("|d'(c) - V| / |V|")

    ax = axes[0, 1]
    ax.plot(idx, cusp, ".-", ms=3, lw=0.8)
    ax.axhline(1.5, color="k", lw=0.8, ls="--")
    ax.set_xlabel("index")
    ax.set_ylabel("c / max phi")

    ax = axes[1, 0]
    ax.step(idx, crests, where="mid")
    ax.set_xlabel("index")
    ax.set_ylabel("crest count")

    ax = axes[1, 1]
    ax.plot(idx, contest, ".-", ms=3, lw=0.8)
    ax.axhline(0.0, color="k", lw=0.8, ls="--")
    ax.set_xlabel("index")
    ax.set_ylabel("AIC(exp) - AIC(poly)")

    fig.suptitle("branch diagnostics")
    fig.tight_layout()
    _save(fig, path)


def figure_convergence(rows: list[dict], path: str) -> None:
    n = [r["grid_n"] for r in rows]
    linf = [r["log10_linf_error"] for r in rows]
    l2 = [r["log10_l2_error"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(np.log2(n), linf, "o-", label="log10 max error")
    ax.plot(np.log2(n), l2, "s-", label="log10 L2 error")
    ax.set_xlabel("log2 grid size")
    ax.set_ylabel("log10 error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def figure_evolution(
    snaps: list[tuple[float, PeriodicField]], rows: list[dict], path: str
) -> None:
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    ax = axes[0]
    t0, first = snaps[0]
    t1, last = snaps[-1]
    ax.plot(first.nodes, first.samples, lw=0.9, label=f"t = {t0:g}")
    ax.plot(last.nodes, last.samples, lw=0.9, label=f"t = {t1:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend(fontsize=8)

    t = [r["t"] for r in rows]
    ax = axes[1]
    ax.plot(t, [r["max_u"] for r in rows], lw=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("max |u|")

    ax = axes[2]
    mass0 = rows[0]["mass"]
    mom0 = rows[0]["momentum"]
    mass_drift = [abs(r["mass"] - mass0) for r in rows]
    mom_drift = [abs(r["momentum"] - mom0) / max(abs(mom0), 1e-300) for r in rows]
    ax.semilogy(t, np.maximum(mass_drift, 1e-18), lw=0.9, label="mass drift")
    ax.semilogy(t, np.maximum(mom_drift, 1e-18), lw=0.9, label="momentum drift (rel)")
    ax.set_xlabel("t")
    ax.legend(fontsize=8)

    fig.tight_layout()
    _save(fig, path)
