"""Render detuneforge CSV artifacts into static figures.

Rendering is a pure function of the input CSVs: nothing is re-solved or
re-propagated here.  Supported figure ids:

* ``fig1``   - pendulum parameter k against theta_f from a sweep CSV, with
  the k ceiling 1/sin^2(theta_f/4) overlaid and the two operation-time
  branches drawn as distinct marker classes,
* ``fig2`` / ``fig3`` / ``fig4`` - rotation-angle traces (panel a) and Bloch
  trajectories under detuning (panel b) from trajectory CSVs,
* ``fig5a`` / ``fig5b`` - pulse area / operation time against theta_f with
  the direct-pulse line and the three-segment sequence overlaid.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

if not os.environ.get("DISPLAY"):
    matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5a", "fig5b")

_TRAJECTORY_ROLES = ("pa_errorless", "sc_errorless", "pa_faulty", "sc_faulty", "direct_faulty")
_REQUIRED_ROLES = {
    "fig1": ("sweep",),
    "fig2": _TRAJECTORY_ROLES,
    "fig3": _TRAJECTORY_ROLES,
    "fig4": _TRAJECTORY_ROLES,
    "fig5a": ("sweep",),
    "fig5b": ("sweep",),
}

_SWEEP_COLUMNS = ("theta_f", "k", "branch", "T", "L_p", "L_t_sc", "L_direct")
_TRAJECTORY_COLUMNS = ("t", "x", "y", "z")


@dataclass
class FigureSpec:
    """One figure to render: id, role -> CSV path mapping, output image."""

    figure_id: str
    inputs: dict = field(default_factory=dict)
    output: Path = Path("figure.png")

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}; expected one of {FIGURE_IDS}")
        missing = [r for r in _REQUIRED_ROLES[self.figure_id] if r not in self.inputs]
        if missing:
            raise ValueError(f"{self.figure_id} needs input roles {missing}")
        self.output = Path(self.output)


def _read_csv(path, required_columns) -> dict:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        missing = [c for c in required_columns if c not in names]
        if missing:
            raise ValueError(f"{path} is missing columns {missing} (has {names})")
        rows = list(reader)
    out = {}
    for col in names:
        vals = [r[col] for r in rows]
        try:
            out[col] = np.array([float(v) for v in vals])
        except ValueError:
            out[col] = np.array(vals)
    return out


def _angle_trace(traj) -> tuple[np.ndarray, np.ndarray]:
    # coaxial x-axis evolution of the +z state: theta(t) = atan2(-y, z),
    # unwrapped so the trace is continuous through switchbacks
    theta = np.unwrap(np.arctan2(-traj["y"], traj["z"]))
    return traj["t"], theta - theta[0]


def _sphere_wireframe(ax):
    u = np.linspace(0, 2 * np.pi, 25)
    v = np.linspace(0, np.pi, 13)
    x = np.outer(np.cos(u), np.sin(v))
    y = np.outer(np.sin(u), np.sin(v))
    z = np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(x, y, z, color="0.85", linewidth=0.4)
    ax.set_box_aspect((1, 1, 1))
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")


def _build_fig1(spec: FigureSpec):
    data = _read_csv(spec.inputs["sweep"], _SWEEP_COLUMNS)
    ok = data["status"] == "ok" if "status" in data else np.ones(len(data["k"]), bool)
    theta = data["theta_f"][ok] / math.pi
    k = data["k"][ok]
    branch = data["branch"][ok]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    mask_b = branch == "B"
    mask_a = branch == "A"
    ax.plot(theta[mask_b], k[mask_b], "ko", ms=5, label="with switchbacks (T from branch B)")
    ax.plot(theta[mask_a], k[mask_a], "o", color="tab:red", ms=5,
            label="monotone (T from branch A)")
    grid = np.linspace(max(theta.min(), 0.02), 2.0, 400)
    ceiling = 1.0 / np.sin(grid * math.pi / 4.0) ** 2
    top = max(2.0, 1.25 * float(k.max(initial=1.0)))
    ax.plot(grid[ceiling <= top], ceiling[ceiling <= top], "b-", lw=1.5,
            label=r"$k_{\sup} = 1/\sin^2(\theta_f/4)$")
    ax.set_xlabel(r"$\theta_f/\pi$")
    ax.set_ylabel(r"$k$")
    ax.set_ylim(0.0, top)
    ax.legend(loc="best", fontsize=9)
    meta = {
        "branch_a_points": int(mask_a.sum()),
        "branch_b_points": int(mask_b.sum()),
        "rows": int(ok.sum()),
    }
    return fig, meta


def _build_trajectory_figure(spec: FigureSpec):
    pa0 = _read_csv(spec.inputs["pa_errorless"], _TRAJECTORY_COLUMNS)
    sc0 = _read_csv(spec.inputs["sc_errorless"], _TRAJECTORY_COLUMNS)
    faulty = {
        role: _read_csv(spec.inputs[role], _TRAJECTORY_COLUMNS)
        for role in ("pa_faulty", "sc_faulty", "direct_faulty")
    }
    fig = plt.figure(figsize=(11, 4.5))
    ax = fig.add_subplot(1, 2, 1)
    t_pa, th_pa = _angle_trace(pa0)
    t_sc, th_sc = _angle_trace(sc0)
    theta_f = th_pa[-1]
    ax.plot(t_pa, th_pa / math.pi, "b-", label="pulse-area optimal")
    ax.plot(t_sc, th_sc / math.pi, "r--", label="short-CORPSE")
    ax.axhline(theta_f / math.pi, color="tab:brown", lw=1.0,
               label=rf"$\theta_f = {theta_f / math.pi:.2f}\pi$")
    ax.set_xlabel(r"$t$")
    ax.set_ylabel(r"$\theta(t)/\pi$")
    ax.legend(loc="best", fontsize=9)
    ax3 = fig.add_subplot(1, 2, 2, projection="3d")
    _sphere_wireframe(ax3)
    max_norm = 0.0
    styles = {
        "pa_faulty": dict(color="b", linestyle="-", label="pulse-area optimal"),
        "sc_faulty": dict(color="r", linestyle="--", label="short-CORPSE"),
        "direct_faulty": dict(color="k", linestyle="-", label="direct"),
    }
    for role, traj in faulty.items():
        ax3.plot(traj["x"], traj["y"], traj["z"], lw=1.2, **styles[role])
        norms = np.sqrt(traj["x"] ** 2 + traj["y"] ** 2 + traj["z"] ** 2)
        max_norm = max(max_norm, float(norms.max()))
    ax3.legend(loc="upper left", fontsize=8)
    meta = {"theta_f": float(theta_f), "max_bloch_norm": max_norm}
    return fig, meta


def _build_fig5(spec: FigureSpec, quantity: str):
    data = _read_csv(spec.inputs["sweep"], _SWEEP_COLUMNS)
    ok = data["status"] == "ok" if "status" in data else np.ones(len(data["k"]), bool)
    theta = data["theta_f"][ok] / math.pi
    col = "L_p" if quantity == "area" else "T"
    label = r"$L^{(p)}$" if quantity == "area" else r"$L^{(t)} = T$"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(theta, data[col][ok], "o", color="tab:blue", ms=5, label="pulse-area optimal")
    ax.plot(theta, data["L_direct"][ok], "k-.", lw=1.2, label="direct pulse")
    ax.plot(theta, data["L_t_sc"][ok], "r-", lw=1.5, label="short-CORPSE")
    ax.set_xlabel(r"$\theta_f/\pi$")
    ax.set_ylabel(label)
    ax.legend(loc="best", fontsize=9)
    meta = {
        "rows": int(ok.sum()),
        "optimal_max": float(np.max(data[col][ok])),
        "sequence_max": float(np.max(data["L_t_sc"][ok])),
    }
    return fig, meta


def build_figure(spec: FigureSpec):
    """Build the matplotlib figure and a small metadata dict (for tests)."""
    if spec.figure_id == "fig1":
        return _build_fig1(spec)
    if spec.figure_id in ("fig2", "fig3", "fig4"):
        return _build_trajectory_figure(spec)
    if spec.figure_id == "fig5a":
        return _build_fig5(spec, "area")
    return _build_fig5(spec, "time")


def render(spec: FigureSpec) -> Path:
    """Render the figure to ``spec.output`` (format from the suffix) and close it."""
    fig, _ = build_figure(spec)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return spec.output
