"""Static SVG line charts of a simulation trace."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .engine import SimulationTrace  # noqa: E402
from .kinematics import GeometryParams  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "debrissim"

BALL_PLOTS = ("ball_displacement",)
SPACECRAFT_PLOTS = (
    "base_trajectory",
    "debris_trajectory",
    "ee_trajectory",
    "manipulator_configurations",
    "joint_angles",
    "joint_rates",
    "torques",
)


def available_plots(scenario: str) -> tuple[str, ...]:
    return BALL_PLOTS if scenario == "bouncing_ball" else SPACECRAFT_PLOTS


def _contact_times(trace: SimulationTrace) -> list[float]:
    # first time stamp of each contact episode
    out, prev = [], None
    gap = 1.5 * (trace.time[1] - trace.time[0]) if len(trace.rows) > 1 else 0.0
    for ev in trace.events:
        if prev is None or ev.t - prev > gap:
            out.append(ev.t)
        prev = ev.t
    return out


def _mark_contacts(ax, trace):
    for k, tc in enumerate(_contact_times(trace)):
        ax.axvline(tc, color="0.6", lw=0.8, ls=":", label="contact" if k == 0 else None)


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_ball_displacement(trace, path, **_):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(trace.column("x"), trace.column("y"), lw=1.2, label="ball")
    ax.axhline(0.0, color="k", lw=0.8, label="ground")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    if np.ptp(trace.column("x")) < 1e-9:
        ax.cla()
        ax.plot(trace.time, trace.column("y"), lw=1.2, label="ball")
        ax.axhline(0.0, color="k", lw=0.8, label="ground")
        ax.set_xlabel("t [s]")
        ax.set_ylabel("y [m]")
    ax.set_title("Bouncing ball displacement")
    ax.legend()
    return _save(fig, path)


def plot_base_trajectory(trace, path, geometry: GeometryParams, **_):
    fig, ax = plt.subplots(figsize=(5, 5))
    phi = np.linspace(0, 2 * math.pi, 400)
    ax.plot(geometry.R * np.cos(phi), geometry.R * np.sin(phi), color="0.8", lw=0.8, label="orbit")
    ax.plot(trace.column("base_x"), trace.column("base_y"), lw=1.5, label="base COM")
    ax.plot([0], [0], "r*", ms=10, label="target")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("Base spacecraft trajectory")
    ax.legend(loc="best")
    return _save(fig, path)


def plot_debris_trajectory(trace, path, **_):
    fig, ax = plt.subplots(figsize=(5, 5))
    x, y = trace.column("deb_x"), trace.column("deb_y")
    ax.plot(x, y, lw=1.2, label="debris")
    ax.plot(x[:1], y[:1], "o", label="start")
    for ev_t in _contact_times(trace):
        i = int(np.searchsorted(trace.time, ev_t))
        i = min(i, len(x) - 1)
        ax.plot(x[i], y[i], "kx")
    ax.plot([0], [0], "r*", ms=10, label="target")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("Debris trajectory (x = contact)")
    ax.legend(loc="best")
    return _save(fig, path)


def plot_ee_trajectory(trace, path, **_):
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(trace.column("ee_ref_x"), trace.column("ee_ref_y"), "--", lw=1.5, label="reference")
    ax.plot(trace.column("ee_x"), trace.column("ee_y"), lw=1.0, label="actual")
    ax.plot([0], [0], "r*", ms=10, label="target")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("End-effector trajectory relative to target")
    ax.legend(loc="best")
    return _save(fig, path)


def plot_manipulator_configurations(trace, path, geometry: GeometryParams, snapshots: int = 8, **_):
    fig, ax = plt.subplots(figsize=(5, 5))
    th1, th2 = trace.column("th1"), trace.column("th2")
    jx, jy = -geometry.d, 0.0
    kx = jx + geometry.l1 * np.cos(th1)
    ky = jy + geometry.l1 * np.sin(th1)
    ex = kx + geometry.l2 * np.cos(th1 + th2)
    ey = ky + geometry.l2 * np.sin(th1 + th2)
    ax.plot(ex, ey, lw=1.2, label="end-effector (base frame)")
    for i in np.linspace(0, len(th1) - 1, snapshots).astype(int):
        ax.plot([jx, kx[i], ex[i]], [jy, ky[i], ey[i]], "-o", color="0.5", lw=0.8, ms=2)
    ax.plot([0], [0], "ks", ms=6, label="base COM")
    ax.set_aspect("equal")
    ax.set_xlabel("x_A [m]")
    ax.set_ylabel("y_A [m]")
    ax.set_title("Manipulator configurations")
    ax.legend(loc="best")
    return _save(fig, path)


def _two_panel(trace, path, actual, reference, ylabel, title):
    fig, axes = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    t = trace.time
    for ax, a, r, name in zip(axes, actual, reference, ("joint 1", "joint 2")):
        if r is not None:
            ax.plot(t, trace.column(r), "--", lw=1.5, label="reference")
        ax.plot(t, trace.column(a), lw=1.0, label="actual")
        _mark_contacts(ax, trace)
        ax.set_ylabel(f"{name} {ylabel}")
        ax.legend(loc="best", fontsize="small")
    axes[-1].set_xlabel("t [s]")
    axes[0].set_title(title)
    return _save(fig, path)


def plot_joint_angles(trace, path, **_):
    return _two_panel(trace, path, ("th1", "th2"), ("th1_d", "th2_d"), "[rad]", "Joint angles")


def plot_joint_rates(trace, path, **_):
    return _two_panel(trace, path, ("th1_dot", "th2_dot"), ("th1_d_dot", "th2_d_dot"), "[rad/s]",
                      "Joint angular velocities")


def plot_torques(trace, path, **_):
    return _two_panel(trace, path, ("M1", "M2"), (None, None), "torque [N m]", "Joint torques")


_PLOTTERS = {
    "ball_displacement": plot_ball_displacement,
    "base_trajectory": plot_base_trajectory,
    "debris_trajectory": plot_debris_trajectory,
    "ee_trajectory": plot_ee_trajectory,
    "manipulator_configurations": plot_manipulator_configurations,
    "joint_angles": plot_joint_angles,
    "joint_rates": plot_joint_rates,
    "torques": plot_torques,
}


def write_plots(trace: SimulationTrace, out_dir: Path, names, geometry: GeometryParams | None = None) -> list[Path]:
    out_dir = Path(out_dir)
    paths = []
    if not trace.rows:
        return paths
    for name in names:
        paths.append(_PLOTTERS[name](trace, out_dir / f"{name}.svg", geometry=geometry))
    return paths
