"""Fixed-step integration of the coupled arm/debris system and the ball scene."""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .contact import (
    ContactForce,
    ContactGeom,
    detect_disc_halfplane,
    detect_disc_segment,
    relative_contact_velocity,
    resolve,
)
from .control import torque_law
from .dynamics import (
    CompiledEom,
    EomSymbolic,
    attraction_force,
    derive_eom,
    generalized_force,
    solve_mass_matrix,
)
from .errors import DebrisSimError, NonFiniteError
from .planning import JointTrajectory, capture_spec

log = logging.getLogger(__name__)

SPACECRAFT_COLUMNS = (
    "t", "th1", "th2", "th1_dot", "th2_dot", "th1_d", "th2_d", "M1", "M2",
    "ee_x", "ee_y", "ee_ref_x", "ee_ref_y", "base_x", "base_y",
    "deb_x", "deb_y", "deb_vx", "deb_vy",
)
BALL_COLUMNS = ("t", "x", "y", "vx", "vy", "F_N", "F_T")
EVENT_COLUMNS = ("t", "pair", "p", "F_N", "F_T", "cp_x", "cp_y", "n_x", "n_y")


@dataclass(frozen=True)
class ContactEvent:
    t: float
    pair: str
    penetration: float
    normal_force: float
    tangent_force: float
    point: tuple[float, float]
    normal: tuple[float, float]

    def row(self) -> tuple:
        return (self.t, self.pair, self.penetration, self.normal_force, self.tangent_force,
                *self.point, *self.normal)


@dataclass
class SimulationTrace:
    scenario: str
    columns: tuple[str, ...]
    rows: list[tuple[float, ...]] = field(default_factory=list)
    events: list[ContactEvent] = field(default_factory=list)
    extra: dict[str, list] = field(default_factory=dict)
    steps: int = 0
    completed: bool = False
    error: str | None = None

    def column(self, name: str) -> np.ndarray:
        if name in self.columns:
            i = self.columns.index(name)
            return np.array([r[i] for r in self.rows])
        return np.asarray(self.extra[name])

    @property
    def time(self) -> np.ndarray:
        return self.column("t")


@dataclass(frozen=True)
class _Contact:
    pair: str
    geom: ContactGeom
    force: ContactForce


@functools.lru_cache(maxsize=None)
def symbolic_model() -> EomSymbolic:
    """The derived equations of motion (parameters symbolic), built once per process."""
    return derive_eom()


class BouncingBallModel:
    """Point (or disc) mass under a constant downward force above a ground line.

    State: ``(x, y, vx, vy)``.
    """

    columns = BALL_COLUMNS

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.ball = config.ball
        self.contact = config.contact

    def initial_state(self) -> np.ndarray:
        b = self.ball
        return np.array([b.x0, b.y0, b.vx0, b.vy0], dtype=float)

    def evaluate(self, t: float, y):
        x, yy, vx, vy = (float(v) for v in y)
        b = self.ball
        fx, fy = 0.0, -b.force
        contacts = []
        geom = detect_disc_halfplane((x, yy), b.radius, b.ground_y)
        if geom is not None:
            v_n, v_t = relative_contact_velocity(geom, (vx, vy), (0.0, 0.0))
            force = resolve(geom, v_n, v_t, self.contact)
            cx, cy = force.on_disc
            fx += cx
            fy += cy
            contacts.append(_Contact("ball-ground", geom, force))
        dy = np.array([vx, vy, fx / b.mass, fy / b.mass])
        return dy, contacts

    def derivative(self, t: float, y) -> np.ndarray:
        return self.evaluate(t, y)[0]

    def record(self, t, y, info, trace: SimulationTrace):
        contacts = info
        fn = sum(c.force.normal_force for c in contacts)
        ft = sum(c.force.tangent_force for c in contacts)
        trace.rows.append((t, *(float(v) for v in y), fn, ft))


class SpacecraftDebrisModel:
    """Two-link arm on an orbiting base tracking a capture trajectory while a
    debris disc is pulled toward the link II centre of mass.

    State: ``(theta1, theta2, theta1_dot, theta2_dot, xd, yd, xd_dot, yd_dot)``.
    """

    columns = SPACECRAFT_COLUMNS
    pairs = {1: "debris-link1", 2: "debris-link2"}

    def __init__(self, config: ScenarioConfig, eom: CompiledEom | None = None):
        self.config = config
        self.geometry = config.geometry
        self.inertia = config.inertia
        self.contact = config.contact
        self.gains = config.gains
        self.eom = eom or CompiledEom(symbolic_model(), config.geometry, config.inertia)
        tc = config.trajectory
        self.spec = capture_spec(config.geometry, tc.t_f, tc.d_f_scale, tc.d_f_sign, tc.target)
        self.trajectory = JointTrajectory(self.spec, config.geometry)
        self.contacts_enabled = True

    def initial_state(self) -> np.ndarray:
        g, d = self.geometry, self.config.debris
        if self.config.initial_joint_rates is None:
            rates = self.trajectory(0.0).theta_dot
        else:
            rates = self.config.initial_joint_rates
        return np.array([g.theta10, g.theta20, rates[0], rates[1], d.x0, d.y0, d.vx0, d.vy0], dtype=float)

    def evaluate(self, t: float, y):
        th1, th2, w1, w2, xd, yd, vxd, vyd = (float(v) for v in y)
        eom = self.eom
        desired = self.trajectory(t)
        B, c, g = eom.mass_matrix_and_bias(t, th1, th2, w1, w2)
        ctrl = torque_law(B, c, g, (th1, th2), (w1, w2), desired, self.gains, self.config.saturation)
        pts = eom.points(t, th1, th2, w1, w2)

        fdx, fdy = 0.0, 0.0
        q1, q2 = 0.0, 0.0
        contacts = []
        if self.contacts_enabled:
            segments = {1: (pts["joint1"], pts["joint2"]), 2: (pts["joint2"], pts["ee"])}
            for link, (a, b) in segments.items():
                geom = detect_disc_segment((xd, yd), self.inertia.rd, a, b)
                if geom is None:
                    continue
                _, v_surf, jac = eom.link_point(link, geom.arc, t, th1, th2, w1, w2)
                v_n, v_t = relative_contact_velocity(geom, (vxd, vyd), v_surf)
                force = resolve(geom, v_n, v_t, self.contact)
                fx, fy = force.on_disc
                fdx += fx
                fdy += fy
                gq = generalized_force(jac, force.on_surface)
                q1 += gq[0]
                q2 += gq[1]
                contacts.append(_Contact(self.pairs[link], geom, force))

        tau = ctrl.tau
        rhs = (tau[0] + q1 - c[0] - g[0], tau[1] + q2 - c[1] - g[1])
        a1, a2 = solve_mass_matrix(B, rhs, t, (th1, th2))
        fa = attraction_force((xd, yd), pts["com2"], self.config.debris.attraction)
        md = self.inertia.md
        dy = np.array([w1, w2, a1, a2, vxd, vyd, (fa[0] + fdx) / md, (fa[1] + fdy) / md])
        return dy, (desired, ctrl, pts, contacts)

    def derivative(self, t: float, y) -> np.ndarray:
        return self.evaluate(t, y)[0]

    def record(self, t, y, info, trace: SimulationTrace):
        desired, ctrl, pts, contacts = info
        th1, th2, w1, w2, xd, yd, vxd, vyd = (float(v) for v in y)
        ref = self.trajectory.cartesian(t).p
        trace.rows.append((
            t, th1, th2, w1, w2, float(desired.theta[0]), float(desired.theta[1]),
            ctrl.tau[0], ctrl.tau[1], *pts["ee"], float(ref[0]), float(ref[1]),
            *pts["base"], xd, yd, vxd, vyd,
        ))
        ex = trace.extra
        ex.setdefault("th1_d_dot", []).append(float(desired.theta_dot[0]))
        ex.setdefault("th2_d_dot", []).append(float(desired.theta_dot[1]))
        ex.setdefault("ee_vx", []).append(pts["ee_velocity"][0])
        ex.setdefault("ee_vy", []).append(pts["ee_velocity"][1])
        ex.setdefault("joint1_x", []).append(pts["joint1"][0])
        ex.setdefault("joint1_y", []).append(pts["joint1"][1])
        ex.setdefault("joint2_x", []).append(pts["joint2"][0])
        ex.setdefault("joint2_y", []).append(pts["joint2"][1])
        ex.setdefault("saturated", []).append(ctrl.saturated)


def make_model(config: ScenarioConfig):
    if config.scenario == "bouncing_ball":
        return BouncingBallModel(config)
    if config.scenario == "spacecraft_debris":
        return SpacecraftDebrisModel(config)
    raise ValueError(f"unknown scenario {config.scenario!r}")


def derivative(model, state, t: float) -> np.ndarray:
    return model.derivative(t, state)


def step_rk4(model, t: float, y, dt: float, k1=None) -> np.ndarray:
    """One classical Runge-Kutta step; ``k1`` may be passed if already known."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    y = np.asarray(y, dtype=float)
    f = model.derivative
    h2 = 0.5 * dt
    if k1 is None:
        k1 = f(t, y)
    k2 = f(t + h2, y + h2 * k1)
    k3 = f(t + h2, y + h2 * k2)
    k4 = f(t + dt, y + dt * k3)
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("integration produced a non-finite state", t + dt)
    return out


def integrate(model, y0, dt: float, n_steps: int, t0: float = 0.0) -> np.ndarray:
    """States at ``t0 + i dt`` for ``i = 0..n_steps`` (no recording)."""
    ys = np.empty((n_steps + 1, len(y0)))
    ys[0] = y = np.asarray(y0, dtype=float)
    for i in range(n_steps):
        y = step_rk4(model, t0 + i * dt, y, dt)
        ys[i + 1] = y
    return ys


def simulate(model, config: ScenarioConfig) -> SimulationTrace:
    integ = config.integrator
    dt, n = integ.dt, integ.n_steps
    trace = SimulationTrace(config.scenario, model.columns)
    y = model.initial_state()
    t = 0.0
    try:
        for i in range(n + 1):
            t = i * dt
            k1, info = model.evaluate(t, y)
            if i % integ.decimation == 0 or i == n:
                model.record(t, y, info, trace)
            contacts = info if isinstance(info, list) else info[-1]
            for ct in contacts:
                trace.events.append(ContactEvent(
                    t, ct.pair, ct.geom.penetration, ct.force.normal_force,
                    ct.force.tangent_force, ct.geom.point, ct.geom.normal,
                ))
            if i == n:
                break
            y = step_rk4(model, t, y, dt, k1=k1)
            trace.steps = i + 1
        trace.completed = True
    except (DebrisSimError, FloatingPointError, ZeroDivisionError, OverflowError) as exc:
        trace.error = f"t={t:.6g}: {exc}"
        log.error("simulation stopped early: %s", trace.error)
    return trace


def run_scenario(config: ScenarioConfig) -> SimulationTrace:
    return simulate(make_model(config), config)
