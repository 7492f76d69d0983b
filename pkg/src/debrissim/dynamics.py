"""Manipulator equations of motion ``B(q) q'' + c(q, q', t) + g(q) = tau + F``.

The base orbit is prescribed (``theta0 = omega0 * t``), so the only
generalized coordinates are the joint angles ``q = (theta1, theta2)``. All
base-motion effects end up in ``c``. Gravity cancels in the target frame and
``g`` is kept only as an explicit zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import NonFiniteError, SingularityError
from .kinematics import (
    THETA1,
    THETA2,
    ArmKinematics,
    GeometryParams,
)
from .symexpr import (
    TIME,
    ZERO,
    Constant,
    EvaluationPlan,
    Expr,
    Symbol,
    differentiate,
    lower,
    simplify,
    substitute,
)

M1 = Symbol("m1")
M2 = Symbol("m2")
J1 = Symbol("J1")
J2 = Symbol("J2")
ARC = Symbol("s")  # fraction along a link, for contact Jacobians

Q = (THETA1, THETA2)
QD = (THETA1.diff(), THETA2.diff())
QDD = (THETA1.diff(2), THETA2.diff(2))

SINGULAR_CONDITION = 1e12


@dataclass(frozen=True)
class InertiaParams:
    """Masses and inertias. Defaults are the reference arm parameters."""

    m1: float = 2.0   # link masses [kg]
    m2: float = 2.0
    J1: float = 6.0   # link inertias about their COMs [kg m^2]
    J2: float = 6.0
    md: float = 1.0   # debris mass [kg]
    rd: float = 0.1   # debris radius [m]

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{f.name} must be a positive finite number")

    def symbol_values(self) -> dict[Symbol, float]:
        return {M1: self.m1, M2: self.m2, J1: self.J1, J2: self.J2}


@dataclass(frozen=True)
class SimState:
    """Manipulator and debris state. The base angle is ``omega0 * t``, not stored."""

    t: float
    theta1: float
    theta2: float
    theta1_dot: float
    theta2_dot: float
    xd: float = 0.0
    yd: float = 0.0
    xd_dot: float = 0.0
    yd_dot: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise NonFiniteError(f"state field {f.name} is not finite")

    @property
    def q(self) -> tuple[float, float]:
        return (self.theta1, self.theta2)

    @property
    def qd(self) -> tuple[float, float]:
        return (self.theta1_dot, self.theta2_dot)

    def to_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.theta1_dot, self.theta2_dot,
                         self.xd, self.yd, self.xd_dot, self.yd_dot])

    @classmethod
    def from_array(cls, t: float, y) -> SimState:
        return cls(float(t), *(float(v) for v in y))


@dataclass(frozen=True)
class LinkJacobian:
    """Symbolic kinematics of the material point at fraction ``s`` of a link."""

    position: tuple[Expr, Expr]
    velocity: tuple[Expr, Expr]
    jacobian: tuple[tuple[Expr, Expr], tuple[Expr, Expr]]  # d velocity / d q'


@dataclass(frozen=True)
class EomSymbolic:
    B: tuple[tuple[Expr, Expr], tuple[Expr, Expr]]
    c: tuple[Expr, Expr]
    g: tuple[Expr, Expr]
    q: tuple[Expr, Expr]
    kinetic_energy: Expr
    jacobians: dict[int, LinkJacobian]
    kinematics: ArmKinematics


def kinetic_energy(kin: ArmKinematics | None = None) -> Expr:
    """Kinetic energy of the two links (the base motion is prescribed)."""
    kin = kin or ArmKinematics()
    com1, com2 = kin.link_coms()
    w1 = differentiate(kin.link1.absolute_angle(), TIME)
    w2 = differentiate(kin.link2.absolute_angle(), TIME)
    half = Constant(0.5)
    v1, v2 = com1.velocity, com2.velocity
    T = (
        half * M1 * (v1[0] ** 2 + v1[1] ** 2)
        + half * J1 * w1 ** 2
        + half * M2 * (v2[0] ** 2 + v2[1] ** 2)
        + half * J2 * w2 ** 2
    )
    return simplify(T, expand=True)


def _link_jacobian(kin: ArmKinematics, link: int) -> LinkJacobian:
    pk = kin.link_point(link, ARC)
    vel = tuple(simplify(v, expand=True) for v in pk.velocity)
    jac = tuple(tuple(simplify(differentiate(v, qd), expand=True) for qd in QD) for v in vel)
    return LinkJacobian(pk.position, vel, jac)


def derive_eom(kin: ArmKinematics | None = None) -> EomSymbolic:
    """Lagrange's equations in ``q = (theta1, theta2)``.

    For each coordinate ``d/dt dT/dq' - dT/dq`` is expanded into canonical
    form; ``B`` is its gradient in ``q''`` and ``c`` is what remains at
    ``q'' = 0``. Because the normal form is unique and mixed partials commute,
    ``B[0][1]`` and ``B[1][0]`` come out structurally identical.
    """
    kin = kin or ArmKinematics()
    T = kinetic_energy(kin)
    lagrange = []
    for q, qd in zip(Q, QD):
        momentum = simplify(differentiate(T, qd), expand=True)
        lagrange.append(
            simplify(differentiate(momentum, TIME) - differentiate(T, q), expand=True)
        )
    zero_acc = {qdd: ZERO for qdd in QDD}
    B = tuple(tuple(simplify(differentiate(eq, qdd), expand=True) for qdd in QDD) for eq in lagrange)
    c = tuple(simplify(substitute(eq, zero_acc), expand=True) for eq in lagrange)
    g = (ZERO, ZERO)
    jac = {1: _link_jacobian(kin, 1), 2: _link_jacobian(kin, 2)}
    return EomSymbolic(B=B, c=c, g=g, q=Q, kinetic_energy=T, jacobians=jac, kinematics=kin)


STATE_LAYOUT = (TIME, THETA1, THETA2, QD[0], QD[1])


class CompiledEom:
    """Numeric evaluator for a derived model with fixed parameter values.

    Parameters are substituted before lowering, so constant folding and CSE
    see actual numbers. Every evaluator takes ``(t, theta1, theta2,
    theta1_dot, theta2_dot)``.
    """

    def __init__(self, eom: EomSymbolic, geometry: GeometryParams, inertia: InertiaParams):
        self.eom = eom
        self.geometry = geometry
        self.inertia = inertia
        values = {**geometry.symbol_values(), **inertia.symbol_values()}
        self.values = values

        def num(e: Expr) -> Expr:
            return simplify(substitute(e, values), expand=True)

        kin = eom.kinematics
        com2 = kin.link_coms()[1].position
        points = [
            *kin.base_position(),
            *kin.joint1_position(),
            *kin.joint2_position(),
            *kin.ee_position(),
            *com2,
        ]
        self.ee_velocity_exprs = tuple(kin.end_effector().velocity)
        dyn_outputs = [eom.B[0][0], eom.B[0][1], eom.B[1][0], eom.B[1][1], *eom.c, *eom.g]
        self.dynamics_plan: EvaluationPlan = lower([num(e) for e in dyn_outputs], STATE_LAYOUT)
        self.points_plan: EvaluationPlan = lower(
            [num(e) for e in points] + [num(e) for e in self.ee_velocity_exprs], STATE_LAYOUT
        )
        self.energy_plan: EvaluationPlan = lower([num(eom.kinetic_energy)], STATE_LAYOUT)
        self.link_plans: dict[int, EvaluationPlan] = {}
        for link, lj in eom.jacobians.items():
            outs = [*lj.position, *lj.velocity, *lj.jacobian[0], *lj.jacobian[1]]
            self.link_plans[link] = lower([num(e) for e in outs], (*STATE_LAYOUT, ARC))
        self._dyn = self.dynamics_plan.compile()
        self._pts = self.points_plan.compile()
        self._energy = self.energy_plan.compile()
        self._link = {k: p.compile() for k, p in self.link_plans.items()}

    def mass_matrix_and_bias(self, t, th1, th2, w1, w2):
        """``((B11, B12, B21, B22), (c1, c2), (g1, g2))`` as floats."""
        out = self._dyn((t, th1, th2, w1, w2))
        return out[0:4], out[4:6], out[6:8]

    def points(self, t, th1, th2, w1=0.0, w2=0.0) -> dict[str, tuple[float, float]]:
        out = self._pts((t, th1, th2, w1, w2))
        return {
            "base": out[0:2],
            "joint1": out[2:4],
            "joint2": out[4:6],
            "ee": out[6:8],
            "com2": out[8:10],
            "ee_velocity": out[10:12],
        }

    def kinetic_energy(self, t, th1, th2, w1, w2) -> float:
        return self._energy((t, th1, th2, w1, w2))[0]

    def link_point(self, link: int, arc: float, t, th1, th2, w1, w2):
        """Position, velocity and Jacobian of the point at ``arc`` along ``link``."""
        if not 0.0 <= arc <= 1.0:
            raise ValueError(f"arc must lie in [0, 1], got {arc!r}")
        try:
            fn = self._link[link]
        except KeyError:
            raise ValueError(f"link must be 1 or 2, got {link!r}") from None
        out = fn((t, th1, th2, w1, w2, arc))
        return out[0:2], out[2:4], ((out[4], out[5]), (out[6], out[7]))


def condition_number(B) -> float:
    """2-norm condition number of a 2x2 matrix given row-major as 4 floats."""
    a, b, c, d = B
    det = a * d - b * c
    if det == 0.0:
        return math.inf
    fro2 = a * a + b * b + c * c + d * d
    # singular values satisfy s1^2 + s2^2 = fro2 and s1 s2 = |det|
    disc = math.sqrt(max(fro2 * fro2 - 4.0 * det * det, 0.0))
    s1 = math.sqrt((fro2 + disc) / 2.0)
    return s1 * s1 / abs(det)


def solve_mass_matrix(B, rhs, t: float | None = None, q=None) -> tuple[float, float]:
    """Solve ``B x = rhs`` for a 2x2 ``B`` given row-major."""
    a, b, c, d = B
    r1, r2 = rhs
    if not all(math.isfinite(v) for v in (a, b, c, d, r1, r2)):
        raise NonFiniteError("non-finite mass matrix or force", t)
    if condition_number(B) > SINGULAR_CONDITION:
        raise SingularityError("mass matrix is singular", t, q)
    det = a * d - b * c
    return ((d * r1 - b * r2) / det, (a * r2 - c * r1) / det)


def forward_dynamics(eom: CompiledEom, state: SimState, tau, f_gen=(0.0, 0.0)) -> np.ndarray:
    """Joint accelerations from ``B q'' = tau + F_gen - c - g``."""
    tau = [float(v) for v in tau]
    f_gen = [float(v) for v in f_gen]
    if not all(math.isfinite(v) for v in (*tau, *f_gen)):
        raise NonFiniteError("non-finite torque or generalized force", state.t)
    B, c, g = eom.mass_matrix_and_bias(state.t, *state.q, *state.qd)
    rhs = (tau[0] + f_gen[0] - c[0] - g[0], tau[1] + f_gen[1] - c[1] - g[1])
    return np.array(solve_mass_matrix(B, rhs, state.t, state.q))


def contact_jacobian(eom: CompiledEom, link: int, arc: float, state: SimState) -> np.ndarray:
    """2x2 map from joint rates to the inertial velocity of a link point."""
    _, _, jac = eom.link_point(link, arc, state.t, *state.q, *state.qd)
    return np.array(jac)


def generalized_force(jac, force) -> tuple[float, float]:
    """``J^T F`` for a 2x2 Jacobian and a planar force."""
    (j11, j12), (j21, j22) = jac
    fx, fy = force
    return (j11 * fx + j21 * fy, j12 * fx + j22 * fy)


ATTRACTION_CUTOFF = 1e-9


def attraction_force(debris_pos, target, magnitude: float = 1.0) -> tuple[float, float]:
    """Constant-magnitude pull from the debris toward ``target``; zero when coincident."""
    dx = target[0] - debris_pos[0]
    dy = target[1] - debris_pos[1]
    dist = math.hypot(dx, dy)
    if dist < ATTRACTION_CUTOFF:
        return (0.0, 0.0)
    return (magnitude * dx / dist, magnitude * dy / dist)


def debris_acceleration(state: SimState, attract_target, contact_force, md: float = 1.0,
                        attraction: float = 1.0) -> np.ndarray:
    if not md > 0:
        raise ValueError("debris mass must be positive")
    fa = attraction_force((state.xd, state.yd), attract_target, attraction)
    return np.array([(fa[0] + contact_force[0]) / md, (fa[1] + contact_force[1]) / md])
