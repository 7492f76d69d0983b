"""Parabolic Cartesian path, cubic timing law, and joint-space reference.

The path is planned relative to the target (inertial frame) and mapped into
the rotating base frame sample by sample before inverse kinematics.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SingularityError, UnreachableError
from .kinematics import GeometryParams

SINGULAR_DET = 1e-8


@dataclass(frozen=True)
class TrajectorySpec:
    p_i: tuple[float, float]
    p_f: tuple[float, float]
    d_f: tuple[float, float]
    t_f: float
    t_i: float = 0.0

    def __post_init__(self):
        if not self.t_f > 0:
            raise ValueError("t_f must be positive")


@dataclass(frozen=True)
class PathCoefficients:
    """``p(s) = a + b s + c s^2`` for ``s`` in [0, 1]."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def position(self, s: float) -> np.ndarray:
        return self.a + self.b * s + self.c * s * s

    def tangent(self, s: float) -> np.ndarray:
        return self.b + 2.0 * self.c * s

    def curvature_term(self) -> np.ndarray:
        return 2.0 * self.c


@dataclass(frozen=True)
class TimingLaw:
    """Cubic ``s(t) = c0 + c1 t + c2 t^2 + c3 t^3`` on [0, t_f]."""

    c0: float
    c1: float
    c2: float
    c3: float
    t_f: float

    def s(self, t: float) -> float:
        return self.c0 + t * (self.c1 + t * (self.c2 + t * self.c3))

    def s_dot(self, t: float) -> float:
        return self.c1 + t * (2.0 * self.c2 + 3.0 * self.c3 * t)

    def s_ddot(self, t: float) -> float:
        return 2.0 * self.c2 + 6.0 * self.c3 * t


class PathSample(NamedTuple):
    p: np.ndarray
    v: np.ndarray
    a: np.ndarray
    clamped: bool


class JointSample(NamedTuple):
    theta: np.ndarray
    theta_dot: np.ndarray
    theta_ddot: np.ndarray
    clamped: bool


def path_coefficients(spec: TrajectorySpec) -> PathCoefficients:
    p_i = np.asarray(spec.p_i, dtype=float)
    p_f = np.asarray(spec.p_f, dtype=float)
    d_f = np.asarray(spec.d_f, dtype=float)
    delta = p_f - p_i
    return PathCoefficients(a=p_i, b=2.0 * delta - d_f, c=d_f - delta)


def timing_law(t_f: float) -> TimingLaw:
    """Rest-to-rest cubic with ``s(0) = 0`` and ``s(t_f) = 1``."""
    if not t_f > 0:
        raise ValueError("t_f must be positive")
    return TimingLaw(0.0, 0.0, 3.0 / t_f ** 2, -2.0 / t_f ** 3, float(t_f))


def sample(path: PathCoefficients, law: TimingLaw, t: float) -> PathSample:
    """Position, velocity and acceleration at time ``t``.

    Outside [0, t_f] the trajectory holds its endpoint at rest and the sample
    is flagged as clamped.
    """
    if t < 0.0 or t > law.t_f:
        tc = min(max(t, 0.0), law.t_f)
        zero = np.zeros(2)
        return PathSample(path.position(law.s(tc)), zero, zero.copy(), True)
    s, sd, sdd = law.s(t), law.s_dot(t), law.s_ddot(t)
    tangent = path.tangent(s)
    p = path.position(s)
    v = tangent * sd
    a = tangent * sdd + path.curvature_term() * sd * sd
    return PathSample(p, v, a, False)


# ---------------------------------------------------------------------------
# arm kinematics in the base frame (origin at the base COM, x away from target)


def joint1_in_base(params: GeometryParams) -> tuple[float, float]:
    return (-params.d, 0.0)


def forward_kinematics_base(theta1: float, theta2: float, params: GeometryParams) -> tuple[float, float]:
    a12 = theta1 + theta2
    jx, jy = joint1_in_base(params)
    return (
        jx + params.l1 * math.cos(theta1) + params.l2 * math.cos(a12),
        jy + params.l1 * math.sin(theta1) + params.l2 * math.sin(a12),
    )


def arm_jacobian(theta1: float, theta2: float, params: GeometryParams) -> np.ndarray:
    """d(EE in base frame)/d(theta1, theta2); determinant is ``l1 l2 sin(theta2)``."""
    l1, l2 = params.l1, params.l2
    s1, c1 = math.sin(theta1), math.cos(theta1)
    s12, c12 = math.sin(theta1 + theta2), math.cos(theta1 + theta2)
    return np.array([[-l1 * s1 - l2 * s12, -l2 * s12], [l1 * c1 + l2 * c12, l2 * c12]])


def _wrap_near(angle: float, ref: float) -> float:
    return ref + (angle - ref + math.pi) % (2.0 * math.pi) - math.pi


def inverse_kinematics(p_base, params: GeometryParams, branch: int = 1,
                       theta1_ref: float | None = None) -> tuple[float, float]:
    """Joint angles placing the end-effector at ``p_base`` (base-frame coordinates).

    ``branch`` is the sign of ``theta2`` (+1 elbow one way, -1 the other).
    ``theta1`` is wrapped to within pi of ``theta1_ref`` (default: the
    configured initial angle) so consecutive solutions stay continuous.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    l1, l2 = params.l1, params.l2
    jx, jy = joint1_in_base(params)
    x, y = float(p_base[0]) - jx, float(p_base[1]) - jy
    r2 = x * x + y * y
    r = math.sqrt(r2)
    tol = 1e-12 * (l1 + l2)
    if r > l1 + l2 + tol or r < abs(l1 - l2) - tol:
        raise UnreachableError(
            f"point {tuple(p_base)} is {r:.6g} m from joint I; reach is "
            f"[{abs(l1 - l2):.6g}, {l1 + l2:.6g}]"
        )
    c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    c2 = min(1.0, max(-1.0, c2))
    theta2 = branch * math.acos(c2)
    theta1 = math.atan2(y, x) - math.atan2(l2 * math.sin(theta2), l1 + l2 * math.cos(theta2))
    ref = params.theta10 if theta1_ref is None else theta1_ref
    return (_wrap_near(theta1, ref), theta2)


def select_branch(p_base, params: GeometryParams, previous, max_jump: float = 0.5) -> tuple[float, float]:
    """IK solution closest to ``previous``; raises if neither branch is continuous."""
    best = None
    for branch in (1, -1):
        sol = inverse_kinematics(p_base, params, branch, theta1_ref=previous[0])
        jump = max(abs(sol[0] - previous[0]), abs(sol[1] - previous[1]))
        if best is None or jump < best[0]:
            best = (jump, sol)
    if best[0] > max_jump:
        raise UnreachableError(
            f"no IK branch continuous with {tuple(previous)} (smallest jump {best[0]:.3g} rad)"
        )
    return best[1]


class JointTrajectory:
    """Joint-space reference from a Cartesian trajectory around the target.

    The inertial path point ``z`` is taken into the base frame as
    ``z_b = exp(-i theta0) z`` with ``theta0 = omega0 t``; its derivatives
    pick up the rotating-frame terms ``-2 i omega0 z' - omega0^2 z``.
    """

    def __init__(self, spec: TrajectorySpec, params: GeometryParams):
        self.spec = spec
        self.params = params
        self.path = path_coefficients(spec)
        self.law = timing_law(spec.t_f)
        self.branch = 1 if params.theta20 >= 0 else -1

    def cartesian(self, t: float) -> PathSample:
        return sample(self.path, self.law, t)

    def base_frame(self, t: float):
        """EE reference position, velocity and acceleration in base-frame coordinates."""
        ps = self.cartesian(t)
        w = self.params.omega0
        z = complex(*ps.p)
        zd = complex(*ps.v)
        zdd = complex(*ps.a)
        rot = cmath.exp(-1j * w * t)
        zb = rot * z - self.params.R
        zbd = rot * (zd - 1j * w * z)
        zbdd = rot * (zdd - 2j * w * zd - w * w * z)
        return (zb.real, zb.imag), (zbd.real, zbd.imag), (zbdd.real, zbdd.imag), ps.clamped

    def __call__(self, t: float) -> JointSample:
        pb, vb, ab, clamped = self.base_frame(t)
        params = self.params
        th1, th2 = inverse_kinematics(pb, params, self.branch)
        l1, l2 = params.l1, params.l2
        det = l1 * l2 * math.sin(th2)
        if abs(det) < SINGULAR_DET:
            raise SingularityError("arm Jacobian is singular", t, (th1, th2))
        s1, c1 = math.sin(th1), math.cos(th1)
        s12, c12 = math.sin(th1 + th2), math.cos(th1 + th2)
        j11, j12 = -l1 * s1 - l2 * s12, -l2 * s12
        j21, j22 = l1 * c1 + l2 * c12, l2 * c12
        w1 = (j22 * vb[0] - j12 * vb[1]) / det
        w2 = (-j21 * vb[0] + j11 * vb[1]) / det
        w12 = w1 + w2
        # EE acceleration at zero joint acceleration is -J'qd... here written out
        bx = -l1 * c1 * w1 * w1 - l2 * c12 * w12 * w12
        by = -l1 * s1 * w1 * w1 - l2 * s12 * w12 * w12
        rx, ry = ab[0] - bx, ab[1] - by
        a1 = (j22 * rx - j12 * ry) / det
        a2 = (-j21 * rx + j11 * ry) / det
        return JointSample(np.array([th1, th2]), np.array([w1, w2]), np.array([a1, a2]), clamped)


def joint_trajectory(spec: TrajectorySpec, params: GeometryParams, t: float) -> JointSample:
    return JointTrajectory(spec, params)(t)


def capture_spec(params: GeometryParams, t_f: float, d_f_scale: float = 1.0,
                 d_f_sign: float = 1.0, p_f=(0.0, 0.0)) -> TrajectorySpec:
    """Spec for the capture manoeuvre.

    Starts at the end-effector position given by the initial joint angles and
    ends at the target with final direction perpendicular to the base radius
    line at ``t_f``. The direction is scaled to ``d_f_scale * |p_f - p_i|``;
    ``d_f_sign = +1`` points along the base's orbital motion.
    """
    th0 = params.omega0 * 0.0
    xb, yb = forward_kinematics_base(params.theta10, params.theta20, params)
    c0, s0 = math.cos(th0), math.sin(th0)
    # inertial EE = base position + rotated base-frame offset
    p_i = (params.R * c0 + c0 * xb - s0 * yb, params.R * s0 + s0 * xb + c0 * yb)
    thf = params.omega0 * t_f
    perp = (-math.sin(thf), math.cos(thf))
    dist = math.hypot(p_f[0] - p_i[0], p_f[1] - p_i[1])
    k = d_f_sign * d_f_scale * dist
    return TrajectorySpec(p_i=p_i, p_f=tuple(p_f), d_f=(k * perp[0], k * perp[1]), t_f=t_f)
