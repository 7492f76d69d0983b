"""Planar frame chain I -> A -> B -> C and point kinematics.

Frames: I is inertial with the target at its origin, A is the spacecraft base
(x axis pointing away from the target), B and C are the two links. Joint I is
mounted a distance ``d`` from the base centre of mass toward the target, so it
circles the target at radius ``R - d``. Angles are anticlockwise; ``theta1 =
theta2 = 0`` stretches the arm along the base x axis.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .symexpr import (
    TIME,
    ZERO,
    Constant,
    Expr,
    Symbol,
    TimeFunction,
    as_expr,
    cos,
    differentiate,
    simplify,
    sin,
    substitute,
)

# parameter symbols
R = Symbol("R")
D = Symbol("d")
L1 = Symbol("l1")
L2 = Symbol("l2")
OMEGA0 = Symbol("omega0")

# generalized coordinates and debris coordinates
THETA0 = TimeFunction("theta0")
THETA1 = TimeFunction("theta1")
THETA2 = TimeFunction("theta2")
XD = TimeFunction("xd")
YD = TimeFunction("yd")


@dataclass(frozen=True)
class GeometryParams:
    """Arm and orbit geometry. Defaults are the reference arm parameters."""

    R: float = 4.0          # orbit radius of the base COM [m]
    d: float = 2.0          # joint I offset from base COM [m]
    l1: float = 3.0         # link lengths [m]
    l2: float = 3.0
    theta10: float = 0.79   # initial joint angles [rad]
    theta20: float = 1.31
    omega0: float = 0.1     # base angular rate [rad/s]

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or v != v or abs(v) == float("inf"):
                raise ValueError(f"{f.name} must be a finite number")
        if not self.d > 0:
            raise ValueError("d must be positive")
        if not self.R > self.d:
            raise ValueError("R must exceed d")
        if not (self.l1 > 0 and self.l2 > 0):
            raise ValueError("link lengths must be positive")

    def symbol_values(self) -> dict[Symbol, float]:
        return {R: self.R, D: self.d, L1: self.l1, L2: self.l2, OMEGA0: self.omega0}


class Rotation2:
    """2x2 rotation matrix with symbolic entries (row-major)."""

    __slots__ = ("m",)

    def __init__(self, m):
        self.m = tuple(tuple(as_expr(v) for v in row) for row in m)

    def __matmul__(self, other: Rotation2) -> Rotation2:
        a, b = self.m, other.m
        return Rotation2(
            [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)]
        )

    def apply(self, vec) -> tuple[Expr, Expr]:
        x, y = (as_expr(v) for v in vec)
        (a, b), (c, d) = self.m
        return (a * x + b * y, c * x + d * y)

    def transpose(self) -> Rotation2:
        (a, b), (c, d) = self.m
        return Rotation2([[a, c], [b, d]])

    def det(self) -> Expr:
        (a, b), (c, d) = self.m
        return a * d - b * c

    def simplified(self) -> Rotation2:
        return Rotation2([[simplify(v) for v in row] for row in self.m])


def rotation_about_z(angle) -> Rotation2:
    """Maps frame-local coordinates to parent coordinates."""
    angle = as_expr(angle)
    c, s = cos(angle), sin(angle)
    return Rotation2([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class Frame:
    name: str
    parent: Frame | None
    angle: Expr = ZERO  # orientation relative to the parent

    def chain(self) -> list[Frame]:
        frames, f = [], self
        while f is not None:
            frames.append(f)
            f = f.parent
        return frames[::-1]

    def absolute_angle(self) -> Expr:
        return simplify(sum((f.angle for f in self.chain()[1:]), ZERO))

    def rotation(self) -> Rotation2:
        """Rotation relative to the parent frame."""
        return rotation_about_z(self.angle)

    def composed_rotation(self) -> Rotation2:
        """Product of the relative rotations from the inertial frame down."""
        rot = Rotation2([[1.0, 0.0], [0.0, 1.0]])
        for f in self.chain()[1:]:
            rot = rot @ f.rotation()
        return rot

    def rotation_to_inertial(self) -> Rotation2:
        return rotation_about_z(self.absolute_angle())


@dataclass(frozen=True)
class PointKinematics:
    position: tuple[Expr, Expr]
    velocity: tuple[Expr, Expr]
    acceleration: tuple[Expr, Expr]

    @classmethod
    def from_position(cls, position) -> PointKinematics:
        pos = tuple(simplify(p) for p in position)
        vel = tuple(simplify(differentiate(p, TIME)) for p in pos)
        acc = tuple(simplify(differentiate(v, TIME)) for v in vel)
        return cls(pos, vel, acc)

    def substitute(self, values) -> PointKinematics:
        def sub(vec):
            return tuple(simplify(substitute(v, values)) for v in vec)

        return PointKinematics(sub(self.position), sub(self.velocity), sub(self.acceleration))


def _add(p, q):
    return (p[0] + q[0], p[1] + q[1])


class ArmKinematics:
    """Symbolic frame chain of the base and the two-link arm.

    With ``prescribed_base`` the base angle is ``omega0 * t``; otherwise it is
    the free time-function ``theta0``.
    """

    def __init__(self, prescribed_base: bool = True):
        self.prescribed_base = prescribed_base
        theta0 = simplify(OMEGA0 * TIME) if prescribed_base else THETA0
        self.inertial = Frame("I", None)
        self.base = Frame("A", self.inertial, theta0)
        self.link1 = Frame("B", self.base, THETA1)
        self.link2 = Frame("C", self.link1, THETA2)

    @property
    def theta0(self) -> Expr:
        return self.base.angle

    # positions, built link by link down the chain
    def base_position(self):
        return self.base.rotation_to_inertial().apply((R, ZERO))

    def joint1_position(self):
        return _add(self.base_position(), self.base.rotation_to_inertial().apply((-D, ZERO)))

    def link1_point(self, offset):
        """Material point ``offset`` metres along link I from joint I."""
        return _add(self.joint1_position(), self.link1.rotation_to_inertial().apply((offset, ZERO)))

    def joint2_position(self):
        return self.link1_point(L1)

    def link2_point(self, offset):
        return _add(self.joint2_position(), self.link2.rotation_to_inertial().apply((offset, ZERO)))

    def ee_position(self):
        return self.link2_point(L2)

    # kinematics of the named points
    def base_com(self) -> PointKinematics:
        return PointKinematics.from_position(self.base_position())

    def link_coms(self) -> tuple[PointKinematics, PointKinematics]:
        return (
            PointKinematics.from_position(self.link1_point(L1 / Constant(2.0))),
            PointKinematics.from_position(self.link2_point(L2 / Constant(2.0))),
        )

    def end_effector(self) -> PointKinematics:
        return PointKinematics.from_position(self.ee_position())

    def link_point(self, link: int, arc) -> PointKinematics:
        """Point at fraction ``arc`` (expression or number) along link 1 or 2."""
        if link == 1:
            return PointKinematics.from_position(self.link1_point(L1 * as_expr(arc)))
        if link == 2:
            return PointKinematics.from_position(self.link2_point(L2 * as_expr(arc)))
        raise ValueError(f"link must be 1 or 2, got {link!r}")


def _numeric(pk: PointKinematics, params: GeometryParams | None) -> PointKinematics:
    return pk if params is None else pk.substitute(params.symbol_values())


def base_com(params: GeometryParams | None = None, prescribed_base: bool = True) -> PointKinematics:
    """Base centre of mass; parameters stay symbolic unless ``params`` is given."""
    return _numeric(ArmKinematics(prescribed_base).base_com(), params)


def link_coms(params: GeometryParams | None = None, prescribed_base: bool = True):
    a, b = ArmKinematics(prescribed_base).link_coms()
    return _numeric(a, params), _numeric(b, params)


def end_effector(params: GeometryParams | None = None, prescribed_base: bool = True) -> PointKinematics:
    return _numeric(ArmKinematics(prescribed_base).end_effector(), params)


def debris_kinematics() -> PointKinematics:
    # the debris has no frame; its coordinates are free functions of time
    return PointKinematics.from_position((XD, YD))
