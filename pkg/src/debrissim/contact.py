"""Disc contact detection and elastic-plastic force resolution.

Normal force ``F_N = kc p^3 (1 - cc v_N)`` clamped at zero, tangential force
``F_T = -mu F_N (2 / (1 + exp(-v_T / vs)) - 1)``. ``v_N`` is positive when the
bodies separate, so the damping term stiffens compression and softens
restitution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ContactParams",
    "ContactGeom",
    "ContactForce",
    "detect_disc_segment",
    "detect_disc_halfplane",
    "relative_contact_velocity",
    "resolve",
    "friction_profile",
]


@dataclass(frozen=True)
class ContactParams:
    kc: float = 1e5    # stiffness [N/m^3]
    cc: float = 0.3    # damping [s/m]
    mu: float = 0.3    # friction coefficient
    vs: float = 0.01   # tangential velocity scale [m/s]

    def __post_init__(self):
        for name in ("kc", "cc", "mu", "vs"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.kc > 0:
            raise ValueError("kc must be positive")
        if self.cc < 0:
            raise ValueError("cc must be non-negative")
        if self.mu < 0:
            raise ValueError("mu must be non-negative")
        if not self.vs > 0:
            raise ValueError("vs must be positive")


@dataclass(frozen=True)
class ContactGeom:
    """Overlap of a disc with a surface.

    ``normal`` points from the surface toward the disc centre, ``tangent`` is
    the normal turned +90 degrees. ``arc`` is the fraction along a segment
    where the contact point lies (None for the half-plane).
    """

    penetration: float
    point: tuple[float, float]
    normal: tuple[float, float]
    tangent: tuple[float, float]
    arc: float | None = None


@dataclass(frozen=True)
class ContactForce:
    normal_force: float
    tangent_force: float
    normal: tuple[float, float]
    tangent: tuple[float, float]

    @property
    def on_disc(self) -> tuple[float, float]:
        fn, ft = self.normal_force, self.tangent_force
        return (fn * self.normal[0] + ft * self.tangent[0], fn * self.normal[1] + ft * self.tangent[1])

    @property
    def on_surface(self) -> tuple[float, float]:
        fx, fy = self.on_disc
        return (-fx, -fy)


def _geom(p: float, point, nx: float, ny: float, arc=None) -> ContactGeom:
    return ContactGeom(p, (point[0], point[1]), (nx, ny), (-ny, nx), arc)


def detect_disc_segment(center, r: float, seg_a, seg_b) -> ContactGeom | None:
    """Contact between a disc and a zero-thickness segment, or None."""
    if not r > 0:
        raise ValueError("disc radius must be positive")
    ax, ay = float(seg_a[0]), float(seg_a[1])
    ex, ey = float(seg_b[0]) - ax, float(seg_b[1]) - ay
    len2 = ex * ex + ey * ey
    if len2 == 0.0:
        raise ValueError("degenerate segment: endpoints coincide")
    cx, cy = float(center[0]), float(center[1])
    s = ((cx - ax) * ex + (cy - ay) * ey) / len2
    s = min(1.0, max(0.0, s))
    px, py = ax + s * ex, ay + s * ey
    dx, dy = cx - px, cy - py
    dist = math.hypot(dx, dy)
    p = r - dist
    if not p > 0:
        return None
    if dist > 0.0:
        nx, ny = dx / dist, dy / dist
    else:
        # centre exactly on the segment: use the left-hand segment normal
        le = math.sqrt(len2)
        nx, ny = -ey / le, ex / le
    return _geom(p, (px, py), nx, ny, s)


def detect_disc_halfplane(center, r: float, plane_y: float = 0.0) -> ContactGeom | None:
    """Contact with the half-plane ``y <= plane_y``; ``r = 0`` is a point."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    p = (plane_y + r) - float(center[1])
    if not p > 0:
        return None
    return _geom(p, (float(center[0]), plane_y), 0.0, 1.0)


def relative_contact_velocity(geom: ContactGeom, vel_disc, vel_surface) -> tuple[float, float]:
    """``(v_N, v_T)`` of the disc relative to the surface point."""
    vx = vel_disc[0] - vel_surface[0]
    vy = vel_disc[1] - vel_surface[1]
    n, t = geom.normal, geom.tangent
    return (vx * n[0] + vy * n[1], vx * t[0] + vy * t[1])


def friction_profile(v_t: float, vs: float) -> float:
    """``2 / (1 + exp(-v_T/vs)) - 1``, evaluated as ``tanh(v_T / (2 vs))``."""
    return math.tanh(v_t / (2.0 * vs))


def resolve(geom: ContactGeom, v_n: float, v_t: float, params: ContactParams) -> ContactForce:
    if not geom.penetration > 0:
        raise ValueError("resolve needs a positive penetration")
    fn = params.kc * geom.penetration ** 3 * (1.0 - params.cc * v_n)
    fn = max(0.0, fn)
    ft = -params.mu * fn * friction_profile(v_t, params.vs)
    return ContactForce(fn, ft, geom.normal, geom.tangent)
