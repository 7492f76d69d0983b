"""Computed-torque trajectory tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteError


def _matrix(value) -> np.ndarray:
    m = np.asarray(value, dtype=float)
    if m.ndim == 0:
        m = m * np.eye(2)
    elif m.ndim == 1:
        m = np.diag(m)
    return m


@dataclass(frozen=True, eq=False)
class Gains:
    """Feedback gains; scalars and length-2 sequences are promoted to (diagonal) matrices."""

    Kp: np.ndarray = field(default_factory=lambda: 25.0 * np.eye(2))
    Kd: np.ndarray = field(default_factory=lambda: 10.0 * np.eye(2))

    def __post_init__(self):
        for name in ("Kp", "Kd"):
            m = _matrix(getattr(self, name))
            if m.shape != (2, 2) or not np.all(np.isfinite(m)):
                raise ValueError(f"{name} must be a finite 2x2 matrix")
            if not np.allclose(m, m.T):
                raise ValueError(f"{name} must be symmetric")
            if np.linalg.eigvalsh(m).min() <= 0:
                raise ValueError(f"{name} must be positive definite")
            object.__setattr__(self, name, m)

    def __eq__(self, other):
        if not isinstance(other, Gains):
            return NotImplemented
        return np.array_equal(self.Kp, other.Kp) and np.array_equal(self.Kd, other.Kd)

    def __hash__(self):
        return hash((self.Kp.tobytes(), self.Kd.tobytes()))

    @classmethod
    def critically_damped(cls, kp: float) -> Gains:
        return cls(kp * np.eye(2), 2.0 * math.sqrt(kp) * np.eye(2))


@dataclass(frozen=True)
class ControlOutput:
    tau: tuple[float, float]
    error: tuple[float, float]
    error_rate: tuple[float, float]
    saturated: bool = False


def torque_law(B, c, g, theta, theta_dot, desired, gains: Gains,
               saturation: float | None = None) -> ControlOutput:
    """``tau = B (qdd_d + Kp e + Kd e') + c + g`` with ``e = q_d - q``.

    ``B`` is a 2x2 matrix (nested or row-major flat), ``c`` and ``g`` length-2.
    ``desired`` is ``(q_d, qd_d, qdd_d)``. With ``saturation`` each torque is
    clipped to ``[-saturation, saturation]`` and the output is flagged.
    """
    qd, qd_dot, qd_ddot = desired[0], desired[1], desired[2]
    vals = [*qd, *qd_dot, *qd_ddot]
    if not all(math.isfinite(v) for v in vals):
        raise NonFiniteError("non-finite desired trajectory")
    b = np.asarray(B, dtype=float).reshape(4)
    e1, e2 = qd[0] - theta[0], qd[1] - theta[1]
    ed1, ed2 = qd_dot[0] - theta_dot[0], qd_dot[1] - theta_dot[1]
    kp, kd = gains.Kp, gains.Kd
    u1 = qd_ddot[0] + kp[0, 0] * e1 + kp[0, 1] * e2 + kd[0, 0] * ed1 + kd[0, 1] * ed2
    u2 = qd_ddot[1] + kp[1, 0] * e1 + kp[1, 1] * e2 + kd[1, 0] * ed1 + kd[1, 1] * ed2
    tau1 = b[0] * u1 + b[1] * u2 + c[0] + g[0]
    tau2 = b[2] * u1 + b[3] * u2 + c[1] + g[1]
    saturated = False
    if saturation is not None:
        lim = float(saturation)
        clipped = (min(lim, max(-lim, tau1)), min(lim, max(-lim, tau2)))
        saturated = clipped != (tau1, tau2)
        tau1, tau2 = clipped
    return ControlOutput((float(tau1), float(tau2)), (e1, e2), (ed1, ed2), saturated)


def computed_torque(eom, state, desired, gains: Gains, saturation: float | None = None) -> ControlOutput:
    """Evaluate the model at ``state`` and apply :func:`torque_law`."""
    B, c, g = eom.mass_matrix_and_bias(state.t, *state.q, *state.qd)
    return torque_law(B, c, g, state.q, state.qd, desired, gains, saturation)
