import math

import numpy as np
import pytest

from debrissim.config import default_config
from debrissim.control import Gains, computed_torque, torque_law
from debrissim.dynamics import SimState
from debrissim.engine import SpacecraftDebrisModel, step_rk4
from debrissim.errors import NonFiniteError
from debrissim.planning import JointSample

ZERO2 = np.zeros(2)


def desired(theta, rate=ZERO2, acc=ZERO2):
    return JointSample(np.asarray(theta, float), np.asarray(rate, float), np.asarray(acc, float), False)


class TestTorqueLaw:
    def test_zero_error_gives_bias(self, compiled):
        s = SimState(3.0, 0.5, 1.2, 0.3, -0.1)
        out = computed_torque(compiled, s, desired(s.q, s.qd), Gains())
        _, c, g = compiled.mass_matrix_and_bias(s.t, *s.q, *s.qd)
        assert out.tau == pytest.approx((c[0] + g[0], c[1] + g[1]), abs=1e-13)

    def test_linear_in_gains(self, compiled):
        s = SimState(3.0, 0.5, 1.2, 0.3, -0.1)
        d = desired((0.6, 1.1), (0.2, 0.0))
        base = computed_torque(compiled, s, desired(s.q, s.qd), Gains())
        one = computed_torque(compiled, s, d, Gains(25.0, 10.0))
        two = computed_torque(compiled, s, d, Gains(50.0, 20.0))
        bracket1 = np.subtract(one.tau, base.tau)
        bracket2 = np.subtract(two.tau, base.tau)
        assert bracket2 == pytest.approx(2 * bracket1, rel=1e-12)

    def test_saturation_clips_and_flags(self):
        B = (1.0, 0.0, 0.0, 1.0)
        out = torque_law(B, (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0),
                         desired((10.0, -10.0)), Gains(), saturation=5.0)
        assert out.tau == (5.0, -5.0)
        assert out.saturated

    def test_non_finite_desired(self):
        with pytest.raises(NonFiniteError):
            torque_law((1.0, 0.0, 0.0, 1.0), (0, 0), (0, 0), (0, 0), (0, 0), desired((math.nan, 0.0)), Gains())

    def test_gains_must_be_positive_definite(self):
        with pytest.raises(ValueError):
            Gains(Kp=[[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(ValueError):
            Gains(Kd=[[1.0, 0.5], [0.0, 1.0]])
        g = Gains.critically_damped(25.0)
        assert g.Kd == pytest.approx(10.0 * np.eye(2))


def _contact_free_model():
    model = SpacecraftDebrisModel(default_config("spacecraft_debris"))
    model.contacts_enabled = False
    return model


def test_injected_error_decays_monotonically():
    model = _contact_free_model()
    y = model.initial_state()
    y[0] += 0.05
    y[1] -= 0.03
    dt = 1e-3
    prev = math.inf
    for i in range(3000):
        t = i * dt
        e = model.trajectory(t).theta - y[:2]
        norm = float(np.linalg.norm(e))
        assert norm <= prev + 1e-12
        prev = norm
        y = step_rk4(model, t, y, dt)
    assert prev < 0.05 * 0.02


def test_tracking_without_contact():
    model = _contact_free_model()
    y = model.initial_state()
    dt = 1e-3
    worst = 0.0
    for i in range(20000):
        t = i * dt
        worst = max(worst, float(np.abs(model.trajectory(t).theta - y[:2]).max()))
        y = step_rk4(model, t, y, dt)
    assert worst < 1e-3
