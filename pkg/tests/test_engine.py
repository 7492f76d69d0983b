import math
from dataclasses import replace

import numpy as np
import pytest

from debrissim.config import BallParams, default_config
from debrissim.engine import (
    BALL_COLUMNS,
    SPACECRAFT_COLUMNS,
    BouncingBallModel,
    SpacecraftDebrisModel,
    integrate,
    make_model,
    run_scenario,
    simulate,
    step_rk4,
)
from debrissim.errors import NonFiniteError


def ball_config(**ball):
    cfg = default_config("bouncing_ball")
    return replace(cfg, ball=replace(cfg.ball, **ball))


def contact_free_spacecraft():
    model = SpacecraftDebrisModel(default_config("spacecraft_debris"))
    model.contacts_enabled = False
    return model


class TestIntegrator:
    def test_free_fall_is_exact(self):
        model = BouncingBallModel(ball_config())
        ys = integrate(model, model.initial_state(), 1e-3, 1000)
        assert abs(ys[-1][1] - 0.5) < 1e-12
        assert abs(ys[-1][3] + 1.0) < 1e-12

    def test_zero_dynamics(self):
        model = BouncingBallModel(ball_config(force=0.0, y0=2.0))
        y0 = model.initial_state()
        ys = integrate(model, y0, 1e-2, 100)
        assert (ys == y0).all()

    def test_fourth_order_convergence(self):
        # contact-free 10 s runs at dt, dt/2, dt/4; the error ratio is 2^4
        finals = []
        for dt in (0.02, 0.01, 0.005):
            model = contact_free_spacecraft()
            n = round(10.0 / dt)
            finals.append(integrate(model, model.initial_state(), dt, n)[-1])
        e1 = np.linalg.norm(finals[0] - finals[1])
        e2 = np.linalg.norm(finals[1] - finals[2])
        assert 16 * 0.7 <= e1 / e2 <= 16 * 1.3

    def test_rejects_bad_step(self):
        model = BouncingBallModel(ball_config())
        with pytest.raises(ValueError):
            step_rk4(model, 0.0, model.initial_state(), 0.0)

    def test_non_finite_state_is_reported(self):
        class Blowup:
            columns = ("t", "x")

            def initial_state(self):
                return np.array([1.0])

            def evaluate(self, t, y):
                return np.array([math.inf if t > 0.05 else 0.0]), []

            def derivative(self, t, y):
                return self.evaluate(t, y)[0]

            def record(self, t, y, info, trace):
                trace.rows.append((t, float(y[0])))

        trace = simulate(Blowup(), default_config("bouncing_ball"))
        assert not trace.completed
        assert "non-finite" in trace.error
        assert 0 < len(trace.rows) < 100
        with pytest.raises(NonFiniteError):
            step_rk4(Blowup(), 0.1, np.array([1.0]), 0.1)


class TestBall:
    def test_columns(self, ball_trace):
        assert ball_trace.columns == BALL_COLUMNS
        assert all(len(r) == len(BALL_COLUMNS) for r in ball_trace.rows)

    def test_first_impact(self, ball_trace):
        assert abs(ball_trace.events[0].t - math.sqrt(2.0)) <= 2e-3

    def test_apexes_decrease(self, ball_trace):
        y, vy = ball_trace.column("y"), ball_trace.column("vy")
        apex = [y[i] for i in range(1, len(y)) if vy[i - 1] > 0 >= vy[i]]
        assert len(apex) >= 3
        assert all(b < a for a, b in zip(apex, apex[1:]))

    def test_normal_force_non_negative(self, ball_trace):
        assert ball_trace.column("F_N").min() >= 0.0

    def test_speed_lost_per_bounce(self, ball_trace):
        # kinetic energy at y = 0 on the way up is below the value on the way down
        y, vy = ball_trace.column("y"), ball_trace.column("vy")
        down = [abs(vy[i]) for i in range(1, len(y)) if y[i - 1] > 0 >= y[i]]
        up = [abs(vy[i]) for i in range(1, len(y)) if y[i - 1] <= 0 < y[i]]
        assert len(up) >= 3
        for d, u in zip(down, up):
            assert u < d

    def test_penetration_within_energy_scale(self, ball_trace):
        kc = default_config("bouncing_ball").contact.kc
        # kc p^4 / 4 = m g h + F p bounds the deepest penetration (damping only helps)
        p = 0.1
        for _ in range(50):
            p = (4.0 * (1.0 + p) / kc) ** 0.25
        assert -ball_trace.column("y").min() <= p


class TestSpacecraft:
    def test_columns(self, spacecraft_trace):
        assert spacecraft_trace.columns == SPACECRAFT_COLUMNS
        assert spacecraft_trace.completed
        assert len(spacecraft_trace.rows) == 20001

    def test_third_law_in_assembled_derivative(self, spacecraft_trace, compiled):
        model = SpacecraftDebrisModel(default_config("spacecraft_debris"))
        ev = spacecraft_trace.events[0]
        row = spacecraft_trace.rows[round(ev.t / 1e-3)]
        cols = SPACECRAFT_COLUMNS
        y = np.array([row[cols.index(k)] for k in
                      ("th1", "th2", "th1_dot", "th2_dot", "deb_x", "deb_y", "deb_vx", "deb_vy")])
        dy, (_, ctrl, pts, contacts) = model.evaluate(ev.t, y)
        assert contacts
        f_disc = np.sum([c.force.on_disc for c in contacts], axis=0)
        f_surf = np.sum([c.force.on_surface for c in contacts], axis=0)
        assert tuple(f_disc + f_surf) == (0.0, 0.0)
        # debris: m a = attraction + contact
        dx, dyy = pts["com2"][0] - y[4], pts["com2"][1] - y[5]
        dist = math.hypot(dx, dyy)
        assert dy[6:8] == pytest.approx(np.array([dx, dyy]) / dist + f_disc, abs=1e-12)
        # arm: B q'' + c - tau equals J^T of the force on the link
        B, c, _ = compiled.mass_matrix_and_bias(ev.t, *y[:4])
        lhs = np.array(B).reshape(2, 2) @ dy[2:4] + np.array(c) - np.array(ctrl.tau)
        rhs = np.zeros(2)
        for ct in contacts:
            link = 1 if ct.pair.endswith("1") else 2
            _, _, jac = compiled.link_point(link, ct.geom.arc, ev.t, *y[:4])
            rhs += np.array(jac).T @ np.array(ct.force.on_surface)
        assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_far_debris_does_not_affect_arm(self):
        model = SpacecraftDebrisModel(default_config("spacecraft_debris"))
        y = model.initial_state()
        a, b = y.copy(), y.copy()
        a[4:6] = (100.0, 100.0)
        b[4:6] = (-250.0, 40.0)
        assert (model.derivative(1.0, a)[:4] == model.derivative(1.0, b)[:4]).all()

    def test_initial_derivative_is_reproducible(self):
        cfg = default_config("spacecraft_debris")
        m1, m2 = make_model(cfg), make_model(cfg)
        d1 = m1.derivative(0.0, m1.initial_state())
        d2 = m2.derivative(0.0, m2.initial_state())
        assert np.isfinite(d1).all()
        assert d1.tobytes() == d2.tobytes()

    def test_initial_joint_rates_follow_reference(self):
        model = SpacecraftDebrisModel(default_config("spacecraft_debris"))
        y = model.initial_state()
        assert y[2:4] == pytest.approx(model.trajectory(0.0).theta_dot)
        assert tuple(y[4:6]) == (7.0, 5.0)


def test_ball_runs_are_identical():
    a = run_scenario(default_config("bouncing_ball"))
    b = run_scenario(default_config("bouncing_ball"))
    assert a.rows == b.rows


def test_unknown_scenario():
    cfg = replace(default_config("bouncing_ball"), scenario="nope")
    with pytest.raises(ValueError):
        make_model(cfg)


def test_ball_params_default():
    assert BallParams().y0 == 1.0
