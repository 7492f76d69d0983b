import math
import random

import pytest

from debrissim.kinematics import (
    D,
    L1,
    L2,
    OMEGA0,
    THETA0,
    THETA1,
    THETA2,
    XD,
    YD,
    ArmKinematics,
    GeometryParams,
    R,
    base_com,
    debris_kinematics,
    end_effector,
    link_coms,
    rotation_about_z,
)
from debrissim.symexpr import TIME, Symbol, evaluate_tree, lower, simplify, evaluate

G = GeometryParams()
PARAMS = {R: G.R, D: G.d, L1: G.l1, L2: G.l2, OMEGA0: G.omega0}


def ev(e, **kw):
    env = dict(PARAMS)
    names = {"t": TIME, "th0": THETA0, "th1": THETA1, "th2": THETA2}
    env.update({names[k]: v for k, v in kw.items()})
    return evaluate_tree(e, env)


def eq8(th0, th1, th2, g=G):
    return (
        (g.R - g.d) * math.cos(th0) + g.l1 * math.cos(th0 + th1) + g.l2 * math.cos(th0 + th1 + th2),
        (g.R - g.d) * math.sin(th0) + g.l1 * math.sin(th0 + th1) + g.l2 * math.sin(th0 + th1 + th2),
    )


class TestRotation:
    def test_zero_angle_is_identity(self):
        rot = rotation_about_z(0.0).simplified()
        assert [[e.text for e in row] for row in rot.m] == [["1.0", "0.0"], ["0.0", "1.0"]]

    def test_determinant_is_one(self):
        a = Symbol("a")
        det = rotation_about_z(a).det()
        rng = random.Random(0)
        for _ in range(100):
            assert abs(evaluate_tree(det, {a: rng.uniform(-10, 10)}) - 1.0) < 1e-12

    def test_composition_is_angle_addition(self):
        a, b = Symbol("a"), Symbol("b")
        composed = rotation_about_z(a) @ rotation_about_z(b)
        direct = rotation_about_z(a + b)
        rng = random.Random(1)
        for _ in range(100):
            env = {a: rng.uniform(-4, 4), b: rng.uniform(-4, 4)}
            for i in range(2):
                for j in range(2):
                    assert abs(evaluate_tree(composed.m[i][j], env) - evaluate_tree(direct.m[i][j], env)) < 1e-12

    def test_frame_chain_rotation(self):
        kin = ArmKinematics()
        rot = kin.link2.composed_rotation()
        rng = random.Random(2)
        for _ in range(50):
            t, t1, t2 = rng.uniform(0, 50), rng.uniform(-3, 3), rng.uniform(-3, 3)
            total = G.omega0 * t + t1 + t2
            assert ev(rot.m[0][0], t=t, th1=t1, th2=t2) == pytest.approx(math.cos(total), abs=1e-12)
            assert ev(rot.m[1][0], t=t, th1=t1, th2=t2) == pytest.approx(math.sin(total), abs=1e-12)


class TestBase:
    def test_initial_position(self):
        pk = base_com(G)
        assert (ev(pk.position[0], t=0.0), ev(pk.position[1], t=0.0)) == pytest.approx((4.0, 0.0))

    def test_quarter_turn(self):
        pk = base_com(G, prescribed_base=False)
        assert ev(pk.position[0], th0=math.pi / 2) == pytest.approx(0.0, abs=1e-15)
        assert ev(pk.position[1], th0=math.pi / 2) == pytest.approx(G.R)

    def test_speed_is_r_omega(self):
        pk = base_com(G)
        for t in (0.0, 1.3, 7.7, 20.0, 100.0):
            speed = math.hypot(ev(pk.velocity[0], t=t), ev(pk.velocity[1], t=t))
            assert speed == pytest.approx(G.R * G.omega0, rel=1e-14)


class TestLinks:
    def test_coms_at_zero(self):
        c1, c2 = link_coms(G)
        zero = dict(t=0.0, th1=0.0, th2=0.0)
        assert (ev(c1.position[0], **zero), ev(c1.position[1], **zero)) == pytest.approx((3.5, 0.0))
        assert (ev(c2.position[0], **zero), ev(c2.position[1], **zero)) == pytest.approx((6.5, 0.0))

    def test_rigid_distances(self):
        kin = ArmKinematics()
        c1 = kin.link_coms()[0].position
        j2 = kin.joint2_position()
        j1 = kin.joint1_position()
        rng = random.Random(3)
        for _ in range(100):
            st = dict(t=rng.uniform(0, 60), th1=rng.uniform(-4, 4), th2=rng.uniform(-4, 4))
            p = [ev(e, **st) for e in c1]
            q = [ev(e, **st) for e in j2]
            r = [ev(e, **st) for e in j1]
            assert math.dist(p, q) == pytest.approx(G.l1 / 2, abs=1e-12)
            assert math.dist(r, q) == pytest.approx(G.l1, abs=1e-12)


class TestEndEffector:
    def test_straight_arm(self):
        pk = end_effector(G)
        z = dict(t=0.0, th1=0.0, th2=0.0)
        assert (ev(pk.position[0], **z), ev(pk.position[1], **z)) == pytest.approx((8.0, 0.0))

    def test_raised_arm(self):
        pk = end_effector(G)
        z = dict(t=0.0, th1=math.pi / 2, th2=0.0)
        assert (ev(pk.position[0], **z), ev(pk.position[1], **z)) == pytest.approx((2.0, 6.0))

    def test_matches_closed_form(self):
        pk = end_effector(G, prescribed_base=False)
        plan = lower(list(pk.position), [THETA0, THETA1, THETA2])
        rng = random.Random(4)
        for _ in range(1000):
            q = (rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10))
            got = evaluate(plan, q)
            ref = eq8(*q)
            assert abs(got[0] - ref[0]) < 1e-12 and abs(got[1] - ref[1]) < 1e-12


def _trajectory(rng):
    # smooth joint motion theta_i(t) = a + b t + c t^2
    co = [[rng.uniform(-1, 1) for _ in range(3)] for _ in range(2)]

    def at(t):
        env = dict(PARAMS)
        env[TIME] = t
        for k, (sym, (a, b, c)) in enumerate(zip((THETA1, THETA2), co)):
            env[sym] = a + b * t + c * t * t
            env[sym.diff()] = b + 2 * c * t
            env[sym.diff(2)] = 2 * c
        return env

    return at


@pytest.mark.parametrize("point", ["base", "com1", "com2", "ee", "link2_mid"])
def test_velocity_and_acceleration_match_finite_differences(point):
    kin = ArmKinematics()
    pk = {
        "base": kin.base_com,
        "com1": lambda: kin.link_coms()[0],
        "com2": lambda: kin.link_coms()[1],
        "ee": kin.end_effector,
        "link2_mid": lambda: kin.link_point(2, 0.37),
    }[point]()
    rng = random.Random(5)
    h = 1e-5
    for _ in range(20):
        at = _trajectory(rng)
        t0 = rng.uniform(0, 5)
        for i in range(2):
            for lower_, upper in ((pk.position[i], pk.velocity[i]), (pk.velocity[i], pk.acceleration[i])):
                fd = (evaluate_tree(lower_, at(t0 + h)) - evaluate_tree(lower_, at(t0 - h))) / (2 * h)
                sym = evaluate_tree(upper, at(t0))
                assert abs(sym - fd) / max(1.0, abs(sym)) < 1e-6


class TestDebris:
    def test_initial_state(self):
        pk = debris_kinematics()
        env = {XD: 7.0, YD: 5.0}
        assert (evaluate_tree(pk.position[0], env), evaluate_tree(pk.position[1], env)) == (7.0, 5.0)

    def test_rates_are_state_slots(self):
        pk = debris_kinematics()
        assert pk.velocity == (XD.diff(), YD.diff())
        assert pk.acceleration == (XD.diff(2), YD.diff(2))
        # speed from the state equals the hypot of the rate slots
        env = {XD.diff(): 3.0, YD.diff(): 4.0}
        assert math.hypot(*(evaluate_tree(v, env) for v in pk.velocity)) == 5.0


def test_invalid_geometry_rejected():
    with pytest.raises(ValueError):
        GeometryParams(R=1.0, d=2.0)
    with pytest.raises(ValueError):
        GeometryParams(l1=0.0)


def test_link_index_checked():
    with pytest.raises(ValueError):
        ArmKinematics().link_point(3, 0.5)


def test_simplified_ee_x_has_no_sine_terms():
    # the rotation chain collapses to absolute angles, leaving only cosines in x
    assert "sin(" not in simplify(end_effector().position[0]).text
