import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from debrissim.contact import (
    ContactGeom,
    ContactParams,
    detect_disc_halfplane,
    detect_disc_segment,
    friction_profile,
    relative_contact_velocity,
    resolve,
)

SEG = ((-1.0, 0.0), (1.0, 0.0))


def geom(p=0.01):
    return ContactGeom(p, (0.0, 0.0), (0.0, 1.0), (-1.0, 0.0))


class TestSegment:
    def test_perpendicular_drop(self):
        g = detect_disc_segment((0.0, 0.05), 0.1, *SEG)
        assert g.penetration == pytest.approx(0.05)
        assert g.normal == (0.0, 1.0)
        assert g.point == (0.0, 0.0)
        assert g.arc == 0.5

    def test_beyond_endpoint(self):
        assert detect_disc_segment((2.0, 0.0), 0.1, *SEG) is None

    def test_endpoint_contact_normal_points_away_from_endpoint(self):
        g = detect_disc_segment((1.05, 0.0), 0.1, *SEG)
        assert g.normal == pytest.approx((1.0, 0.0))
        assert g.arc == 1.0

    def test_against_dense_sampling(self):
        rng = random.Random(0)
        grid = np.linspace(0.0, 1.0, 200001)
        for _ in range(1000):
            a = np.array([rng.uniform(-2, 2), rng.uniform(-2, 2)])
            b = np.array([rng.uniform(-2, 2), rng.uniform(-2, 2)])
            c = np.array([rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)])
            r = rng.uniform(0.05, 2.0)
            pts = a[None, :] + grid[:, None] * (b - a)[None, :]
            dmin = np.min(np.hypot(*(pts - c).T))
            g = detect_disc_segment(c, r, a, b)
            if r - dmin > 1e-6:
                assert g is not None
                assert g.penetration == pytest.approx(r - dmin, abs=1e-6)
                assert math.hypot(*g.normal) == pytest.approx(1.0)
            elif r - dmin < -1e-6:
                assert g is None

    def test_degenerate_segment(self):
        with pytest.raises(ValueError):
            detect_disc_segment((0.0, 0.0), 0.1, (1.0, 1.0), (1.0, 1.0))


class TestHalfPlane:
    def test_point_below_ground(self):
        g = detect_disc_halfplane((0.0, -0.01), 0.0)
        assert g.penetration == pytest.approx(0.01)
        assert g.normal == (0.0, 1.0)

    def test_above_ground(self):
        assert detect_disc_halfplane((0.0, 0.5), 0.0) is None

    def test_grazing_is_not_contact(self):
        assert detect_disc_halfplane((0.0, 0.0), 0.0) is None
        assert detect_disc_halfplane((0.0, 0.1), 0.1) is None


class TestRelativeVelocity:
    def test_equal_velocities(self):
        assert relative_contact_velocity(geom(), (0.3, -2.0), (0.3, -2.0)) == (0.0, 0.0)

    def test_separating_along_normal(self):
        assert relative_contact_velocity(geom(), (0.0, 1.0), (0.0, 0.0)) == (1.0, 0.0)


class TestResolve:
    def test_pure_stiffness(self):
        f = resolve(geom(0.01), 0.0, 0.0, ContactParams(kc=1e5, cc=0.0))
        assert f.normal_force == pytest.approx(0.1, rel=1e-12)
        assert f.tangent_force == 0.0

    def test_friction_saturates(self):
        p = ContactParams()
        fwd = resolve(geom(), 0.0, 1e6, p)
        back = resolve(geom(), 0.0, -1e6, p)
        assert fwd.tangent_force == pytest.approx(-p.mu * fwd.normal_force)
        assert back.tangent_force == pytest.approx(p.mu * back.normal_force)

    def test_normal_force_clamped(self):
        f = resolve(geom(), 10.0, 0.2, ContactParams(cc=0.3))
        assert f.normal_force == 0.0 and f.tangent_force == 0.0

    def test_third_law(self):
        f = resolve(geom(0.02), -0.4, 0.7, ContactParams())
        total = np.add(f.on_disc, f.on_surface)
        assert tuple(total) == (0.0, 0.0)

    def test_sigmoid_identity(self):
        for v in (-0.05, -0.001, 0.0, 0.003, 0.2):
            sig = 2.0 / (1.0 + math.exp(-v / 0.01)) - 1.0
            assert friction_profile(v, 0.01) == pytest.approx(sig, abs=1e-15)

    @pytest.mark.parametrize("kw", [{"kc": 0.0}, {"cc": -1.0}, {"mu": -0.1}, {"vs": 0.0}])
    def test_invalid_params(self, kw):
        with pytest.raises(ValueError):
            ContactParams(**kw)


finite = st.floats(-1e3, 1e3, allow_nan=False)
pens = st.floats(1e-6, 0.5)


@given(pens, finite, finite)
def test_friction_odd_and_bounded(p, v_n, v_t):
    params = ContactParams()
    a = resolve(geom(p), v_n, v_t, params)
    b = resolve(geom(p), v_n, -v_t, params)
    assert a.tangent_force == -b.tangent_force
    assert a.normal_force >= 0.0
    assert abs(a.tangent_force) <= params.mu * a.normal_force
    # strict inequality wherever tanh has not rounded to 1 in double precision
    if abs(v_t / params.vs) <= 30.0 and a.normal_force > 0.0:
        assert abs(a.tangent_force) < params.mu * a.normal_force


@given(pens, st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_friction_non_increasing(p, v1, v2):
    params = ContactParams()
    lo, hi = sorted((v1, v2))
    assert resolve(geom(p), 0.0, lo, params).tangent_force >= resolve(geom(p), 0.0, hi, params).tangent_force


@given(st.floats(1e-6, 0.5), st.floats(1e-6, 0.5), st.floats(-100, 0))
def test_normal_force_increases_with_penetration_when_approaching(p1, p2, v_n):
    params = ContactParams()
    if p1 == p2:
        return
    lo, hi = sorted((p1, p2))
    assert resolve(geom(lo), v_n, 0.0, params).normal_force < resolve(geom(hi), v_n, 0.0, params).normal_force
