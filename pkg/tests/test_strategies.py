"""Control laws: steering vectors, directions, evader behaviors."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from pursuitlab.errors import DegenerateStateError, DomainError, GeometryError, SingularPolicyError
from pursuitlab.geometry import Vec2, apollonius_disc, capture_disc
from pursuitlab.strategies import (
    BangBangPursuer,
    ConstantHeadingEvader,
    DeadzonePursuer,
    ExternalEvader,
    RadialEscapeEvader,
    ScriptedEvader,
    ToPointEvader,
    bang_bang_direction,
    deadzone_direction,
    evader_velocity,
    guaranteed_direction,
    lateral_aim_points,
    make_state,
    pure_pursuit_direction,
    z_evader,
    z_pursuer,
)

finite = st.floats(min_value=-20.0, max_value=20.0, allow_nan=False)


def initial_state(x_P=Vec2(0, 0), x_E=Vec2(0, 1), nu=0.5, delta=0.1, t=0.0):
    cap = capture_disc(apollonius_disc(x_P, x_E, nu), delta)
    return make_state(t, x_P, x_E, nu, cap)


def random_state(rng, nu=None, delta=None):
    nu = rng.uniform(0.05, 0.9) if nu is None else nu
    delta = rng.uniform(0.02, 0.5) if delta is None else delta
    x_P0 = Vec2(rng.uniform(-3, 3), rng.uniform(-3, 3))
    x_E0 = Vec2(rng.uniform(-3, 3), rng.uniform(-3, 3))
    if x_P0.distance_to(x_E0) < 0.1:
        x_E0 = x_E0 + Vec2(0.5, 0.0)
    cap = capture_disc(apollonius_disc(x_P0, x_E0, nu), delta)
    # evolve the agents a little so y is generally nonzero
    x_P = x_P0 + Vec2(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))
    x_E = x_E0 + Vec2(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))
    if x_P.distance_to(x_E) < 0.05:
        x_E = x_E + Vec2(0.3, 0.0)
    return make_state(1.0, x_P, x_E, nu, cap)


class TestSteeringVectors:
    def test_initial_z_is_delta_along_los(self):
        state = initial_state()
        z = z_pursuer(state)
        assert z.x == pytest.approx(0.0, abs=1e-15)
        assert z.y == pytest.approx(0.1, abs=1e-12)
        assert z.norm() == pytest.approx(0.1, abs=1e-12)

    def test_translated_agents_shift_y(self):
        # translating both agents by d shifts the disc center by d while the
        # capture disc stays put: y = d, line of sight unchanged
        base = initial_state()
        state = make_state(0.0, Vec2(0.1, 0.0), Vec2(0.1, 1.0), 0.5, base.cap)
        assert state.off.y.x == pytest.approx(0.1, abs=1e-12)
        assert state.off.y.y == pytest.approx(0.0, abs=1e-12)
        assert state.ac.radius == pytest.approx(base.ac.radius, abs=1e-15)
        z = z_pursuer(state)
        assert z.x == pytest.approx(0.05, abs=1e-12)
        assert z.y == pytest.approx(0.1, abs=1e-12)

    def test_zero_vector_at_closed_gap(self):
        # R_A = R_C with centered disc: z_P degenerates (never reached under the law)
        state = initial_state()
        cap_tight = capture_disc(apollonius_disc(Vec2(0, 0), Vec2(0, 1), 0.5), 1e-300)
        tight = make_state(0.0, Vec2(0, 0), Vec2(0, 1), 0.5, cap_tight)
        assert z_pursuer(tight).norm() == pytest.approx(0.0, abs=1e-12)
        assert z_pursuer(state).norm() > 0

    def test_degenerate_state_raises(self):
        state = initial_state()
        coincident = make_state(0.0, Vec2(0, 1), Vec2(0, 1), 0.5, state.cap)
        with pytest.raises(DegenerateStateError):
            z_pursuer(coincident)

    def test_initial_z_evader(self):
        state = initial_state()
        z = z_evader(state)
        assert z.x == pytest.approx(0.0, abs=1e-15)
        assert z.norm() == pytest.approx(0.5 * 0.1, abs=1e-12)

    def test_z_evader_zero_case(self):
        cap_tight = capture_disc(apollonius_disc(Vec2(0, 0), Vec2(0, 1), 0.5), 1e-300)
        tight = make_state(0.0, Vec2(0, 0), Vec2(0, 1), 0.5, cap_tight)
        assert z_evader(tight).norm() == pytest.approx(0.0, abs=1e-12)

    def test_norm_identity_random_states(self):
        rng = random.Random(3)
        for _ in range(300):
            state = random_state(rng)
            zp, ze = z_pursuer(state), z_evader(state)
            lhs = zp.norm_sq() - ze.norm_sq()
            rhs = (1 - state.nu ** 2) * state.off.V
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs), abs(rhs))


class TestGuaranteedDirection:
    def test_initial_direction_is_line_of_sight(self):
        state = initial_state()
        d = guaranteed_direction(state)
        p = pure_pursuit_direction(state)
        assert (d.x, d.y) == (p.x, p.y)

    def test_normalization(self):
        rng = random.Random(11)
        for _ in range(200):
            d = guaranteed_direction(random_state(rng))
            assert d.norm() == pytest.approx(1.0, abs=1e-12)

    def test_explicit_normalization_example(self):
        # z = (0.05, 0.1) -> unit (1, 2)/sqrt(5)
        state = initial_state()
        shifted = make_state(0.0, Vec2(0.1, 0.0), Vec2(0.1, 1.0), 0.5, state.cap)
        d = guaranteed_direction(shifted)
        assert d.x == pytest.approx(1 / math.sqrt(5), abs=1e-12)
        assert d.y == pytest.approx(2 / math.sqrt(5), abs=1e-12)

    def test_singular_policy_error(self):
        cap_tight = capture_disc(apollonius_disc(Vec2(0, 0), Vec2(0, 1), 0.5), 1e-300)
        tight = make_state(0.0, Vec2(0, 0), Vec2(0, 1), 0.5, cap_tight)
        with pytest.raises(SingularPolicyError):
            guaranteed_direction(tight)

    def test_continuity_in_the_state(self):
        rng = random.Random(5)
        checked = 0
        while checked < 100:
            state = random_state(rng)
            if z_pursuer(state).norm() < 0.05:
                continue  # continuity bound is only claimed away from z ~ 0
            bumped = make_state(state.t, state.x_P, state.x_E + Vec2(1e-6, -1e-6), state.nu, state.cap)
            d1, d2 = guaranteed_direction(state), guaranteed_direction(bumped)
            angle = math.acos(max(-1.0, min(1.0, d1.dot(d2))))
            assert angle <= 1e-3
            checked += 1


class TestPurePursuit:
    def test_direction_345(self):
        state = initial_state(x_P=Vec2(0, 0), x_E=Vec2(3, 4), nu=0.5)
        d = pure_pursuit_direction(state)
        assert d.x == pytest.approx(0.6, abs=1e-15)
        assert d.y == pytest.approx(0.8, abs=1e-15)

    def test_capture_state_raises(self):
        state = initial_state()
        coincident = make_state(0.0, Vec2(1, 1), Vec2(1, 1), 0.5, state.cap)
        with pytest.raises(DegenerateStateError):
            pure_pursuit_direction(coincident)


class TestBangBang:
    def setup_method(self):
        self.nu = 0.677
        self.state = initial_state(x_P=Vec2(0, 0), x_E=Vec2(0, 0.8), nu=self.nu, delta=0.1)
        self.wall_x = self.state.ac.center.x + self.state.ac.radius + 0.3

    def test_symmetric_tie_always_right_angle(self):
        d = bang_bang_direction(self.state, self.wall_x, tie_break="always_right")
        # cos(psi) between the chosen direction and the line of sight
        cos_psi = d.dot(pure_pursuit_direction(self.state))
        assert cos_psi == pytest.approx(1 / math.sqrt(1 + self.nu ** 2), abs=1e-12)
        assert d.x > 0

    def test_displaced_evader_aims_left(self):
        state = make_state(0.0, Vec2(0, 0), Vec2(-0.01, 0.8), self.nu, self.state.cap)
        d = bang_bang_direction(state, self.wall_x, tie_break="always_right")
        assert d.x < 0  # disc shifted left, left gap smaller, aim at I1

    def test_aim_points_extremize_wall_distance(self):
        i1, i2, d1, d2 = lateral_aim_points(self.state.ac, self.wall_x)
        ac = self.state.ac
        samples = [
            Vec2(ac.center.x + ac.radius * math.cos(2 * math.pi * k / 360),
                 ac.center.y + ac.radius * math.sin(2 * math.pi * k / 360))
            for k in range(360)
        ]
        assert min(p.x + self.wall_x for p in samples) == pytest.approx(d1, abs=1e-12)
        assert min(self.wall_x - p.x for p in samples) == pytest.approx(d2, abs=1e-12)
        assert i1.x == pytest.approx(ac.center.x - ac.radius)
        assert i2.x == pytest.approx(ac.center.x + ac.radius)

    def test_decided_geometry_raises(self):
        with pytest.raises(GeometryError):
            bang_bang_direction(self.state, 0.5 * self.state.ac.radius, tie_break="always_left")

    def test_seeded_coin_reproducible(self):
        headings = []
        for _ in range(2):
            p = BangBangPursuer(wall_x=self.wall_x, tie_break="seeded_coin", ims_seed=13)
            headings.append([p.direction(self.state).x for _ in range(20)])
        assert headings[0] == headings[1]

    def test_coin_requires_rng(self):
        with pytest.raises(DomainError):
            bang_bang_direction(self.state, self.wall_x, tie_break="seeded_coin", rng=None)


class TestDeadzone:
    def setup_method(self):
        self.state = initial_state(x_P=Vec2(0, 0), x_E=Vec2(0, 0.8), nu=0.677, delta=0.1)
        self.wall_x = self.state.ac.center.x + self.state.ac.radius + 0.3
        self.inner = BangBangPursuer(wall_x=self.wall_x, tie_break="always_right")

    def test_on_surface_commits(self):
        state = make_state(2.0, self.state.x_P, self.state.x_E, self.state.nu, self.state.cap)
        heading, until = deadzone_direction(state, self.inner, 0.5, 0.01, -math.inf)
        assert until == pytest.approx(2.5)
        assert (heading.x, heading.y) == pytest.approx((0.0, 1.0))

    def test_off_surface_equals_bang_bang(self):
        state = make_state(0.0, Vec2(0, 0), Vec2(-0.1, 0.8), self.state.nu, self.state.cap)
        heading, until = deadzone_direction(state, self.inner, 0.5, 0.001, -math.inf)
        expect = self.inner.direction(state)
        assert (heading.x, heading.y) == (expect.x, expect.y)
        assert until == -math.inf

    def test_commitment_window_holds(self):
        pursuer = DeadzonePursuer(inner=self.inner, commit_time=0.5, trigger_width=0.01)
        state = make_state(1.0, self.state.x_P, self.state.x_E, self.state.nu, self.state.cap)
        pursuer.direction(state)  # triggers commitment until 1.5
        off_surface = make_state(1.2, Vec2(0, 0), Vec2(-0.2, 0.8), self.state.nu, self.state.cap)
        d = pursuer.direction(off_surface)
        expect = pure_pursuit_direction(off_surface)
        assert (d.x, d.y) == (expect.x, expect.y)


class TestEvaders:
    def test_to_point(self):
        state = initial_state()
        v = evader_velocity(ToPointEvader(target=Vec2(0, 2)), state)
        assert (v.x, v.y) == pytest.approx((0.0, 0.5))

    def test_to_point_stops_on_arrival(self):
        state = initial_state(x_E=Vec2(0, 1))
        ev = ToPointEvader(target=Vec2(0, 1.0005), stop_on_arrival=True)
        assert evader_velocity(ev, state).norm() == 0.0
        moving = ToPointEvader(target=Vec2(0, 1.0005), stop_on_arrival=False)
        assert evader_velocity(moving, state).norm() == pytest.approx(0.5)

    def test_constant_heading(self):
        state = initial_state(nu=0.85)
        v = evader_velocity(ConstantHeadingEvader(heading=Vec2(0, 1)), state)
        assert (v.x, v.y) == pytest.approx((0.0, 0.85))

    def test_constant_heading_normalizes(self):
        ev = ConstantHeadingEvader(heading=Vec2(3, 4))
        assert (ev.heading.x, ev.heading.y) == pytest.approx((0.6, 0.8))

    def test_radial_escape(self):
        state = initial_state()
        v = evader_velocity(RadialEscapeEvader(origin=Vec2(0, 0)), state)
        assert (v.x, v.y) == pytest.approx((0.0, 0.5))
        stuck = make_state(0.0, Vec2(1, 0), Vec2(0, 0), 0.5, state.cap)
        assert evader_velocity(RadialEscapeEvader(origin=Vec2(0, 0)), stuck).norm() == 0.0

    def test_scripted_segments(self):
        state = initial_state(t=0.5)
        ev = ScriptedEvader([(1.0, Vec2(1, 0), 0.5)])
        v = evader_velocity(ev, state)
        assert (v.x, v.y) == pytest.approx((0.25, 0.0))
        after = make_state(1.5, state.x_P, state.x_E, state.nu, state.cap)
        assert evader_velocity(ev, after).norm() == 0.0

    def test_scripted_boundary_goes_to_next_segment(self):
        ev = ScriptedEvader([(1.0, Vec2(1, 0), 1.0), (1.0, Vec2(0, 1), 1.0)])
        at_boundary = initial_state(t=1.0)
        v = evader_velocity(ev, at_boundary)
        assert v.y == pytest.approx(0.5) and v.x == 0.0

    def test_scripted_validation(self):
        with pytest.raises(DomainError):
            ScriptedEvader([(0.0, Vec2(1, 0), 1.0)])
        with pytest.raises(DomainError):
            ScriptedEvader([(1.0, Vec2(1, 0), 1.5)])

    def test_external_hold_then_dropout(self):
        ev = ExternalEvader(hold_window=0.25)
        state = initial_state()
        assert evader_velocity(ev, state).norm() == 0.0  # nothing posted yet
        ev.post(Vec2(0, 2), 0.8, t=0.0)
        v = evader_velocity(ev, state)
        assert (v.x, v.y) == pytest.approx((0.0, 0.8 * 0.5))
        held = make_state(0.2, state.x_P, state.x_E, state.nu, state.cap)
        assert evader_velocity(ev, held).norm() > 0.0
        dropped = make_state(0.26, state.x_P, state.x_E, state.nu, state.cap)
        assert evader_velocity(ev, dropped).norm() == 0.0

    def test_external_clamps(self):
        ev = ExternalEvader()
        ev.post(Vec2(0, 1), 7.0, t=0.0)
        assert ev.fraction == 1.0
        ev.post(Vec2(0, 0), 1.0, t=0.0)  # zero heading means stationary
        assert ev.fraction == 0.0 and ev.heading.norm() == 0.0

    def test_speed_cap_enforced(self):
        class Hot:
            def velocity(self, state, speed):
                return Vec2(3.0, 4.0)

        state = initial_state(nu=0.5)
        v = evader_velocity(Hot(), state)
        assert v.norm() == pytest.approx(0.5, abs=1e-12)

    def test_lower_speed_cap_passthrough(self):
        state = initial_state(nu=0.7)
        v = evader_velocity(ConstantHeadingEvader(heading=Vec2(1, 0)), state, speed=0.5)
        assert v.x == pytest.approx(0.5)

    @settings(max_examples=100, deadline=None)
    @given(hx=finite, hy=finite, frac=st.floats(min_value=0, max_value=1),
           nu=st.floats(min_value=0.0, max_value=0.95))
    def test_admissibility_everywhere(self, hx, hy, frac, nu):
        if hx == 0 and hy == 0:
            return
        state = initial_state(nu=nu)
        ev = ScriptedEvader([(5.0, Vec2(hx, hy), frac)])
        assert evader_velocity(ev, state).norm() <= nu + 1e-12
