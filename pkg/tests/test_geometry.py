"""Dominance-disc geometry: frozen examples and invariant properties."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from pursuitlab.errors import DomainError
from pursuitlab.geometry import (
    Disc,
    Vec2,
    apollonius_disc,
    capture_disc,
    capture_margin,
    capture_time_bound,
    coefficients,
    lyapunov_envelope,
    offsets,
)

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
speed_ratios = st.floats(min_value=0.0, max_value=0.95)
positive_ratios = st.floats(min_value=0.01, max_value=0.95)


def boundary_points(disc, n):
    return [
        Vec2(disc.center.x + disc.radius * math.cos(2 * math.pi * k / n),
             disc.center.y + disc.radius * math.sin(2 * math.pi * k / n))
        for k in range(n)
    ]


class TestCoefficients:
    def test_zero_ratio_degenerates(self):
        c = coefficients(0.0)
        assert (c.alpha, c.beta, c.gamma) == (1.0, 0.0, 0.0)

    def test_half_ratio(self):
        c = coefficients(0.5)
        assert c.alpha == pytest.approx(4 / 3, abs=1e-15)
        assert c.beta == pytest.approx(1 / 3, abs=1e-15)
        assert c.gamma == pytest.approx(2 / 3, abs=1e-15)

    def test_near_singular_growth(self):
        c = coefficients(0.99)
        assert c.alpha == pytest.approx(50.2513, abs=1e-4)

    @given(nu=speed_ratios)
    def test_identities_and_ordering(self, nu):
        c = coefficients(nu)
        assert c.beta == pytest.approx(nu * c.gamma, rel=1e-14)
        assert c.beta == pytest.approx(nu * nu * c.alpha, rel=1e-14)
        assert c.gamma == pytest.approx(nu * c.alpha, rel=1e-14)
        assert c.alpha >= c.gamma >= c.beta >= 0.0

    @pytest.mark.parametrize("nu", [-0.1, 1.0, 1.2, math.inf, math.nan])
    def test_domain_errors(self, nu):
        with pytest.raises(DomainError):
            coefficients(nu)


class TestApolloniusDisc:
    def test_vertical_half_ratio(self):
        disc = apollonius_disc(Vec2(0, 0), Vec2(0, 1), 0.5)
        assert disc.center.x == pytest.approx(0.0, abs=1e-15)
        assert disc.center.y == pytest.approx(4 / 3, abs=1e-12)
        assert disc.radius == pytest.approx(2 / 3, abs=1e-12)
        # ratio-of-distances oracle on boundary samples
        for b in boundary_points(disc, 64):
            d_e = b.distance_to(Vec2(0, 1))
            d_p = b.distance_to(Vec2(0, 0))
            assert d_e == pytest.approx(0.5 * d_p, abs=1e-12)

    def test_zero_ratio_is_evader_point(self):
        disc = apollonius_disc(Vec2(0, 0), Vec2(0, 1), 0.0)
        assert disc.center == Vec2(0.0, 1.0)
        assert disc.radius == 0.0

    def test_figure_geometry(self):
        disc = apollonius_disc(Vec2(0, 0), Vec2(0, 0.8), 0.677)
        assert disc.center.y == pytest.approx(1.4769, abs=1e-4)
        assert disc.radius == pytest.approx(0.9999, abs=1e-4)
        for b in boundary_points(disc, 64):
            assert b.distance_to(Vec2(0, 0.8)) == pytest.approx(
                0.677 * b.distance_to(Vec2(0, 0)), abs=1e-12)

    def test_coincident_agents_degenerate(self):
        disc = apollonius_disc(Vec2(1, 2), Vec2(1, 2), 0.5)
        assert disc.center == Vec2(1.0, 2.0)
        assert disc.radius == 0.0

    def test_rejects_nonfinite_positions(self):
        with pytest.raises(DomainError):
            apollonius_disc(Vec2(math.nan, 0), Vec2(0, 1), 0.5)
        with pytest.raises(DomainError):
            apollonius_disc(Vec2(0, 0), Vec2(math.inf, 1), 0.5)

    @settings(max_examples=200, deadline=None)
    @given(px=finite, py=finite, ex=finite, ey=finite, nu=positive_ratios)
    def test_ratio_property(self, px, py, ex, ey, nu):
        x_P, x_E = Vec2(px, py), Vec2(ex, ey)
        if x_P.distance_to(x_E) < 1e-6:
            return
        disc = apollonius_disc(x_P, x_E, nu)
        scale = max(1.0, x_P.distance_to(x_E))
        for b in boundary_points(disc, 256):
            assert abs(b.distance_to(x_E) - nu * b.distance_to(x_P)) <= 1e-10 * scale

    @settings(max_examples=200, deadline=None)
    @given(px=finite, py=finite, ex=finite, ey=finite,
           nu1=st.floats(min_value=0.0, max_value=0.95),
           nu2=st.floats(min_value=0.0, max_value=0.95))
    def test_monotone_inflation(self, px, py, ex, ey, nu1, nu2):
        if nu1 > nu2:
            nu1, nu2 = nu2, nu1
        d1 = apollonius_disc(Vec2(px, py), Vec2(ex, ey), nu1)
        d2 = apollonius_disc(Vec2(px, py), Vec2(ex, ey), nu2)
        gap = d1.center.distance_to(d2.center)
        assert gap <= d2.radius - d1.radius + 1e-9

    @settings(max_examples=100, deadline=None)
    @given(px=finite, py=finite, ex=finite, ey=finite, nu=positive_ratios,
           angle=st.floats(min_value=-math.pi, max_value=math.pi),
           tx=finite, ty=finite)
    def test_rigid_motion_equivariance(self, px, py, ex, ey, nu, angle, tx, ty):
        ca, sa = math.cos(angle), math.sin(angle)

        def move(v):
            return Vec2(ca * v.x - sa * v.y + tx, sa * v.x + ca * v.y + ty)

        base = apollonius_disc(Vec2(px, py), Vec2(ex, ey), nu)
        moved = apollonius_disc(move(Vec2(px, py)), move(Vec2(ex, ey)), nu)
        expect_center = move(base.center)
        scale = max(1.0, abs(px) + abs(py) + abs(ex) + abs(ey) + abs(tx) + abs(ty))
        assert moved.center.distance_to(expect_center) <= 1e-9 * scale
        assert moved.radius == pytest.approx(base.radius, abs=1e-9 * scale)


class TestCaptureDisc:
    def test_inflates_example(self):
        cap = capture_disc(Disc(Vec2(0, 4 / 3), 2 / 3), 0.1)
        assert cap.center == Vec2(0, 4 / 3)
        assert cap.radius == pytest.approx(23 / 30, abs=1e-15)

    def test_radius_gain_is_delta(self):
        ac = Disc(Vec2(3, -2), 1.7)
        assert capture_disc(ac, 0.42).radius - ac.radius == pytest.approx(0.42, abs=1e-15)

    def test_zero_radius_input(self):
        cap = capture_disc(Disc(Vec2(1, 1), 0.0), 0.05)
        assert cap.radius == 0.05 and cap.center == Vec2(1, 1)

    @pytest.mark.parametrize("delta", [0.0, -0.1, math.nan])
    def test_rejects_bad_delta(self, delta):
        with pytest.raises(DomainError):
            capture_disc(Disc(Vec2(0, 0), 1.0), delta)


class TestOffsets:
    def test_concentric_shrunk_disc(self):
        cap = Disc(Vec2(0, 4 / 3), 23 / 30)
        ac = Disc(Vec2(0, 4 / 3), cap.radius - 0.1)
        off = offsets(ac, cap)
        assert off.y == Vec2(0.0, 0.0)
        assert off.d_min == pytest.approx(0.1, abs=1e-15)
        assert off.d_max == pytest.approx(0.1, abs=1e-15)
        assert off.V == pytest.approx(0.01, abs=1e-15)

    def test_point_disc_at_center(self):
        cap = Disc(Vec2(2, 2), 0.8)
        off = offsets(Disc(Vec2(2, 2), 0.0), cap)
        assert off.d_min == off.d_max == pytest.approx(0.8)
        assert off.V == pytest.approx(0.64)

    def test_boundary_touch(self):
        cap = Disc(Vec2(0, 0), 0.5)
        off = offsets(Disc(Vec2(0.5, 0), 0.0), cap)
        assert off.d_min == pytest.approx(0.0, abs=1e-15)
        assert off.V == pytest.approx(0.0, abs=1e-15)

    def test_escaped_disc_is_representable(self):
        off = offsets(Disc(Vec2(5, 0), 1.0), Disc(Vec2(0, 0), 1.0))
        assert off.d_min < 0 and off.V < 0

    @settings(max_examples=200, deadline=None)
    @given(cx=finite, cy=finite, r1=st.floats(min_value=0, max_value=10),
           dx=finite, dy=finite, r2=st.floats(min_value=0, max_value=10))
    def test_product_identity(self, cx, cy, r1, dx, dy, r2):
        ac, cap = Disc(Vec2(dx, dy), r2), Disc(Vec2(cx, cy), r1)
        off = offsets(ac, cap)
        direct = (cap.radius - ac.radius) ** 2 - off.y.norm_sq()
        scale = max(1.0, abs(direct), abs(off.V))
        assert abs(off.V - direct) <= 1e-12 * scale


class TestEnvelope:
    def test_t0_is_v0(self):
        assert lyapunov_envelope(0.04, 0.3, 1.0, 0.0) == 0.04

    def test_plugin_value(self):
        # 0.01 * exp(0.5 / (1.5 * 23/30)) = 0.01 * exp(0.434783)
        assert lyapunov_envelope(0.01, 0.5, 23 / 30, 1.0) == pytest.approx(0.0154463, abs=1e-6)

    def test_reaches_cap_radius_squared_at_bound(self):
        nu, R_C, delta = 0.5, 23 / 30, 0.1
        t_star = capture_time_bound(nu, R_C, delta)
        assert t_star == pytest.approx(2 * (1 + 1 / nu) * R_C * math.log(R_C / delta), rel=1e-14)
        assert lyapunov_envelope(delta ** 2, nu, R_C, t_star) == pytest.approx(R_C ** 2, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            lyapunov_envelope(0.0, 0.5, 1.0, 1.0)
        with pytest.raises(DomainError):
            lyapunov_envelope(0.1, 0.5, 0.0, 1.0)
        with pytest.raises(DomainError):
            lyapunov_envelope(0.1, 0.5, 1.0, -1.0)

    def test_capture_margin_example(self):
        # R_C = 1, delta = 0.1 -> 1 - sqrt(0.99)
        assert capture_margin(1.0, 0.1) == pytest.approx(0.005013, abs=1e-6)
        assert capture_margin(1.0, 0.1) < 0.1
