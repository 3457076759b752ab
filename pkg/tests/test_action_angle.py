import numpy as np
import pytest

from hannay_kit import (
    DomainError,
    OscillatorSpec,
    action,
    angle,
    build_frame,
    dF2_dt_at_angle,
    ellipse_area,
    generating_function,
    hamilton_flow,
    hamiltonian,
    inverse_map,
    momentum_branches,
    transformed_hamiltonian_residual,
)

from conftest import full_spec

TWO_PI = 2.0 * np.pi


class TestAction:
    def test_sho_values(self, sho_frame):
        assert action(sho_frame, 1.0, 0.0, 0.0) == pytest.approx(0.5, abs=1e-10)
        assert action(sho_frame, 3.0, 4.0, 0.0) == pytest.approx(12.5, abs=1e-9)

    def test_constant_along_flow(self, mathieu_frame):
        frame = mathieu_frame
        spec = frame.spec
        rng = np.random.default_rng(5)
        x0 = rng.normal(0, 1.0, size=20)
        p0 = rng.normal(0, 1.0, size=20)
        t1 = 3 * spec.tau
        flow = hamilton_flow(spec, x0, p0, 0.0, t1)
        i_start = action(frame, x0, p0, 0.0)
        end = flow(t1)
        i_end = action(frame, end[:20], end[20:], t1)
        assert np.max(np.abs(i_end - i_start) / i_start) < 1e-8


class TestAngle:
    def test_sho_axis_points(self, sho_frame):
        assert angle(sho_frame, 1.0, 0.0, 0.0) == pytest.approx(0.0, abs=1e-9)
        assert angle(sho_frame, 0.0, 1.0, 0.0) == pytest.approx(
            3 * np.pi / 2, abs=1e-9)

    def test_center_is_undefined(self, full_frame):
        t = 0.7
        x_c = float(full_frame.xp.x_p(t))
        p_c = float(full_frame.xp.p_p(t))
        with pytest.raises(DomainError):
            angle(full_frame, x_c, p_c, t)

    def test_roundtrip_through_inverse_map(self, full_frame):
        rng = np.random.default_rng(9)
        for _ in range(50):
            q0 = rng.uniform(0, TWO_PI)
            i0 = rng.uniform(0.1, 3.0)
            t = rng.uniform(0, full_frame.tau_prime)
            x, p = inverse_map(full_frame, q0, i0, t)
            assert angle(full_frame, x, p, t) == pytest.approx(q0, abs=1e-10)
            assert action(full_frame, x, p, t) == pytest.approx(i0, rel=1e-10)


class TestInverseMap:
    def test_sho_angle_zero(self, sho_frame):
        x, p = inverse_map(sho_frame, 0.0, 0.5, 0.0)
        assert x == pytest.approx(1.0, abs=1e-10)
        assert p == pytest.approx(0.0, abs=1e-10)

    def test_zero_action_gives_center(self, full_frame):
        t = 1.3
        x, p = inverse_map(full_frame, 1.1, 0.0, t)
        assert x == pytest.approx(float(full_frame.xp.x_p(t)), abs=1e-12)
        assert p == pytest.approx(float(full_frame.xp.p_p(t)), abs=1e-12)


class TestMomentumBranches:
    def test_sho_values(self, sho_frame):
        up, lo = momentum_branches(sho_frame, 0.0, 0.5, 0.0)
        assert up == pytest.approx(1.0, abs=1e-10)
        assert lo == pytest.approx(-1.0, abs=1e-10)
        # turning point: both branches meet; the square root amplifies the
        # ~1e-12 frame error to ~1e-6 here
        up, lo = momentum_branches(sho_frame, 1.0, 0.5, 0.0)
        assert up == pytest.approx(0.0, abs=1e-5)
        assert lo == pytest.approx(0.0, abs=1e-5)
        assert up >= lo

    def test_branches_lie_on_level_curve(self, full_frame):
        rng = np.random.default_rng(2)
        for _ in range(25):
            t = rng.uniform(0, full_frame.tau_prime)
            i0 = rng.uniform(0.2, 2.0)
            rho = float(full_frame.pair.rho(t))
            extent = rho * np.sqrt(2 * i0 / full_frame.Omega)
            x = float(full_frame.xp.x_p(t)) + rng.uniform(-0.9, 0.9) * extent
            for p in momentum_branches(full_frame, x, i0, t):
                assert action(full_frame, x, p, t) == pytest.approx(
                    i0, rel=1e-10)

    def test_outside_extent_rejected(self, sho_frame):
        with pytest.raises(DomainError):
            momentum_branches(sho_frame, 2.0, 0.5, 0.0)


class TestGeneratingFunction:
    def test_dx_derivative_matches_momentum(self, full_frame):
        rng = np.random.default_rng(4)
        h = 1e-6
        for _ in range(20):
            t = rng.uniform(0, full_frame.tau_prime)
            i0 = rng.uniform(0.3, 2.0)
            rho = float(full_frame.pair.rho(t))
            extent = rho * np.sqrt(2 * i0 / full_frame.Omega)
            # keep clear of the square-root singularity at the turning points
            x = float(full_frame.xp.x_p(t)) + rng.uniform(-0.8, 0.8) * extent
            p_up, p_lo = momentum_branches(full_frame, x, i0, t)
            for branch, expected in (("upper", p_up), ("lower", p_lo)):
                fd = (generating_function(full_frame, x + h, i0, t, branch)
                      - generating_function(full_frame, x - h, i0, t, branch)) \
                    / (2 * h)
                assert fd == pytest.approx(expected, abs=2e-6)

    def test_dI_derivative_matches_angle(self, full_frame):
        rng = np.random.default_rng(6)
        for _ in range(20):
            t = rng.uniform(0, full_frame.tau_prime)
            i0 = rng.uniform(0.4, 2.0)
            h = 1e-6 * i0
            rho = float(full_frame.pair.rho(t))
            extent = rho * np.sqrt(2 * i0 / full_frame.Omega)
            x = float(full_frame.xp.x_p(t)) + rng.uniform(-0.8, 0.8) * extent
            p_up, p_lo = momentum_branches(full_frame, x, i0, t)
            for branch, p in (("upper", p_up), ("lower", p_lo)):
                fd = (generating_function(full_frame, x, i0 + h, t, branch)
                      - generating_function(full_frame, x, i0 - h, t, branch)) \
                    / (2 * h)
                q = angle(full_frame, x, p, t)
                assert np.mod(fd - q, TWO_PI) == pytest.approx(
                    0.0, abs=1e-6) or np.mod(fd - q, TWO_PI) == pytest.approx(
                    TWO_PI, abs=1e-6)

    def test_sho_closed_form_at_center(self, sho_frame):
        for i0 in (0.5, 1.0, 2.0):
            val = generating_function(sho_frame, 0.0, i0, 0.0, "upper")
            assert val == pytest.approx(-i0 * np.pi / 2, abs=1e-10)

    def test_outside_branch_domain_rejected(self, sho_frame):
        with pytest.raises(DomainError):
            generating_function(sho_frame, 1.0 + 1e-6, 0.5, 0.0, "upper")


class TestDF2Dt:
    def test_sho_vanishes(self, sho_frame):
        qs = np.linspace(0, TWO_PI, 17)
        vals = dF2_dt_at_angle(sho_frame, qs, 1.3, 0.8)
        np.testing.assert_allclose(vals, 0.0, atol=1e-9)

    def test_single_valued_in_angle(self, full_frame):
        q = 1.234
        v1 = dF2_dt_at_angle(full_frame, q, 0.7, 2.1)
        v2 = dF2_dt_at_angle(full_frame, q + TWO_PI, 0.7, 2.1)
        assert v1 == v2

    def test_transformed_hamiltonian_identity(self, full_frame):
        """H(x(Q,I,t), p(Q,I,t), t) + dF2/dt = Omega I / (M rho^2); this is
        the check that pins the rho^2 factor on the d(Ma)/dt term."""
        assert transformed_hamiltonian_residual(full_frame) < 1e-7

    def test_identity_random_points(self, mathieu_frame):
        rng = np.random.default_rng(8)
        frame = mathieu_frame
        for _ in range(40):
            q = rng.uniform(0, TWO_PI)
            i0 = rng.uniform(0.1, 3.0)
            t = rng.uniform(0, frame.tau_prime)
            x, p = inverse_map(frame, q, i0, t)
            h_bar = frame.Omega * i0 / (frame.spec.M(t)
                                        * frame.pair.rho(t) ** 2)
            lhs = hamiltonian(frame.spec, x, p, t) \
                + dF2_dt_at_angle(frame, q, i0, t)
            assert lhs == pytest.approx(h_bar, abs=1e-7)


class TestEllipseArea:
    def test_area_law(self, full_frame):
        for i0 in (0.5, 1.0, 2.0):
            for k in range(5):
                t = full_frame.t0 + full_frame.tau_prime * k / 5
                area = ellipse_area(full_frame, i0, t)
                assert area == pytest.approx(TWO_PI * i0, rel=1e-9)

    def test_zero_action(self, full_frame):
        assert ellipse_area(full_frame, 0.0, 0.4) == 0.0

    def test_area_time_independent(self, mathieu_frame):
        areas = [ellipse_area(mathieu_frame, 1.0, t)
                 for t in np.linspace(0, mathieu_frame.tau_prime, 7)]
        assert max(areas) - min(areas) < 1e-9


class TestAngleDynamics:
    def test_angle_rate_along_flow(self, full_frame):
        frame = full_frame
        x0, p0 = inverse_map(frame, 0.3, 1.0, 0.0)
        flow = hamilton_flow(frame.spec, x0, p0, 0.0, frame.tau_prime)
        ts = np.linspace(0, frame.tau_prime, 257)
        xs, ps = flow(ts)
        q = np.unwrap(angle(frame, xs, ps, ts))
        q_pred = q[0] + (frame.theta(ts) - frame.theta(0.0))
        assert np.max(np.abs(q - q_pred)) < 1e-7

    def test_poisson_bracket_of_invariant_and_tan_angle(self, mathieu_frame):
        """[I, tan Q] = -d(tan Q)/dQ = -sec^2 Q by central differences,
        away from the poles of the tangent."""
        frame = mathieu_frame
        rng = np.random.default_rng(12)
        h = 1e-5
        checked = 0
        while checked < 25:
            q0 = rng.uniform(0, TWO_PI)
            if min(abs(q0 - np.pi / 2), abs(q0 - 3 * np.pi / 2)) < 0.3:
                continue
            i0 = rng.uniform(0.3, 2.0)
            t = rng.uniform(0, frame.tau_prime)
            x, p = inverse_map(frame, q0, i0, t)

            def tan_q(xx, pp):
                qq = angle(frame, xx, pp, t)
                return np.tan(qq)

            di_dx = (action(frame, x + h, p, t) - action(frame, x - h, p, t)) / (2 * h)
            di_dp = (action(frame, x, p + h, t) - action(frame, x, p - h, t)) / (2 * h)
            dg_dx = (tan_q(x + h, p) - tan_q(x - h, p)) / (2 * h)
            dg_dp = (tan_q(x, p + h) - tan_q(x, p - h)) / (2 * h)
            bracket = di_dx * dg_dp - di_dp * dg_dx
            expected = -1.0 / np.cos(q0) ** 2
            assert bracket == pytest.approx(expected, rel=1e-5, abs=1e-5)
            checked += 1


class TestFrameAntiderivatives:
    def test_delta_rate_identity(self, full_frame):
        """d delta/dt = M w^2 x_p^2 / 2 - M (dx_p/dt)^2 / 2 along the span."""
        frame = full_frame
        spec = frame.spec
        ts = np.linspace(frame.t0 + 0.05, frame.t0 + frame.tau_prime - 0.05, 61)
        h = 1e-6
        fd = (frame.delta(ts + h) - frame.delta(ts - h)) / (2 * h)
        xpd = frame.xp.xp_dot(ts)
        expected = 0.5 * spec.M(ts) * (spec.w_sq(ts) * frame.xp.x_p(ts) ** 2
                                       - xpd * xpd)
        assert np.max(np.abs(fd - expected)) < 1e-8

    def test_f_integral_rate(self, full_frame):
        frame = full_frame
        ts = np.linspace(0.1, frame.tau_prime - 0.1, 31)
        h = 1e-6
        fd = (frame.f_integral(ts + h) - frame.f_integral(ts - h)) / (2 * h)
        np.testing.assert_allclose(fd, frame.spec.f(ts), atol=1e-8)


class TestEllipseGeometry:
    @staticmethod
    def _shape_matrix(frame, t):
        """Quadratic-form matrix of I around the center, from exact
        evaluations (I is exactly quadratic)."""
        x_c = float(frame.xp.x_p(t))
        p_c = float(frame.xp.p_p(t))
        i_x = action(frame, x_c + 1.0, p_c, t)
        i_p = action(frame, x_c, p_c + 1.0, t)
        i_xp = action(frame, x_c + 1.0, p_c + 1.0, t)
        q_xx = 2 * i_x
        q_pp = 2 * i_p
        q_xp = i_xp - i_x - i_p
        return np.array([[q_xx, q_xp], [q_xp, q_pp]]), (x_c, p_c)

    def test_linear_terms_move_center_not_shape(self):
        base = full_spec()
        moved = OscillatorSpec.build(
            tau=base.tau, M=base.M, w_sq=base.w_sq, a=base.a,
            b=0.3, F=0.1, f=0.7)
        f1 = build_frame(base)
        f2 = build_frame(moved)
        t = 0.9
        s1, c1 = self._shape_matrix(f1, t)
        s2, c2 = self._shape_matrix(f2, t)
        np.testing.assert_allclose(s1, s2, atol=1e-9)
        assert abs(c1[0] - c2[0]) + abs(c1[1] - c2[1]) > 1e-3

    def test_cross_term_changes_shape(self):
        base = full_spec()
        sheared = OscillatorSpec.build(
            tau=base.tau, M=base.M, w_sq=base.w_sq, a=0.0,
            b=base.b, F=base.F, f=base.f)
        s1, _ = self._shape_matrix(build_frame(base), 0.9)
        s2, _ = self._shape_matrix(build_frame(sheared), 0.9)
        assert np.max(np.abs(s1 - s2)) > 1e-3
