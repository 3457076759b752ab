import numpy as np
import pytest

from hannay_kit import (
    GaugeOffset,
    OscillatorSpec,
    PeriodicFunction,
    build_frame,
    forcing_independence_check,
    gauge_shift_check,
    hannay_all_routes,
    hannay_closed_form,
    hannay_from_definition,
    hannay_loop_integral,
)
from conftest import SKEWED_PAIR_INIT, mathieu_spec, sho_spec

TAU = 2.0 * np.pi


def skewed_rho_oracle(n=2_000_001):
    """High-resolution trapezoid of -int_0^pi (drho/dt)^2 dt for the skewed
    pair rho^2 = 2 cos^2 t + sin^2 t / 2 (M = 1, a = 0, Omega = 1)."""
    ts = np.linspace(0.0, np.pi, n)
    rho_sq = 2 * np.cos(ts) ** 2 + 0.5 * np.sin(ts) ** 2
    rho_dot = -0.75 * np.sin(2 * ts) / np.sqrt(rho_sq)
    return -np.trapezoid(rho_dot ** 2, ts)


class TestClosedForm:
    def test_sho_vanishes(self, sho_frame):
        assert abs(hannay_closed_form(sho_frame)) < 1e-10

    def test_constant_cross_term_still_vanishes(self):
        # rho stays 1 (a does not enter the homogeneous equation), and both
        # integrand terms carry drho/dt.
        spec = OscillatorSpec.build(tau=TAU, a=0.25)
        frame = build_frame(spec)
        assert abs(hannay_closed_form(frame)) < 1e-10

    def test_skewed_pair_against_trapezoid_oracle(self, skewed_frame):
        q_h = hannay_closed_form(skewed_frame)
        oracle = skewed_rho_oracle()
        assert q_h < 0
        assert q_h == pytest.approx(oracle, abs=1e-8)
        # the closed form for this rho is -pi/4
        assert q_h == pytest.approx(-np.pi / 4, abs=1e-9)


class TestDefinitionRoute:
    def test_sho_vanishes(self, sho_frame):
        assert abs(hannay_from_definition(sho_frame)) < 1e-9

    def test_matches_closed_form(self, mathieu_frame, full_frame):
        for frame in (mathieu_frame, full_frame):
            assert abs(hannay_from_definition(frame)
                       - hannay_closed_form(frame)) < 1e-7

    def test_start_time_shift_invariance(self):
        spec = mathieu_spec()
        q0 = hannay_closed_form(build_frame(spec, t0=0.0))
        q1 = hannay_closed_form(build_frame(spec, t0=spec.tau / 2))
        assert abs(q0 - q1) < 1e-8


class TestLoopIntegral:
    def test_sho_vanishes(self, sho_frame):
        assert abs(hannay_loop_integral(sho_frame)) < 1e-9

    def test_matches_closed_form_on_full_spec(self, full_frame):
        assert abs(hannay_loop_integral(full_frame)
                   - hannay_closed_form(full_frame)) < 1e-6

    def test_result_is_action_independent(self, full_frame):
        a = hannay_loop_integral(full_frame, i_values=(0.5,))
        b = hannay_loop_integral(full_frame, i_values=(2.0,))
        assert abs(a - b) < 1e-8

    def test_half_branch_average_without_linear_terms(self, skewed_frame):
        """With x_p = p_p = 0 the loop integrand averaged over half the
        angle range gives the same result as the full average."""
        from hannay_kit.hannay import _loop_double_integral
        from hannay_kit.numerics import integrate_periodic

        frame = skewed_frame
        i_val, h = 1.0, 1e-4
        spec, pair = frame.spec, frame.pair
        omega = frame.Omega

        def half_integral(i_v):
            q = np.pi * (np.arange(64) + 0.5) / 64
            amp = np.sqrt(2 * i_v / omega)

            def integrand(ts):
                rho = pair.rho(ts)
                rho_dot = pair.rho_dot(ts)
                m = spec.M(ts)
                a = spec.a(ts)
                cos_psi = np.cos(q[:, None])
                sin_psi = np.sin(q[:, None])
                p = (amp * (m * rho_dot / rho + 2 * m * a) * rho * cos_psi
                     - np.sqrt(2 * omega * i_v) / rho * sin_psi)
                dx_dt = amp * rho_dot * cos_psi
                return 2 * np.pi * np.mean(p * dx_dt, axis=0)

            return integrate_periodic(integrand, frame.t0, frame.tau_prime)

        full = -(_loop_double_integral(frame, i_val + h, None, 64)
                 - _loop_double_integral(frame, i_val - h, None, 64)) \
            / (2 * h) / (2 * np.pi)
        half = -(half_integral(i_val + h) - half_integral(i_val - h)) \
            / (2 * h) / (2 * np.pi)
        assert abs(full - half) < 1e-6


class TestThreeWayAgreement:
    def test_all_frames(self, certified_frames):
        for name, frame in certified_frames.items():
            routes = hannay_all_routes(frame)
            assert routes.spread < 1e-6, (name, routes)


class TestGauge:
    def test_constant_offset(self, mathieu_frame):
        gauge = GaugeOffset(periodic=PeriodicFunction.const(
            0.4, mathieu_frame.tau_prime))
        gauged, plain = gauge_shift_check(mathieu_frame, gauge)
        assert abs(gauged - plain) < 1e-8

    def test_periodic_gauge_leaves_angle_unchanged(self, full_frame):
        gauge = GaugeOffset(periodic=PeriodicFunction(
            full_frame.tau_prime, 0.0, ((1, 0.0, 0.3),)))
        assert gauge.periodicity_defect(full_frame.tau_prime) < 1e-10
        gauged, plain = gauge_shift_check(full_frame, gauge)
        assert abs(gauged - plain) < 1e-8

    def test_linear_gauge_shifts_by_its_increment(self, mathieu_frame):
        slope = 0.1 / mathieu_frame.tau_prime
        gauge = GaugeOffset(linear_slope=slope)
        assert not gauge.is_periodic
        gauged, plain = gauge_shift_check(mathieu_frame, gauge)
        assert gauged - plain == pytest.approx(0.1, abs=1e-10)


class TestForcingIndependence:
    def test_drive_change(self, full_frame):
        base = full_frame.spec
        other = OscillatorSpec.build(
            tau=base.tau, M=base.M, w_sq=base.w_sq, a=base.a,
            b=base.b, f=base.f,
            F=PeriodicFunction(base.tau, 0.0, ((3, 0.15, 0.0),)))
        report = forcing_independence_check([full_frame, build_frame(other)])
        assert report.max_difference < 1e-8

    def test_momentum_shift_change(self, mathieu_frame):
        base = mathieu_frame.spec
        other = OscillatorSpec.build(
            tau=base.tau, M=base.M, w_sq=base.w_sq, a=base.a,
            b=PeriodicFunction(base.tau, 0.0, ((1, 0.0, 0.5),)))
        report = forcing_independence_check([mathieu_frame,
                                             build_frame(other)])
        assert report.max_difference < 1e-8

    def test_pure_time_term_changes_nothing(self, mathieu_frame):
        base = mathieu_frame.spec
        other = OscillatorSpec.build(
            tau=base.tau, M=base.M, w_sq=base.w_sq, a=base.a, f=0.4)
        frame2 = build_frame(other)
        r1 = hannay_all_routes(mathieu_frame)
        r2 = hannay_all_routes(frame2)
        # f never enters any route's integrand
        assert r1.closed_form == r2.closed_form
        assert r1.loop_integral == r2.loop_integral
        assert r1.from_definition == pytest.approx(r2.from_definition,
                                                   abs=1e-14)

    def test_mismatched_homogeneous_part_rejected(self, sho_frame,
                                                  mathieu_frame):
        with pytest.raises(ValueError):
            forcing_independence_check([sho_frame, mathieu_frame])


class TestChoiceDependence:
    def test_rotation_of_pair_leaves_angle_unchanged(self):
        spec = mathieu_spec()
        frame = build_frame(spec)
        theta = 0.61
        c, s = np.cos(theta), np.sin(theta)
        pair = frame.pair
        u, yu, v, yv = pair.states(0.0)
        m0 = spec.M(0.0)
        rotated = build_frame(spec, pair_init=(
            (c * u - s * v, (c * yu - s * yv) / m0),
            (s * u + c * v, (s * yu + c * yv) / m0)))
        assert abs(hannay_closed_form(rotated)
                   - hannay_closed_form(frame)) < 1e-10

    def test_skewed_choice_is_deterministic(self):
        spec = sho_spec(tau=np.pi)
        q1 = hannay_closed_form(build_frame(spec, pair_init=SKEWED_PAIR_INIT))
        q2 = hannay_closed_form(build_frame(spec, pair_init=SKEWED_PAIR_INIT))
        assert q1 == pytest.approx(q2, abs=1e-10)
        canonical = hannay_closed_form(build_frame(spec))
        assert abs(canonical) < 1e-10
        assert abs(q1 - canonical) > 0.5
