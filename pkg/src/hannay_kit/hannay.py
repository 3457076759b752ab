"""Hannay's angle by three independent routes, plus gauge-freedom and
forcing-independence checks.

Route 1 (closed form):      Q_H = -(1/Omega) int_0^tau' M (rdot^2 + 2 a rho rdot) dt
Route 2 (definition):       angle-averaged I-derivative of dF2/dt, integrated
                            over tau'; after angle-averaging the integrand is
                            affine in I, so a two-point difference is exact.
Route 3 (loop integral):    -(1/2pi) d/dI of the double integral of
                            p dx/dt over the angle and one tau', with the
                            I-derivative by central differences.

A gauge offset Q_c(t) moves the line from which the angle is measured.  A
tau'-periodic Q_c leaves Q_H unchanged; a non-periodic Q_c shifts it by
Q_c(t0 + tau') - Q_c(t0), which is the documented failure mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConsistencyError
from .action_angle import dF2_dt_at_angle
from .model import PeriodicFunction
from .numerics import integrate_periodic

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GaugeOffset:
    """Dimensionless angle-origin offset Q_c(t).

    ``periodic`` is a Fourier gauge; ``linear_slope`` adds a deliberately
    non-periodic ramp slope * t for the diagnostic mode.  A meaningful gauge
    must be tau'-periodic, i.e. linear_slope == 0 and the Fourier period
    dividing tau'.
    """

    periodic: Optional[PeriodicFunction] = None
    linear_slope: float = 0.0

    @property
    def is_periodic(self):
        return self.linear_slope == 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.linear_slope * t
        if self.periodic is not None:
            out = out + self.periodic(t)
        return out if out.shape else float(out)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.linear_slope)
        if self.periodic is not None:
            out = out + self.periodic.derivative(t)
        return out if out.shape else float(out)

    def periodicity_defect(self, tau_prime, n_samples=256):
        ts = tau_prime * np.arange(n_samples) / n_samples
        return float(np.max(np.abs(self(ts + tau_prime) - self(ts))))


def hannay_closed_form(frame):
    """Q_H = -(1/Omega) int_0^tau' (M rdot^2 + 2 M a rho rdot) dt."""
    spec, pair = frame.spec, frame.pair

    def integrand(ts):
        rho = pair.rho(ts)
        rho_dot = pair.rho_dot(ts)
        return spec.M(ts) * (rho_dot ** 2 + 2.0 * spec.a(ts) * rho * rho_dot)

    return -integrate_periodic(integrand, frame.t0, frame.tau_prime,
                               initial_panels=frame.quad_panels) \
        / frame.Omega


def hannay_from_definition(frame, n_angle=32, i_values=(0.5, 1.5)):
    """Angle-averaged I-derivative of dF2/dt integrated over tau'.

    The angle average kills the sqrt(I) harmonics and the constants cancel in
    the difference, so the two-point difference in I is the exact derivative
    of the remaining linear term.
    """
    q = TWO_PI * (np.arange(n_angle) + 0.5) / n_angle
    i_lo, i_hi = i_values

    def integrand(ts):
        ts = np.asarray(ts, dtype=float)
        hi = dF2_dt_at_angle(frame, q[:, None], i_hi, ts)
        lo = dF2_dt_at_angle(frame, q[:, None], i_lo, ts)
        return np.mean(hi - lo, axis=0) / (i_hi - i_lo)

    return integrate_periodic(integrand, frame.t0, frame.tau_prime,
                              initial_panels=frame.quad_panels)


def _loop_double_integral(frame, i_val, gauge, n_angle):
    """int_0^tau' closed-loop-integral of p * dx/dt (at fixed angle, I) dt."""
    spec, pair, xp = frame.spec, frame.pair, frame.xp
    omega = frame.Omega
    q = TWO_PI * (np.arange(n_angle) + 0.5) / n_angle
    amp = np.sqrt(2.0 * i_val / omega)

    def integrand(ts):
        ts = np.asarray(ts, dtype=float)
        m = spec.M(ts)
        a = spec.a(ts)
        rho = pair.rho(ts)
        rho_dot = pair.rho_dot(ts)
        p_p = xp.p_p(ts)
        xp_dot = xp.xp_dot(ts)
        if gauge is None:
            qc = np.zeros(ts.shape)
            qc_dot = np.zeros(ts.shape)
        else:
            qc = gauge(ts)
            qc_dot = gauge.derivative(ts)
        psi = q[:, None] - qc[None, :]
        cos_psi, sin_psi = np.cos(psi), np.sin(psi)
        p = (amp * (m * rho_dot / rho + 2.0 * m * a) * rho * cos_psi
             - np.sqrt(2.0 * omega * i_val) / rho * sin_psi + p_p)
        dx_dt = amp * (rho_dot * cos_psi + rho * sin_psi * qc_dot) + xp_dot
        return TWO_PI * np.mean(p * dx_dt, axis=0)

    return integrate_periodic(integrand, frame.t0, frame.tau_prime,
                              initial_panels=frame.quad_panels)


def hannay_loop_integral(frame, i_values=(0.5, 2.0), n_angle=64, gauge=None,
                         independence_tol=1e-8):
    """Q_H = -(1/2pi) d/dI of the angle-time double integral of p dx/dt.

    The outer derivative uses central differences with step
    max(1e-4, 1e-4 I); the result must not depend on I, which is asserted
    across ``i_values``.
    """
    results = []
    for i_val in i_values:
        h = max(1e-4, 1e-4 * i_val)
        g_hi = _loop_double_integral(frame, i_val + h, gauge, n_angle)
        g_lo = _loop_double_integral(frame, i_val - h, gauge, n_angle)
        results.append(-(g_hi - g_lo) / (2.0 * h) / TWO_PI)
    spread = max(results) - min(results)
    if spread > independence_tol * max(1.0, abs(results[0])):
        raise ConsistencyError(
            "loop-integral Hannay angle depends on I", values=results)
    return results[0]


def gauge_shift_check(frame, gauge, n_angle=64):
    """(Q_H with gauge, Q_H without), both via the loop-integral route.

    For a tau'-periodic gauge the two agree; for a non-periodic gauge the
    difference equals Q_c(t0 + tau') - Q_c(t0).
    """
    gauged = hannay_loop_integral(frame, gauge=gauge, n_angle=n_angle)
    plain = hannay_loop_integral(frame, gauge=None, n_angle=n_angle)
    return gauged, plain


class HannayResult(NamedTuple):
    closed_form: float
    from_definition: float
    loop_integral: float

    @property
    def spread(self):
        return max(self) - min(self)


def hannay_all_routes(frame):
    return HannayResult(
        closed_form=hannay_closed_form(frame),
        from_definition=hannay_from_definition(frame),
        loop_integral=hannay_loop_integral(frame),
    )


@dataclass(frozen=True)
class ForcingIndependenceReport:
    values: tuple
    max_difference: float
    tol: float


def forcing_independence_check(frames, tol=1e-8):
    """Assert Q_H is identical across frames sharing (M, w^2, a) but
    differing in (b, F, f).  Uses the loop-integral route, where the
    cancellation of the x_p, p_p terms is non-trivial."""
    base = frames[0].spec
    for fr in frames[1:]:
        s = fr.spec
        if s.M != base.M or s.w_sq != base.w_sq or s.a != base.a \
                or s.tau != base.tau:
            raise ValueError(
                "frames must share (M, w_sq, a) and tau for this check")
    values = tuple(hannay_loop_integral(fr) for fr in frames)
    diff = max(values) - min(values)
    if diff > tol * max(1.0, max(abs(v) for v in values)):
        raise ConsistencyError(
            "Hannay angle changed under a forcing change", values=values,
            max_difference=diff)
    return ForcingIndependenceReport(values=values, max_difference=diff,
                                     tol=tol)
