"""Exact action-angle structure: the invariant I, the angle Q, momentum
branches, the type-2 generating function and its time derivative, and the
phase-space area law.

With xi = x - x_p and A = M drho/dt + 2 M a rho, the invariant is

    I = (1/2 Omega) [ (Omega/rho)^2 xi^2 + (A xi / rho ... ) ]
      = (1/2 Omega) [ (Omega^2/rho^2) xi^2 + ((M drho/dt + 2 M a rho) xi
                                              - rho (p - p_p))^2 ]

and the ellipse parameterization

    cos Q = sqrt(Omega/2I) xi / rho,
    sin Q = [(M drho/dt + 2 M a rho) xi - rho (p - p_p)] / sqrt(2 Omega I),

so that Q advances at rate Omega / (M rho^2) along the Hamiltonian flow and
the transformed Hamiltonian is Omega I / (M rho^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import ermakov_residual
from .errors import DomainError
from .floquet import (
    DEFAULT_PERIOD_CAP,
    canonical_pair,
    common_period,
    explicit_pair,
    monodromy,
    periodic_particular,
)
from .numerics import DEFAULT_ODE_TOL, integrate_ode

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ActionAngleFrame:
    """Bundle of a certified pair, periodic particular solution and the
    scalar antiderivatives needed by the generating function and the phases:
    delta (with d delta/dt = M w^2 x_p^2 / 2 - M (dx_p/dt)^2 / 2), the running
    integral of f, and the angle-advance phase theta with
    d theta/dt = Omega / (M rho^2), all zero at t0."""

    spec: object
    pair: object
    xp: object
    mono: object
    t0: float
    tau_prime: float
    aux: object          # Trajectory of (delta, int f, theta) on [t0, t0+tau']
    aux_increment: np.ndarray
    ode_tol: float

    # -- scalar antiderivatives with linear periodic extension ---------------

    def _aux_eval(self, t):
        t_in = np.asarray(t, dtype=float)
        t = np.atleast_1d(t_in)
        rel = (t - self.t0) / self.tau_prime
        k = np.floor(rel + 1e-12)
        t_base = np.clip(t - k * self.tau_prime, self.t0,
                         self.t0 + self.tau_prime)
        out = self.aux(t_base) + k[None, :] * self.aux_increment[:, None]
        return out[:, 0] if t_in.ndim == 0 else out

    def delta(self, t):
        return self._aux_eval(t)[0]

    def f_integral(self, t):
        return self._aux_eval(t)[1]

    def theta(self, t):
        """Continuous phase of u + iv, theta(t0) = atan2(v, u)(t0)."""
        u, _, v, _ = self.pair.states(self.t0)
        return np.arctan2(v, u) + self._aux_eval(t)[2]

    @property
    def Omega(self):
        return self.pair.Omega

    @property
    def quad_panels(self):
        """Initial quadrature panels over tau': at least 32 per tau."""
        return 32 * max(1, round(self.tau_prime / self.spec.tau))

    @property
    def sigma(self):
        """Angle advance of the pair over one tau (the Floquet winding)."""
        return float(self._aux_eval(self.t0 + self.spec.tau)[2])

    def diagnostics(self):
        pair, spec = self.pair, self.spec
        return {
            "wronskian_deviation": pair.omega_deviation / abs(pair.Omega),
            "ermakov_residual": ermakov_residual(spec, pair),
            "particular_residual": self.xp.residual(),
            "rho_periodicity": pair.rho_periodicity_defect(),
            "xp_periodicity": self.xp.periodicity_defect(),
            "monodromy_det_residual": self.mono.det_residual,
            "transformed_hamiltonian_identity":
                transformed_hamiltonian_residual(self),
        }


def build_frame(spec, t0=0.0, ode_tol=DEFAULT_ODE_TOL, pair=None,
                pair_init=None, period_cap=DEFAULT_PERIOD_CAP):
    """Construct the full frame: classify, build (u, v) and x_p, certify the
    common period tau', and integrate the scalar antiderivatives.

    ``pair_init`` selects an explicit pair as ((u0, du0/dt), (v0, dv0/dt));
    by default the canonical Floquet pair is used.  Refusals (hyperbolic
    monodromy, resonant forcing, no common period) propagate as typed errors.
    """
    mono = monodromy(spec, t0, spec.tau, tol=ode_tol)
    if pair is None:
        if pair_init is not None:
            u0, v0 = pair_init
            pair = explicit_pair(spec, u0, v0, t0, tol=ode_tol)
        else:
            pair = canonical_pair(spec, mono, tol=ode_tol)
    xp = periodic_particular(spec, t0=t0, tol=ode_tol)
    tau_prime = common_period(spec, pair, xp, cap=period_cap)

    def aux_rhs(t, _s):
        m = spec.M(t)
        xpd = xp.xp_dot(t)
        delta_dot = 0.5 * m * (spec.w_sq(t) * xp.x_p(t) ** 2 - xpd * xpd)
        theta_dot = pair.Omega / (m * pair.rho(t) ** 2)
        return np.array([delta_dot, spec.f(t), theta_dot])

    aux = integrate_ode(aux_rhs, [0.0, 0.0, 0.0], t0, t0 + tau_prime,
                        tol=ode_tol)
    increment = aux.values[-1] - aux.values[0]
    return ActionAngleFrame(spec=spec, pair=pair, xp=xp, mono=mono,
                            t0=float(t0), tau_prime=float(tau_prime),
                            aux=aux, aux_increment=increment,
                            ode_tol=ode_tol)


# -- local geometry -----------------------------------------------------------


def _geometry(frame, t):
    """Common evaluations at time t."""
    spec, pair, xp = frame.spec, frame.pair, frame.xp
    m = spec.M(t)
    a = spec.a(t)
    rho = pair.rho(t)
    rho_dot = pair.rho_dot(t)
    return m, a, rho, rho_dot, xp.x_p(t), xp.p_p(t)


def action(frame, x, p, t):
    """The invariant I(x, p, t) >= 0; constant along the Hamiltonian flow."""
    m, a, rho, rho_dot, x_p, p_p = _geometry(frame, t)
    omega = frame.Omega
    xi = x - x_p
    chord = (m * rho_dot + 2.0 * m * a * rho) * xi - rho * (p - p_p)
    return ((omega / rho) ** 2 * xi ** 2 + chord ** 2) / (2.0 * omega)


def angle(frame, x, p, t):
    """Angle Q in [0, 2 pi); undefined at the ellipse center I = 0."""
    m, a, rho, rho_dot, x_p, p_p = _geometry(frame, t)
    omega = frame.Omega
    xi = x - x_p
    i_val = action(frame, x, p, t)
    if np.any(np.asarray(i_val) == 0.0):
        raise DomainError("angle undefined at ellipse center (I = 0)")
    cos_q = np.sqrt(omega / (2.0 * i_val)) * xi / rho
    sin_q = ((m * rho_dot + 2.0 * m * a * rho) * xi - rho * (p - p_p)) \
        / np.sqrt(2.0 * omega * i_val)
    return np.mod(np.arctan2(sin_q, cos_q), TWO_PI)


def inverse_map(frame, q, i_val, t, gauge_offset=0.0):
    """(x, p) of the phase-space point at angle q on the level curve I.

    ``gauge_offset`` shifts the angle origin: the parameterization is applied
    at q - gauge_offset.
    """
    m, a, rho, rho_dot, x_p, p_p = _geometry(frame, t)
    omega = frame.Omega
    psi = q - gauge_offset
    amp = np.sqrt(2.0 * i_val / omega)
    x = amp * rho * np.cos(psi) + x_p
    p = (amp * (m * rho_dot / rho + 2.0 * m * a) * rho * np.cos(psi)
         - np.sqrt(2.0 * omega * i_val) / rho * np.sin(psi) + p_p)
    return x, p


def momentum_branches(frame, x, i_val, t):
    """(p_upper, p_lower) on the two branches of the level curve at x.

    Requires x within the ellipse x-extent |x - x_p| <= rho sqrt(2 I / Omega).
    """
    m, a, rho, rho_dot, x_p, p_p = _geometry(frame, t)
    omega = frame.Omega
    xi = x - x_p
    radicand = 2.0 * omega * i_val - (omega / rho) ** 2 * xi ** 2
    if np.any(radicand < -1e-12 * max(2.0 * omega * np.max(np.atleast_1d(i_val)), 1e-300)):
        raise DomainError("x outside the ellipse extent", x=x, I=i_val)
    root = np.sqrt(np.clip(radicand, 0.0, None))
    line = p_p + (m * rho_dot / rho + 2.0 * m * a) * xi
    return line + root / rho, line - root / rho


_BRANCH_SIGNS = {"upper": 1.0, "lower": -1.0}


def generating_function(frame, x, i_val, t, branch="upper"):
    """Type-2 generating function F2(x, I, t) on the chosen branch.

    Evaluated as the branch-wise antiderivative of the branch momentum, so
    dF2/dx reproduces momentum_branches at every interior point and dF2/dI
    reproduces the angle modulo 2 pi.  The additive constant is fixed by
    delta(t0) = 0 and the f-integral starting at t0.
    """
    sign = _BRANCH_SIGNS[branch]
    spec = frame.spec
    m, a, rho, rho_dot, x_p, p_p = _geometry(frame, t)
    omega = frame.Omega
    xi = x - x_p
    extent_sq = 2.0 * i_val * rho ** 2 / omega
    if np.any(xi ** 2 >= extent_sq):
        raise DomainError("x must be strictly inside the branch domain",
                          x=x, I=i_val)
    xp_dot = frame.xp.xp_dot(t)
    head = (frame.delta(t) + frame.f_integral(t)
            + m * a * x_p ** 2 + spec.b(t) * x_p + m * xp_dot * x_p)
    s_root = np.sqrt(2.0 * omega * i_val - (omega / rho) ** 2 * xi ** 2)
    cos_q = np.sqrt(omega / (2.0 * i_val)) * xi / rho
    arc = xi * s_root / (2.0 * rho) \
        + i_val * (np.arcsin(np.clip(cos_q, -1.0, 1.0)) - 0.5 * np.pi)
    return (head + p_p * xi
            + (m * rho_dot / (2.0 * rho) + m * a) * xi ** 2
            + sign * arc)


def dF2_dt_at_angle(frame, q, i_val, t):
    """dF2/dt at fixed x, expressed in (Q, I, t); single-valued in Q.

    The cos^2 coefficient carries rho^2 on the d(Ma)/dt term:
        (I/Omega) [-M rdot^2 + Omega^2/(M rho^2) - M w^2 rho^2
                   + 2 rho^2 d(Ma)/dt]
    which is the reading validated by the transformed-Hamiltonian identity
    H + dF2/dt = Omega I / (M rho^2).
    """
    spec = frame.spec
    m, a, rho, rho_dot, x_p, p_p = _geometry(frame, t)
    omega = frame.Omega
    xp_dot = frame.xp.xp_dot(t)
    pp_dot = frame.xp.pp_dot(t)
    ma_dot = spec.M.derivative(t) * a + m * spec.a.derivative(t)
    w2 = spec.w_sq(t)
    cos_q, sin_q = np.cos(q), np.sin(q)

    bracket = (-m * rho_dot ** 2 + omega ** 2 / (m * rho ** 2)
               - m * w2 * rho ** 2 + 2.0 * rho ** 2 * ma_dot)
    delta_dot = 0.5 * m * (w2 * x_p ** 2 - xp_dot ** 2)
    d_ma_xp2 = ma_dot * x_p ** 2 + 2.0 * m * a * x_p * xp_dot
    return ((i_val / omega) * bracket * cos_q ** 2
            + 2.0 * i_val * (rho_dot / rho) * cos_q * sin_q
            + xp_dot * np.sqrt(2.0 * i_val * omega) / rho * sin_q
            + (pp_dot * rho - xp_dot * (m * rho_dot + 2.0 * m * a * rho))
            * np.sqrt(2.0 * i_val / omega) * cos_q
            + x_p * pp_dot + delta_dot + spec.f(t) - d_ma_xp2)


def ellipse_area(frame, i_val, t, n=512):
    """Loop integral of p dx around the level curve of I at fixed t.

    The integrand is a trigonometric polynomial in Q, so the uniform
    trapezoid rule is exact up to roundoff; the result is 2 pi I.
    """
    if i_val == 0.0:
        return 0.0
    q = TWO_PI * np.arange(n) / n
    _, p = inverse_map(frame, q, i_val, t)
    rho = frame.pair.rho(t)
    dx_dq = -np.sqrt(2.0 * i_val / frame.Omega) * rho * np.sin(q)
    return float(np.sum(p * dx_dq) * TWO_PI / n)


def transformed_hamiltonian_residual(frame, n_q=16, n_t=16, i_values=(0.5, 2.0)):
    """max | H(x(Q,I,t), p(Q,I,t), t) + dF2/dt - Omega I / (M rho^2) |.

    Always-on guard for the closed form of dF2/dt.
    """
    from .model import hamiltonian

    qs = TWO_PI * (np.arange(n_q) + 0.3) / n_q
    ts = frame.t0 + frame.tau_prime * (np.arange(n_t) + 0.5) / n_t
    worst = 0.0
    for i_val in i_values:
        for t in ts:
            x, p = inverse_map(frame, qs, i_val, t)
            h = hamiltonian(frame.spec, x, p, t)
            hbar_exact = frame.Omega * i_val / (frame.spec.M(t)
                                                * frame.pair.rho(t) ** 2)
            res = h + dF2_dt_at_angle(frame, qs, i_val, t) - hbar_exact
            worst = max(worst, float(np.max(np.abs(res))))
    return worst
