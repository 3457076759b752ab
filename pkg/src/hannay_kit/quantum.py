"""Wave functions of the invariant's eigenstate ladder, total and geometric
phases, energy expectation, and the exact angle-phase relation.

The m-th wave function carries the half-integer winding factor
[(u - iv)/rho]^(m + 1/2) = exp(-i (m + 1/2) theta(t)) with the continuous
phase theta of u + iv, tracked exactly through d theta/dt = Omega/(M rho^2)
rather than by per-point principal branches.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConsistencyError
from .hannay import hannay_closed_form
from .model import derived_c, derived_d
from .numerics import HERMITE_MAX_ORDER, hermite, integrate_periodic


def _coeffs(frame, t):
    spec, pair, xp = frame.spec, frame.pair, frame.xp
    return {
        "m": spec.M(t), "a": spec.a(t), "b": spec.b(t),
        "rho": pair.rho(t), "rho_dot": pair.rho_dot(t),
        "x_p": xp.x_p(t), "xp_dot": xp.xp_dot(t),
    }


def _norm_const(frame, m, rho):
    hbar = frame.spec.hbar
    return (frame.Omega / (np.pi * hbar)) ** 0.25 \
        / math.sqrt(2.0 ** m * math.factorial(m)) / np.sqrt(rho)


def wavefunction(frame, m, x, t):
    """psi_m(x, t): complex amplitude of the m-th quasi-periodic state.

    Square-integrable because Omega > 0; m is capped with the Hermite
    recurrence at 60.
    """
    if m > HERMITE_MAX_ORDER:
        raise ValueError(f"m must be <= {HERMITE_MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    hbar = frame.spec.hbar
    c = _coeffs(frame, t)
    xi = x - c["x_p"]
    zeta = np.sqrt(frame.Omega / hbar) * xi / c["rho"]
    winding = np.exp(-1j * (m + 0.5) * frame.theta(t))
    phase_t = np.exp(1j / hbar * (frame.delta(t) + frame.f_integral(t)))
    phase_x = np.exp(1j / hbar * (c["m"] * c["a"] * x * x
                                  + (c["m"] * c["xp_dot"] + c["b"]) * x))
    gauss = np.exp(xi * xi / (2.0 * hbar)
                   * (-frame.Omega / c["rho"] ** 2
                      + 1j * c["m"] * c["rho_dot"] / c["rho"]))
    return _norm_const(frame, m, c["rho"]) * winding * phase_t * phase_x \
        * gauss * hermite(m, zeta)


def _psi_with_derivatives(frame, m, x, t):
    """(psi, dpsi/dx, d2psi/dx2) with analytic x-derivatives."""
    x = np.asarray(x, dtype=float)
    hbar = frame.spec.hbar
    c = _coeffs(frame, t)
    xi = x - c["x_p"]
    zeta = np.sqrt(frame.Omega / hbar) * xi / c["rho"]
    zeta_x = np.sqrt(frame.Omega / hbar) / c["rho"]
    gamma = -frame.Omega / c["rho"] ** 2 + 1j * c["m"] * c["rho_dot"] / c["rho"]
    # log-derivative of the x-dependent exponentials
    g1 = 1j / hbar * (2.0 * c["m"] * c["a"] * x
                      + c["m"] * c["xp_dot"] + c["b"]) + xi / hbar * gamma
    g2 = 2j / hbar * c["m"] * c["a"] + gamma / hbar

    winding = np.exp(-1j * (m + 0.5) * frame.theta(t))
    phase_t = np.exp(1j / hbar * (frame.delta(t) + frame.f_integral(t)))
    phase_x = np.exp(1j / hbar * (c["m"] * c["a"] * x * x
                                  + (c["m"] * c["xp_dot"] + c["b"]) * x))
    gauss = np.exp(xi * xi / (2.0 * hbar) * gamma)
    base = _norm_const(frame, m, c["rho"]) * winding * phase_t * phase_x * gauss

    h = hermite(m, zeta)
    h1 = 2.0 * m * hermite(m - 1, zeta) if m >= 1 else np.zeros_like(zeta)
    h2 = 4.0 * m * (m - 1) * hermite(m - 2, zeta) if m >= 2 \
        else np.zeros_like(zeta)
    psi = base * h
    dpsi = base * (g1 * h + h1 * zeta_x)
    d2psi = base * ((g2 + g1 * g1) * h + 2.0 * g1 * h1 * zeta_x
                    + h2 * zeta_x ** 2)
    return psi, dpsi, d2psi


def apply_hamiltonian(frame, m, x, t):
    """H-hat psi_m with p-hat = -i hbar d/dx and the symmetrized cross term."""
    spec = frame.spec
    hbar = spec.hbar
    x = np.asarray(x, dtype=float)
    psi, dpsi, d2psi = _psi_with_derivatives(frame, m, x, t)
    mt = spec.M(t)
    a = spec.a(t)
    b = spec.b(t)
    kinetic = -hbar ** 2 / (2.0 * mt) * d2psi
    cross = -a * (-1j * hbar) * (2.0 * x * dpsi + psi)
    drift = -(b / mt) * (-1j * hbar) * dpsi
    potential = (0.5 * mt * derived_c(spec, t) * x * x
                 + derived_d(spec, t) * x
                 + b * b / (2.0 * mt) - spec.f(t)) * psi
    return kinetic + cross + drift + potential


def wavefunction_grid(frame, m, t, n=2048, width_factor=8.0):
    """x-grid covering the Hermite envelope of psi_m to underflow."""
    hbar = frame.spec.hbar
    ts = frame.t0 + frame.tau_prime * np.arange(256) / 256
    rho_max = float(np.max(frame.pair.rho(ts)))
    half_width = width_factor * np.sqrt(hbar * rho_max ** 2 * (2 * m + 1)
                                        / frame.Omega)
    center = float(frame.xp.x_p(t))
    return np.linspace(center - half_width, center + half_width, n)


def state_norm(frame, m, t, n=2048):
    x = wavefunction_grid(frame, m, t, n=n)
    psi = wavefunction(frame, m, x, t)
    return float(np.trapezoid(np.abs(psi) ** 2, x))


def state_overlap(frame, m, mm, t, n=2048):
    x = wavefunction_grid(frame, max(m, mm), t, n=n)
    psi_m = wavefunction(frame, m, x, t)
    psi_n = wavefunction(frame, mm, x, t)
    return complex(np.trapezoid(np.conj(psi_m) * psi_n, x))


def schrodinger_residual(frame, m, t, n=2048, dt_frac=1e-4):
    """|| i hbar dpsi/dt - H-hat psi ||_2 / || H-hat psi ||_2 on a grid.

    The time derivative uses a 5-point central difference; the spatial side
    is analytic, so the residual probes the time evolution itself.
    """
    hbar = frame.spec.hbar
    x = wavefunction_grid(frame, m, t, n=n)
    h = dt_frac * frame.spec.tau
    stencil = (wavefunction(frame, m, x, t - 2 * h)
               - 8.0 * wavefunction(frame, m, x, t - h)
               + 8.0 * wavefunction(frame, m, x, t + h)
               - wavefunction(frame, m, x, t + 2 * h)) / (12.0 * h)
    lhs = 1j * hbar * stencil
    rhs = apply_hamiltonian(frame, m, x, t)
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def total_phase(frame, m):
    """Overall phase advance chi_m of psi_m over one tau'."""
    spec, pair, xp = frame.spec, frame.pair, frame.xp

    def winding_rate(ts):
        return frame.Omega / (spec.M(ts) * pair.rho(ts) ** 2)

    def action_rate(ts):
        mt = spec.M(ts)
        xpd = xp.xp_dot(ts)
        delta_dot = 0.5 * mt * (spec.w_sq(ts) * xp.x_p(ts) ** 2 - xpd * xpd)
        return delta_dot + spec.f(ts)

    t0, tp = frame.t0, frame.tau_prime
    panels = frame.quad_panels
    return -(m + 0.5) * integrate_periodic(winding_rate, t0, tp,
                                           initial_panels=panels) \
        + integrate_periodic(action_rate, t0, tp,
                             initial_panels=panels) / spec.hbar


def energy_expectation(frame, m, t):
    """<H> for psi_m; closed form with the w^2 factor restored on the
    M rho^2 / (2 Omega) bracket term (the reading validated by the grid
    quadrature oracle)."""
    spec = frame.spec
    c = _coeffs(frame, t)
    omega = frame.Omega
    mt, rho, rho_dot = c["m"], c["rho"], c["rho_dot"]
    w2 = spec.w_sq(t)
    ma_dot = spec.M.derivative(t) * c["a"] + mt * spec.a.derivative(t)
    ladder = spec.hbar * (m + 0.5) * (
        omega / (2.0 * mt * rho ** 2)
        + mt * rho_dot ** 2 / (2.0 * omega)
        + mt * w2 * rho ** 2 / (2.0 * omega)
        - rho ** 2 / omega * ma_dot)
    x_p, xp_dot = c["x_p"], c["xp_dot"]
    tail = (0.5 * mt * xp_dot ** 2 + 0.5 * mt * w2 * x_p ** 2
            - spec.F(t) * x_p - ma_dot * x_p ** 2
            - spec.b.derivative(t) * x_p - spec.f(t))
    return ladder + tail


def energy_expectation_grid(frame, m, t, n=2048):
    """Grid-quadrature oracle for <H>: int conj(psi) H-hat psi dx."""
    x = wavefunction_grid(frame, m, t, n=n)
    psi = wavefunction(frame, m, x, t)
    h_psi = apply_hamiltonian(frame, m, x, t)
    return float(np.real(np.trapezoid(np.conj(psi) * h_psi, x)))


def geometric_phase(frame, m, consistency_tol=1e-6):
    """gamma_m, computed two ways and cross-checked:

    (i)  chi_m + (1/hbar) int <H> dt,
    (ii) (m + 1/2)(1/Omega) int (M rdot^2 + 2 M a rho rdot) dt
         + (1/hbar) int (M xpdot^2 + 2 M a x_p xpdot + b xpdot) dt.

    Returns (ii); raises if the two disagree beyond ``consistency_tol``.
    """
    line_i, line_ii = geometric_phase_both(frame, m)
    if abs(line_i - line_ii) > consistency_tol * max(1.0, abs(line_ii)):
        raise ConsistencyError(
            "geometric phase routes disagree", direct=line_i,
            closed_form=line_ii, m=m)
    return line_ii


def geometric_phase_both(frame, m):
    spec, pair, xp = frame.spec, frame.pair, frame.xp
    t0, tp = frame.t0, frame.tau_prime

    line_i = total_phase(frame, m) + integrate_periodic(
        lambda ts: energy_expectation(frame, m, ts), t0, tp,
        initial_panels=frame.quad_panels) / spec.hbar

    def ladder_rate(ts):
        rho_dot = pair.rho_dot(ts)
        return spec.M(ts) * (rho_dot ** 2
                             + 2.0 * spec.a(ts) * pair.rho(ts) * rho_dot)

    def tail_rate(ts):
        mt = spec.M(ts)
        xpd = xp.xp_dot(ts)
        return (mt * xpd ** 2 + 2.0 * mt * spec.a(ts) * xp.x_p(ts) * xpd
                + spec.b(ts) * xpd)

    panels = frame.quad_panels
    line_ii = (m + 0.5) / frame.Omega \
        * integrate_periodic(ladder_rate, t0, tp, initial_panels=panels) \
        + integrate_periodic(tail_rate, t0, tp,
                             initial_panels=panels) / spec.hbar
    return line_i, line_ii


def verify_relation(frame, m_max, q_h=None):
    """max_m | Q_H + (gamma_{m+1} - gamma_m) | for m < m_max.

    Analytically zero; the residual measures pure numerical error.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if q_h is None:
        q_h = hannay_closed_form(frame)
    gammas = [geometric_phase(frame, m) for m in range(m_max + 1)]
    return max(abs(q_h + gammas[m + 1] - gammas[m]) for m in range(m_max))
