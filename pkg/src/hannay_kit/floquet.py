"""Floquet analysis: stability classification over one period, canonical
construction of the bounded solution pair with periodic rho, the periodic
particular solution, and the common period tau'.

The monodromy matrix propagates (x, y = M dx/dt) over [t0, t0 + T]; since the
trace of the coefficient matrix vanishes, its determinant is exactly 1 and the
return map is area-preserving.  Eigenvalues e^{+-i sigma} on the unit circle
(|trace| < 2) give bounded motion; |trace| > 2 gives exponential growth and a
refusal, because no bounded pair and hence no angle anholonomy exists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import HomogeneousPair, ParticularSolution
from .errors import (
    ConfigError,
    IntegrationError,
    NoCommonPeriodError,
    ResonantForcingError,
    UnboundedHomogeneousError,
)
from .model import forced_rhs, homogeneous_rhs
from .numerics import DEFAULT_ODE_TOL, integrate_ode

PARABOLIC_TRACE_TOL = 1e-9
DEFAULT_PERIOD_CAP = 64

ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class Monodromy:
    """One-period propagator of the homogeneous equation in (x, M dx/dt)."""

    matrix: np.ndarray
    t0: float
    T: float
    trace: float
    classification: str
    det_residual: float

    @property
    def eigenvalues(self):
        return np.linalg.eigvals(self.matrix)


def classify_trace(trace):
    if abs(abs(trace) - 2.0) <= PARABOLIC_TRACE_TOL:
        return PARABOLIC
    return ELLIPTIC if abs(trace) < 2.0 else HYPERBOLIC


def monodromy(spec, t0=0.0, T=None, tol=DEFAULT_ODE_TOL):
    """Propagator over [t0, t0 + T]; T defaults to tau and must be an integral
    multiple of tau (or of the commensurate full period)."""
    if T is None:
        T = spec.tau
    ratio = T / spec.tau
    ratio_full = T / spec.full_period
    if (abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1) and \
       (abs(ratio_full - round(ratio_full)) > 1e-9 or round(ratio_full) < 1):
        raise ConfigError(
            "monodromy span must be an integral multiple of tau "
            "(or of the commensurate full period)", T=T, tau=spec.tau)

    rhs = homogeneous_rhs(spec)
    try:
        # Stacked layout [x1, x2, y1, y2]; columns of the propagator are the
        # solutions from (1, 0) and (0, 1) in (x, M dx/dt).
        traj = integrate_ode(rhs, [1.0, 0.0, 0.0, 1.0], t0, t0 + T, tol=tol)
        x1, x2, y1, y2 = traj.values[-1]
        matrix = np.array([[x1, x2], [y1, y2]])
    except IntegrationError:
        # Exponential growth overflowed the solver: certainly hyperbolic.
        matrix = np.array([[np.inf, 0.0], [0.0, np.inf]])
        return Monodromy(matrix=matrix, t0=float(t0), T=float(T),
                         trace=np.inf, classification=HYPERBOLIC,
                         det_residual=np.nan)
    trace = float(np.trace(matrix))
    det_residual = float(abs(np.linalg.det(matrix) - 1.0))
    return Monodromy(matrix=matrix, t0=float(t0), T=float(T), trace=trace,
                     classification=classify_trace(trace),
                     det_residual=det_residual)


def _elliptic_initial_states(mono):
    """Initial (u, v) states from the complex Floquet eigenvector, normalized
    to Omega = 1 (unit-determinant real normal form) with v(t0) = 0 and
    u(t0) > 0 fixing the rotation freedom."""
    eigvals, eigvecs = np.linalg.eig(mono.matrix)
    idx = int(np.argmax(np.abs(eigvals.imag)))
    xi = eigvecs[:, idx]
    # Omega of the candidate pair (Re xi, Im xi); conjugate if negative.
    omega_raw = xi.real[0] * xi.imag[1] - xi.imag[0] * xi.real[1]
    if omega_raw < 0:
        xi = np.conj(xi)
        omega_raw = -omega_raw
    xi = xi / np.sqrt(omega_raw)
    # Rotate so that v(t0) = Im xi_x = 0 and u(t0) = Re xi_x > 0.
    xi = xi * np.exp(-1j * np.angle(xi[0]))
    return (xi.real[0], xi.real[1]), (xi.imag[0], xi.imag[1])


def canonical_pair(spec, mono, tol=DEFAULT_ODE_TOL):
    """Bounded solution pair (u, v) with tau-periodic rho and Omega = 1.

    Elliptic monodromy: real and imaginary parts of the unit-circle Floquet
    eigenvector, scaled to Omega = 1, rotation fixed by v(t0) = 0, u(t0) > 0.
    Diagonalizable parabolic monodromy (+-identity): unit initial states
    (1, 0), (0, 1) in (x, M dx/dt); any pair is periodic there.
    Hyperbolic (and non-diagonalizable parabolic) monodromy is refused.
    """
    if mono.classification == HYPERBOLIC:
        raise UnboundedHomogeneousError(
            "Hannay angle undefined: unbounded homogeneous solutions",
            trace=mono.trace)
    if mono.classification == PARABOLIC:
        sign = 1.0 if mono.trace > 0 else -1.0
        off = np.max(np.abs(mono.matrix - sign * np.eye(2)))
        if off > 1e-8 * max(1.0, np.max(np.abs(mono.matrix))):
            raise UnboundedHomogeneousError(
                "Hannay angle undefined: non-diagonalizable parabolic "
                "monodromy (linear growth)", trace=mono.trace)
        u0, v0 = (1.0, 0.0), (0.0, 1.0)
    else:
        u0, v0 = _elliptic_initial_states(mono)
    return HomogeneousPair.from_initial_states(
        spec, u0, v0, mono.t0, mono.T, tol=tol, source="canonical")


def explicit_pair(spec, u0, v0, t0=0.0, tol=DEFAULT_ODE_TOL):
    """User-supplied pair from initial data (u, du/dt) and (v, dv/dt).

    The Wronskian constant must be positive and rho must be periodic with
    period tau or 2 tau, both certified numerically.
    """
    m0 = spec.M(t0)
    pair = HomogeneousPair.from_initial_states(
        spec, (u0[0], m0 * u0[1]), (v0[0], m0 * v0[1]), t0, spec.tau,
        tol=tol, source="explicit")
    if not np.isfinite(pair.rho_period):
        raise NoCommonPeriodError(
            "rho of the explicit pair is not periodic with period tau or "
            "2 tau; Hannay angle undefined for this choice")
    return pair


def _forced_ode_period(spec):
    """Fundamental period of the forced equation's coefficient set
    (M, w^2, F) as a rational multiple of tau; None when all are constant."""
    from fractions import Fraction

    from .model import _period_ratio

    fracs = []
    for pf in (spec.M, spec.w_sq, spec.F):
        if pf.is_constant:
            continue
        ratio = _period_ratio(pf.base_period, spec.tau)
        if ratio is None:
            raise ConfigError("coefficient period is not a small rational "
                              "multiple of tau", period=pf.base_period)
        fracs.append(ratio)
    if not fracs:
        return None
    out = fracs[0]
    for frac in fracs[1:]:
        out = Fraction(int(np.lcm(out.numerator, frac.numerator)),
                       int(np.gcd(out.denominator, frac.denominator)))
    return float(out) * spec.tau


def _propagator(spec, t0, T, tol):
    rhs = homogeneous_rhs(spec)
    traj = integrate_ode(rhs, [1.0, 0.0, 0.0, 1.0], t0, t0 + T, tol=tol)
    x1, x2, y1, y2 = traj.values[-1]
    return np.array([[x1, x2], [y1, y2]])


def periodic_particular(spec, T_common=None, t0=0.0, tol=DEFAULT_ODE_TOL,
                        singular_tol=1e-8):
    """Unique T-periodic particular solution via the affine return map.

    Solves (1 - Mono_T) s0 = r_T where r_T is the forced response from rest;
    a singular map means forcing at a Floquet multiplier 1 (resonance).  By
    default T is the fundamental period of the forced equation's coefficient
    set, which keeps the map non-singular whenever a unique periodic solution
    exists (a longer span can be degenerate even for non-resonant forcing).
    """
    if spec.F.is_constant and spec.F.constant == 0.0:
        return ParticularSolution.zero(spec, t0)
    if T_common is None:
        T_common = _forced_ode_period(spec)
        if T_common is None:
            # Autonomous: the equilibrium displaced by the constant force.
            m0, w2 = spec.M.constant, spec.w_sq.constant
            if w2 <= 0:
                raise ResonantForcingError(
                    "resonant forcing: constant force on a free particle "
                    "has no periodic response")
            x_eq = spec.F.constant / (m0 * w2)
            grid = np.array([t0, t0 + spec.tau])
            values = np.array([[x_eq, 0.0], [x_eq, 0.0]])

            def interp(t):
                t = np.asarray(t, dtype=float)
                out = np.zeros((2,) + t.shape)
                out[0] = x_eq
                return out

            from .numerics import Trajectory

            traj = Trajectory(grid, values, interp, order=3)
            return ParticularSolution(spec=spec, traj=traj, t0=float(t0),
                                      period=float(spec.tau))

    try:
        matrix = _propagator(spec, t0, T_common, tol)
    except IntegrationError as exc:
        raise UnboundedHomogeneousError(
            f"unbounded homogeneous solutions: {exc}") from exc
    rhs = forced_rhs(spec)
    forced = integrate_ode(rhs, [0.0, 0.0], t0, t0 + T_common, tol=tol)
    r_t = forced.values[-1]
    lhs = np.eye(2) - matrix
    sv = np.linalg.svd(lhs, compute_uv=False)
    if sv[-1] < singular_tol * max(1.0, sv[0]):
        raise ResonantForcingError(
            "resonant forcing: no periodic particular solution "
            "(1 is a Floquet multiplier over the forcing period)",
            trace=float(np.trace(matrix)), T=T_common)
    s0 = np.linalg.solve(lhs, r_t)
    traj = integrate_ode(rhs, s0, t0, t0 + T_common, tol=tol)
    return ParticularSolution(spec=spec, traj=traj, t0=float(t0),
                              period=float(T_common))


def common_period(spec, pair, xp, cap=DEFAULT_PERIOD_CAP, n_samples=256,
                  tol=1e-8):
    """Smallest integral multiple of tau that is a period of both rho and
    x_p, certified by sup-norm sampling over each full fundamental window."""
    tau = spec.tau
    t0 = pair.t0
    if not np.isfinite(pair.rho_period):
        raise NoCommonPeriodError(
            "rho is not periodic with period tau or 2 tau")
    rho_mult = max(1, round(pair.rho_period / tau))
    ts = t0 + xp.period * np.arange(n_samples) / n_samples
    if not xp.is_zero:
        xp0 = xp.x_p(ts)
        xp_scale = max(1.0, float(np.max(np.abs(xp0))))
    for k in range(1, cap + 1):
        if k % rho_mult:
            continue
        if not xp.is_zero and \
           np.max(np.abs(xp.x_p(ts + k * tau) - xp0)) > tol * xp_scale:
            continue
        # Re-certify rho at the found multiple (guards explicit pairs).
        trho = t0 + pair.rho_period * np.arange(n_samples) / n_samples
        rho0 = pair.rho(trho)
        rho_scale = max(1.0, float(np.max(np.abs(rho0))))
        if np.max(np.abs(pair.rho(trho + k * tau) - rho0)) > tol * rho_scale:
            continue
        return k * tau
    raise NoCommonPeriodError(
        f"no common period of rho and x_p within {cap} tau", cap=cap)
