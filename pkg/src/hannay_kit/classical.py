"""Homogeneous and particular solutions of the classical equation of motion,
the Wronskian constant Omega, rho = sqrt(u^2 + v^2), and the Ermakov residual.

Solutions are integrated in (x, y = M dx/dt) coordinates over one base span
and extended to arbitrary times through the exact one-span transfer matrix,
never by long raw integration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ConfigError,
    IntegrationError,
    LinearlyDependentPairError,
    UnboundedHomogeneousError,
)
from .model import hamilton_rhs, homogeneous_rhs
from .numerics import DEFAULT_ODE_TOL, Trajectory, integrate_ode


def solve_homogeneous(spec, x0, v0, t0, t1, tol=DEFAULT_ODE_TOL):
    """Solve d(M dx/dt)/dt + M w^2 x = 0 from x(t0) = x0, dx/dt(t0) = v0.

    Returns a Trajectory of (x, y = M dx/dt); dx/dt = y / M(t).
    """
    if x0 == 0.0 and v0 == 0.0:
        raise ValueError("initial data must not be identically zero")
    y0 = spec.M(t0) * v0
    try:
        return integrate_ode(homogeneous_rhs(spec), [x0, y0], t0, t1, tol=tol)
    except IntegrationError as exc:
        raise UnboundedHomogeneousError(f"unbounded solution: {exc}") from exc


def hamilton_flow(spec, x0, p0, t0, t1, tol=DEFAULT_ODE_TOL):
    """Integrate Hamilton's equations for one or a batch of initial points.

    x0, p0 may be scalars or equal-length arrays; the returned Trajectory
    state is [x_1..x_n, p_1..p_n].
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    state0 = np.concatenate([x0, p0])
    return integrate_ode(hamilton_rhs(spec), state0, t0, t1, tol=tol)


@dataclass(frozen=True)
class HomogeneousPair:
    """Two independent homogeneous solutions u, v with constant Wronskian.

    ``traj`` holds (u, y_u, v, y_v) on [t0, t0 + span]; values elsewhere come
    from the one-span transfer matrix K, defined by U(t + span) = U(t) K for
    the 2x2 solution matrix U = [[u, v], [y_u, y_v]].

    Omega = M (dv/dt u - du/dt v) = u y_v - v y_u must be positive for the
    pair to define square-integrable wave functions.
    """

    spec: object
    traj: Trajectory
    K: np.ndarray
    t0: float
    span: float
    Omega: float
    omega_deviation: float
    rho_period: float
    source: str = "canonical"

    @classmethod
    def from_initial_states(cls, spec, u_state0, v_state0, t0, span,
                            tol=DEFAULT_ODE_TOL, source="canonical"):
        """Integrate both solutions over [t0, t0 + span] and certify Omega."""
        state0 = [u_state0[0], u_state0[1], v_state0[0], v_state0[1]]

        def rhs(t, s):
            m = spec.M(t)
            mw2 = m * spec.w_sq(t)
            return np.array([s[1] / m, -mw2 * s[0], s[3] / m, -mw2 * s[2]])

        try:
            traj = integrate_ode(rhs, state0, t0, t0 + span, tol=tol)
        except IntegrationError as exc:
            raise UnboundedHomogeneousError(f"unbounded solution: {exc}") from exc

        u, yu, v, yv = traj.values.T
        omega_t = u * yv - v * yu
        omega = float(np.mean(omega_t))
        scale = float(np.max(np.abs(u * yv) + np.abs(v * yu)))
        if abs(omega) < 1e-12 * max(scale, 1e-300):
            raise LinearlyDependentPairError("linearly dependent pair")
        if omega < 0:
            raise ConfigError(
                "pair must have a positive Wronskian constant "
                "(swap or negate one solution)", omega=omega)
        dev = float(np.max(np.abs(omega_t - omega)))
        u0 = np.array([[u[0], v[0]], [yu[0], yv[0]]])
        u1 = np.array([[u[-1], v[-1]], [yu[-1], yv[-1]]])
        transfer = np.linalg.solve(u0, u1)
        pair = cls(spec=spec, traj=traj, K=transfer, t0=float(t0),
                   span=float(span), Omega=omega, omega_deviation=dev,
                   rho_period=float(span), source=source)
        object.__setattr__(pair, "rho_period", pair._certify_rho_period())
        return pair

    # -- evaluation ----------------------------------------------------------

    def states(self, t):
        """(u, y_u, v, y_v); shape (4,) for scalar t, (4, n) for arrays."""
        t_in = np.asarray(t, dtype=float)
        t = np.atleast_1d(t_in)
        rel = (t - self.t0) / self.span
        k = np.floor(rel + 1e-12).astype(int)
        t_base = np.clip(t - k * self.span, self.t0, self.t0 + self.span)
        out = np.empty((4, t.size))
        for kv in np.unique(k):
            mask = k == kv
            u, yu, v, yv = self.traj(t_base[mask])
            kp = np.linalg.matrix_power(self.K, int(kv))
            out[0][mask] = u * kp[0, 0] + v * kp[1, 0]
            out[1][mask] = yu * kp[0, 0] + yv * kp[1, 0]
            out[2][mask] = u * kp[0, 1] + v * kp[1, 1]
            out[3][mask] = yu * kp[0, 1] + yv * kp[1, 1]
        return out[:, 0] if t_in.ndim == 0 else out

    def uv(self, t):
        """(u, v, du/dt, dv/dt)."""
        u, yu, v, yv = self.states(t)
        m = self.spec.M(t)
        return u, v, yu / m, yv / m

    def rho(self, t):
        u, _, v, _ = self.states(t)
        return np.hypot(u, v)

    def rho_dot(self, t):
        u, v, ud, vd = self.uv(t)
        return (u * ud + v * vd) / np.hypot(u, v)

    def rho_ddot(self, t):
        """Second derivative, using the equation of motion for u'', v''."""
        u, v, ud, vd = self.uv(t)
        rho = np.hypot(u, v)
        rho_dot = (u * ud + v * vd) / rho
        w2 = self.spec.w_sq(t)
        mdot_over_m = self.spec.M.derivative(t) / self.spec.M(t)
        return (ud * ud + vd * vd - w2 * rho * rho
                - mdot_over_m * (u * ud + v * vd) - rho_dot * rho_dot) / rho

    def omega_pointwise(self, t):
        u, yu, v, yv = self.states(t)
        return u * yv - v * yu

    def rho_periodicity_defect(self, n_samples=256):
        """Sup-norm mismatch of rho over its certified period."""
        if not np.isfinite(self.rho_period):
            return np.inf
        ts = self.t0 + self.rho_period * np.arange(n_samples) / n_samples
        return float(np.max(np.abs(self.rho(ts + self.rho_period)
                                   - self.rho(ts))))

    def _certify_rho_period(self, n_samples=256, tol=1e-8):
        """Smallest multiple (1x or 2x) of the span that is a period of rho."""
        ts = self.t0 + self.span * np.arange(n_samples) / n_samples
        rho0 = self.rho(ts)
        scale = max(1.0, float(np.max(np.abs(rho0))))
        for mult in (1, 2):
            if np.max(np.abs(self.rho(ts + mult * self.span) - rho0)) < tol * scale:
                return mult * self.span
        return np.inf


class WronskianResult(NamedTuple):
    omega: float
    max_deviation: float


def wronskian_omega(spec, pair):
    """Time-average of M (dv/dt u - du/dt v) plus its max pointwise deviation.

    ``pair`` is a HomogeneousPair or a Trajectory of (u, y_u, v, y_v).
    Raises LinearlyDependentPairError when the average is numerically zero.
    """
    traj = pair.traj if isinstance(pair, HomogeneousPair) else pair
    u, yu, v, yv = traj.values.T
    omega_t = u * yv - v * yu
    omega = float(np.mean(omega_t))
    scale = float(np.max(np.abs(u * yv) + np.abs(v * yu)))
    if abs(omega) < 1e-12 * max(scale, 1e-300):
        raise LinearlyDependentPairError("linearly dependent pair")
    return WronskianResult(omega, float(np.max(np.abs(omega_t - omega))))


def ermakov_residual(spec, pair, n_samples=512):
    """max_t | d(M drho/dt)/dt - Omega^2 / (M rho^3) + M w^2 rho |.

    Derivatives are taken analytically from the (u, v) dynamics; the residual
    of a numerically exact pair is pure integration error.
    """
    ts = pair.t0 + pair.span * np.arange(n_samples) / n_samples
    ts = np.union1d(ts, pair.traj.grid)
    m = spec.M(ts)
    rho = pair.rho(ts)
    lhs = m * pair.rho_ddot(ts) + spec.M.derivative(ts) * pair.rho_dot(ts)
    residual = lhs - pair.Omega**2 / (m * rho**3) + m * spec.w_sq(ts) * rho
    return float(np.max(np.abs(residual)))


@dataclass(frozen=True)
class ParticularSolution:
    """Periodic particular solution x_p in (x, y = M dx_p/dt) form.

    p_p = M dx_p/dt + 2 M a x_p + b.  The trajectory covers one period and
    is extended exactly periodically.
    """

    spec: object
    traj: Trajectory
    t0: float
    period: float
    is_zero: bool = False

    @classmethod
    def zero(cls, spec, t0):
        grid = np.array([t0, t0 + spec.tau])
        values = np.zeros((2, 2))

        def interp(t):
            t = np.asarray(t, dtype=float)
            return np.zeros((2,) + t.shape)

        traj = Trajectory(grid, values, interp, order=3)
        return cls(spec=spec, traj=traj, t0=float(t0), period=float(spec.tau),
                   is_zero=True)

    def states(self, t):
        """(x_p, y_p); shape (2,) for scalar t, (2, n) for arrays."""
        t_in = np.asarray(t, dtype=float)
        if self.is_zero:
            return np.zeros((2,) + t_in.shape)
        wrapped = self.t0 + np.mod(t_in - self.t0, self.period)
        return self.traj(wrapped)

    def x_p(self, t):
        return self.states(t)[0]

    def xp_dot(self, t):
        return self.states(t)[1] / self.spec.M(t)

    def p_p(self, t):
        x, y = self.states(t)
        return y + 2.0 * self.spec.M(t) * self.spec.a(t) * x + self.spec.b(t)

    def pp_dot(self, t):
        """dp_p/dt, analytic via the equation of motion for x_p."""
        x, y = self.states(t)
        spec = self.spec
        m = spec.M(t)
        ma_dot = spec.M.derivative(t) * spec.a(t) + m * spec.a.derivative(t)
        return (spec.F(t) - m * spec.w_sq(t) * x + 2.0 * ma_dot * x
                + 2.0 * spec.a(t) * y + spec.b.derivative(t))

    def periodicity_defect(self):
        """Seam mismatch of the stored trajectory over one period (the
        closure error of the periodic fixed point)."""
        if self.is_zero:
            return 0.0
        return float(np.max(np.abs(self.traj.values[-1]
                                   - self.traj.values[0])))

    def residual(self, n_samples=64, h_frac=1e-6):
        """Sup-norm residual of the forced equation of motion along the
        trajectory, with d(M dx_p/dt)/dt by central differences on y."""
        if self.is_zero:
            return 0.0
        h = h_frac * self.period
        ts = self.t0 + self.period * (np.arange(n_samples) + 0.5) / n_samples
        ydot = (self.states(ts + h)[1] - self.states(ts - h)[1]) / (2.0 * h)
        x = self.states(ts)[0]
        res = ydot + self.spec.M(ts) * self.spec.w_sq(ts) * x - self.spec.F(ts)
        return float(np.max(np.abs(res)))
