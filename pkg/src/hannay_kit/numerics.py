"""Shared numerical kernels: adaptive ODE integration with dense output,
composite Gauss-Legendre quadrature over a period, Hermite polynomials."""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp
from scipy.interpolate import make_interp_spline

from .errors import EvaluationError, IntegrationError, UnsupportedOrderError

DEFAULT_ODE_TOL = 1e-10
BLOWUP_NORM = 1e12
HERMITE_MAX_ORDER = 60


class Trajectory:
    """Dense-output solution on [t0, t1].

    Evaluation at a grid point reproduces the stored value; between grid
    points a piecewise polynomial of the stated order interpolates.
    """

    def __init__(self, grid, values, interpolant, order):
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.grid.ndim != 1 or np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if order < 3:
            raise ValueError("interpolation order must be >= 3")
        self._interpolant = interpolant
        self.order = int(order)

    @property
    def t0(self):
        return self.grid[0]

    @property
    def t1(self):
        return self.grid[-1]

    @property
    def dim(self):
        return self.values.shape[1]

    def __call__(self, t):
        """Evaluate the state; shape (dim,) for scalar t, (dim, n) for arrays."""
        return self._interpolant(t)

    @classmethod
    def from_ode_solution(cls, sol, order):
        return cls(sol.t, sol.y.T, sol.sol, order)

    @classmethod
    def from_samples(cls, grid, values, order=5):
        """Spline interpolant through sampled states (degree = order)."""
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        spline = make_interp_spline(grid, values, k=order)

        def interp(t):
            out = spline(np.asarray(t, dtype=float))
            return np.moveaxis(out, -1, 0)

        return cls(grid, values, interp, order)


def integrate_ode(rhs, state0, t0, t1, tol=DEFAULT_ODE_TOL, max_norm=BLOWUP_NORM):
    """Adaptive 8th-order Runge-Kutta (DOP853) with dense output.

    Local error controlled at ``tol``; raises IntegrationError on step-size
    underflow or when the solution norm exceeds ``max_norm`` (stiffness or
    blowup, e.g. a hyperbolic Floquet regime).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    state0 = np.atleast_1d(np.asarray(state0, dtype=float))
    sol = solve_ivp(
        rhs, (t0, t1), state0,
        method="DOP853", rtol=tol, atol=tol * 1e-3, dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(f"stiffness/blowup: {sol.message}")
    if not np.all(np.isfinite(sol.y)) or np.max(np.abs(sol.y)) > max_norm:
        raise IntegrationError("stiffness/blowup: solution norm exceeded "
                               f"{max_norm:g}")
    # DOP853 dense output is a degree-7 local interpolant.
    return Trajectory.from_ode_solution(sol, order=7)


def integrate_periodic(fn, t0, period, rel_tol=1e-12, abs_tol=1e-14,
                       initial_panels=32, nodes=12, max_panels=8192):
    """Composite Gauss-Legendre quadrature of a smooth function over one
    period, with panel doubling until the result is converged.

    ``fn`` must accept an array of times and return an array of values.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    xg, wg = leggauss(nodes)

    def composite(n_panels):
        edges = t0 + period * np.arange(n_panels + 1) / n_panels
        left, right = edges[:-1], edges[1:]
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        ts = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        vals = np.asarray(fn(ts), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise EvaluationError("non-finite value in periodic integrand")
        return float(np.sum(vals.reshape(-1, nodes) * wg[None, :] * half[:, None]))

    n = initial_panels
    prev = composite(n)
    while n < max_panels:
        n *= 2
        cur = composite(n)
        if abs(cur - prev) <= max(abs_tol, rel_tol * abs(cur)):
            return cur
        prev = cur
    return prev


def hermite(m, z):
    """Physicists' Hermite polynomial H_m(z) by three-term recurrence.

    Supports m up to HERMITE_MAX_ORDER (overflow guard).
    """
    if m < 0 or int(m) != m:
        raise ValueError("m must be a non-negative integer")
    if m > HERMITE_MAX_ORDER:
        raise UnsupportedOrderError(
            f"Hermite order {m} above supported cap {HERMITE_MAX_ORDER}")
    z = np.asarray(z, dtype=float)
    h_prev = np.ones_like(z)
    if m == 0:
        return h_prev if h_prev.shape else float(h_prev)
    h = 2.0 * z
    for k in range(1, m):
        h, h_prev = 2.0 * z * h - 2.0 * k * h_prev, h
    return h if h.shape else float(h)
