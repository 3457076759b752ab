"""Time-periodic Hamiltonian model: coefficient set and derived quantities.

The Hamiltonian is

    H = p^2/2M - 2 a x p + (1/2) M c x^2 - (b/M) p + d x + (b^2/2M - f)

with the derived coefficients

    c = w^2 + 4 a^2 - 2 da/dt - 2 (dM/dt / M) a,
    d = 2 a b - db/dt - F.

All six coefficients M, w^2, a, b, F, f are truncated real Fourier series,
which makes periodicity exact by construction and derivatives analytic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigError

_TWO_PI = 2.0 * np.pi

# Largest admissible p, q in a commensurate forcing period (p/q) * tau.
MAX_COMMENSURATE = 64


@dataclass(frozen=True)
class PeriodicFunction:
    """Truncated real Fourier series with analytic derivative.

    f(t) = constant + sum_n [cos_amp_n cos(2 pi n t / P) + sin_amp_n sin(2 pi n t / P)]

    Parameters
    ----------
    base_period : float
        P > 0. Evaluation is exactly P-periodic.
    constant : float
        Mean value.
    harmonics : tuple of (order, cos_amp, sin_amp)
        Orders are positive integers.
    """

    base_period: float
    constant: float = 0.0
    harmonics: tuple = ()

    def __post_init__(self):
        if not np.isfinite(self.base_period) or self.base_period <= 0:
            raise ConfigError("base_period must be a positive finite number")
        norm = []
        for term in self.harmonics:
            n, ca, sa = term
            if int(n) != n or n < 1:
                raise ConfigError(f"harmonic order must be a positive integer, got {n!r}")
            norm.append((int(n), float(ca), float(sa)))
        object.__setattr__(self, "harmonics", tuple(norm))

    @classmethod
    def const(cls, value, period=_TWO_PI):
        return cls(base_period=float(period), constant=float(value))

    @property
    def is_constant(self):
        return all(ca == 0.0 and sa == 0.0 for _, ca, sa in self.harmonics)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.constant, dtype=float)
        for n, ca, sa in self.harmonics:
            arg = (_TWO_PI * n / self.base_period) * t
            out += ca * np.cos(arg) + sa * np.sin(arg)
        return out if out.shape else float(out)

    def derivative(self, t):
        """Analytic term-by-term derivative."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=float)
        for n, ca, sa in self.harmonics:
            k = _TWO_PI * n / self.base_period
            arg = k * t
            out += -ca * k * np.sin(arg) + sa * k * np.cos(arg)
        return out if out.shape else float(out)

    def to_dict(self):
        d = {"constant": self.constant, "period": self.base_period}
        if self.harmonics:
            d["harmonics"] = [list(h) for h in self.harmonics]
        return d


def _as_periodic(value, default_period):
    if isinstance(value, PeriodicFunction):
        return value
    return PeriodicFunction.const(float(value), default_period)


def _period_ratio(base_period, tau):
    """Reduced Fraction p/q with base_period = (p/q) tau, or None."""
    frac = Fraction(base_period / tau).limit_denominator(MAX_COMMENSURATE)
    if frac <= 0:
        return None
    if abs(float(frac) * tau - base_period) > 1e-9 * tau:
        return None
    return frac


@dataclass(frozen=True)
class OscillatorSpec:
    """Full coefficient set of the oscillator over one Hamiltonian period tau.

    M must be positive and w_sq non-negative at all sampled times.  Every
    coefficient's base period must divide tau exactly, except the force F,
    which may carry a commensurate period (p/q) tau with small integers p, q.
    """

    tau: float
    M: PeriodicFunction
    w_sq: PeriodicFunction
    a: PeriodicFunction
    b: PeriodicFunction
    F: PeriodicFunction
    f: PeriodicFunction
    hbar: float = 1.0
    forcing_ratio: Fraction = field(init=False, repr=False, compare=False)

    _N_VALIDATION_SAMPLES = 1024

    def __post_init__(self):
        if not np.isfinite(self.tau) or self.tau <= 0:
            raise ConfigError("tau must be a positive finite number")
        if not np.isfinite(self.hbar) or self.hbar <= 0:
            raise ConfigError("hbar must be a positive finite number")
        for name in ("M", "w_sq", "a", "b", "F", "f"):
            pf = getattr(self, name)
            if not isinstance(pf, PeriodicFunction):
                raise ConfigError(f"coefficient {name} must be a PeriodicFunction")
        self._check_period(self.M, "M")
        self._check_period(self.w_sq, "w_sq")
        self._check_period(self.a, "a")
        self._check_period(self.b, "b")
        self._check_period(self.f, "f")
        ratio = self._forcing_period_ratio()
        object.__setattr__(self, "forcing_ratio", ratio)
        ts = np.linspace(0.0, self.tau, self._N_VALIDATION_SAMPLES, endpoint=False)
        m = self.M(ts)
        if np.any(m <= 0):
            raise ConfigError("mass M(t) must be positive at all times")
        if np.any(self.w_sq(ts) < -1e-14):
            raise ConfigError("frequency squared w_sq(t) must be non-negative")

    def _check_period(self, pf, name):
        if pf.is_constant:
            return
        ratio = self.tau / pf.base_period
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ConfigError(
                f"base period of {name} must divide tau exactly "
                f"(tau/{name}.base_period = {ratio!r})"
            )

    def _forcing_period_ratio(self):
        if self.F.is_constant:
            return Fraction(1)
        frac = _period_ratio(self.F.base_period, self.tau)
        if frac is None or frac.numerator > MAX_COMMENSURATE:
            raise ConfigError(
                "force period must be a commensurate rational multiple "
                f"(p/q) tau with p, q <= {MAX_COMMENSURATE}",
                period=self.F.base_period,
                tau=self.tau,
            )
        return frac

    @property
    def full_period(self):
        """Smallest common period of all coefficients (= p tau for a reduced
        forcing ratio p/q; tau when the force divides tau)."""
        return self.forcing_ratio.numerator * self.tau

    @classmethod
    def build(cls, tau, M=1.0, w_sq=1.0, a=0.0, b=0.0, F=0.0, f=0.0, hbar=1.0):
        """Convenience constructor accepting floats or PeriodicFunctions."""
        tau = float(tau)
        return cls(
            tau=tau,
            M=_as_periodic(M, tau),
            w_sq=_as_periodic(w_sq, tau),
            a=_as_periodic(a, tau),
            b=_as_periodic(b, tau),
            F=_as_periodic(F, tau),
            f=_as_periodic(f, tau),
            hbar=float(hbar),
        )


def derived_c(spec, t):
    """c(t) = w^2 + 4 a^2 - 2 da/dt - 2 (dM/dt / M) a."""
    a = spec.a(t)
    return spec.w_sq(t) + 4.0 * a * a - 2.0 * spec.a.derivative(t) \
        - 2.0 * (spec.M.derivative(t) / spec.M(t)) * a


def derived_d(spec, t):
    """d(t) = 2 a b - db/dt - F."""
    return 2.0 * spec.a(t) * spec.b(t) - spec.b.derivative(t) - spec.F(t)


def hamiltonian(spec, x, p, t):
    """H(x, p, t); classically the symmetrized cross term is just -2 a x p."""
    m = spec.M(t)
    b = spec.b(t)
    return (
        p * p / (2.0 * m)
        - 2.0 * spec.a(t) * x * p
        + 0.5 * m * derived_c(spec, t) * x * x
        - (b / m) * p
        + derived_d(spec, t) * x
        + (b * b / (2.0 * m) - spec.f(t))
    )


def hamilton_rhs(spec):
    """Phase-space vector field of Hamilton's equations.

    Returns f(t, s) for a stacked state s = [x_1..x_n, p_1..p_n]:

        dx/dt = p/M - 2 a x - b/M
        dp/dt = 2 a p - M c x - d
    """

    def rhs(t, s):
        n = s.shape[0] // 2
        x, p = s[:n], s[n:]
        m = spec.M(t)
        a = spec.a(t)
        xdot = p / m - 2.0 * a * x - spec.b(t) / m
        pdot = 2.0 * a * p - m * derived_c(spec, t) * x - derived_d(spec, t)
        return np.concatenate([xdot, pdot])

    return rhs


def homogeneous_rhs(spec):
    """Vector field of d(M dx/dt)/dt + M w^2 x = 0 in (x, y = M dx/dt),
    for stacked states [x_1..x_n, y_1..y_n]."""

    def rhs(t, s):
        n = s.shape[0] // 2
        x, y = s[:n], s[n:]
        return np.concatenate([y / spec.M(t), -spec.M(t) * spec.w_sq(t) * x])

    return rhs


def forced_rhs(spec):
    """Vector field of d(M dx/dt)/dt + M w^2 x = F in (x, y = M dx/dt)."""

    def rhs(t, s):
        x, y = s
        return np.array([y / spec.M(t), -spec.M(t) * spec.w_sq(t) * x + spec.F(t)])

    return rhs
