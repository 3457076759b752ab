"""Exception hierarchy with machine-readable refusal codes.

Refusal codes (existence conditions, CLI exit code 2):
    UNBOUNDED_HOMOGENEOUS, RESONANT_FORCING, NO_COMMON_PERIOD, CONFIG_INVALID
Everything else is an internal error (CLI exit code 1).
"""


class HannayKitError(Exception):
    """Base class; ``code`` is the machine-readable tag put in reports."""

    code = "INTERNAL"

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class ConfigError(HannayKitError):
    """Invalid configuration: bad coefficients, incommensurate forcing,
    non-positive mass, negative frequency squared, bad explicit pair."""

    code = "CONFIG_INVALID"


class UnboundedHomogeneousError(HannayKitError):
    """Hyperbolic (or non-diagonalizable parabolic) monodromy: homogeneous
    solutions grow without bound, so no periodic rho and no Hannay angle."""

    code = "UNBOUNDED_HOMOGENEOUS"


class ResonantForcingError(HannayKitError):
    """1 is an eigenvalue of the full-period monodromy: the periodic
    particular solution does not exist (or is not unique)."""

    code = "RESONANT_FORCING"


class NoCommonPeriodError(HannayKitError):
    """No integral multiple of tau within the cap is a common period of
    rho and x_p."""

    code = "NO_COMMON_PERIOD"


class IntegrationError(HannayKitError):
    """ODE solver failure: step-size underflow or norm blowup
    (stiffness/blowup)."""


class EvaluationError(HannayKitError):
    """NaN or non-finite value met while evaluating an integrand."""


class LinearlyDependentPairError(ConfigError):
    """Wronskian constant is numerically zero: (u, v) are not independent."""


class UnsupportedOrderError(HannayKitError):
    """Requested polynomial/state order above the supported cap."""


class DomainError(HannayKitError):
    """Argument outside the mathematical domain of the operation
    (e.g. x beyond the ellipse extent, angle at the ellipse center)."""


class ConsistencyError(HannayKitError):
    """An internal cross-check between two independent evaluation routes
    failed; carries both values in ``context``."""
