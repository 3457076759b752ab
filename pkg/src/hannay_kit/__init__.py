"""Exact action-angle structure, Hannay angle, and geometric phases of the
generalized harmonic oscillator with time-periodic coefficients."""

from .action_angle import (
    ActionAngleFrame,
    action,
    angle,
    build_frame,
    dF2_dt_at_angle,
    ellipse_area,
    generating_function,
    inverse_map,
    momentum_branches,
    transformed_hamiltonian_residual,
)
from .classical import (
    HomogeneousPair,
    ParticularSolution,
    ermakov_residual,
    hamilton_flow,
    solve_homogeneous,
    wronskian_omega,
)
from .config import RunConfig, load_config, parse_config
from .errors import (
    ConfigError,
    ConsistencyError,
    DomainError,
    HannayKitError,
    NoCommonPeriodError,
    ResonantForcingError,
    UnboundedHomogeneousError,
)
from .floquet import (
    Monodromy,
    canonical_pair,
    common_period,
    explicit_pair,
    monodromy,
    periodic_particular,
)
from .hannay import (
    GaugeOffset,
    forcing_independence_check,
    gauge_shift_check,
    hannay_all_routes,
    hannay_closed_form,
    hannay_from_definition,
    hannay_loop_integral,
)
from .model import OscillatorSpec, PeriodicFunction, derived_c, derived_d, hamiltonian
from .numerics import Trajectory, hermite, integrate_ode, integrate_periodic
from .pipeline import classify, emit_plot_data, run_pipeline
from .quantum import (
    energy_expectation,
    energy_expectation_grid,
    geometric_phase,
    schrodinger_residual,
    state_norm,
    state_overlap,
    total_phase,
    verify_relation,
    wavefunction,
)
from .report import ClassificationReport, PhaseReport, RefusalReport

__version__ = "0.1.0"
