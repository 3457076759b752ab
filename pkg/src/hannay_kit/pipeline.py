"""Pipeline orchestration: config -> frame -> Hannay angle -> quantum phases,
with structured refusal reports, plus CSV plot-data emission."""

from __future__ import annotations

import os

import numpy as np

from .action_angle import action, angle, build_frame, inverse_map
from .classical import hamilton_flow
from .errors import (
    ConfigError,
    HannayKitError,
    NoCommonPeriodError,
    ResonantForcingError,
    UnboundedHomogeneousError,
)
from .floquet import monodromy
from .hannay import hannay_all_routes
from .quantum import (
    geometric_phase,
    schrodinger_residual,
    state_norm,
    total_phase,
    verify_relation,
)
from .report import ClassificationReport, PhaseReport, RefusalReport, format_float

REFUSAL_TYPES = (ConfigError, UnboundedHomogeneousError, ResonantForcingError,
                 NoCommonPeriodError)


def classify(config):
    """Floquet classification only; succeeds for every stability class."""
    mono = monodromy(config.spec, config.t0, config.spec.tau,
                     tol=config.ode_tol)
    eig_mag = tuple(float(abs(v)) for v in mono.eigenvalues) \
        if np.all(np.isfinite(mono.matrix)) else (float("inf"), float("inf"))
    return ClassificationReport(
        tau=config.spec.tau, trace=mono.trace,
        classification=mono.classification,
        det_residual=mono.det_residual,
        eigenvalue_magnitudes=eig_mag)


def _classification_dict(spec, t0, ode_tol):
    try:
        mono = monodromy(spec, t0, spec.tau, tol=ode_tol)
        return {"kind": mono.classification, "trace": mono.trace}
    except HannayKitError:
        return {}


def build_frame_from_config(config):
    return build_frame(
        config.spec, t0=config.t0, ode_tol=config.ode_tol,
        pair_init=config.pair_init, period_cap=config.period_cap)


def run_pipeline(config, stage="phases"):
    """Full pipeline; returns a PhaseReport, or a RefusalReport carrying the
    machine-readable code of the failed existence condition.

    ``stage`` is "hannay" (skip the quantum ladder) or "phases" (everything).
    """
    try:
        frame = build_frame_from_config(config)
        return _report_from_frame(frame, config, stage)
    except REFUSAL_TYPES as exc:
        return RefusalReport(
            code=exc.code, message=str(exc),
            classification=_classification_dict(config.spec, config.t0,
                                                config.ode_tol))


def _report_from_frame(frame, config, stage):
    spec = config.spec
    routes = hannay_all_routes(frame)

    if stage == "hannay":
        chi = ()
        gamma = ()
        relation_residual = float("nan")
        quantum_diag = {}
    else:
        chi = tuple(total_phase(frame, m) for m in range(config.m_max + 1))
        gamma = tuple(geometric_phase(frame, m)
                      for m in range(config.m_max + 1))
        relation_residual = verify_relation(frame, config.m_max,
                                            q_h=routes.closed_form)
        quantum_diag = {
            "state_norm_defect_m0": abs(state_norm(frame, 0, frame.t0) - 1.0),
            "schrodinger_residual_m0":
                schrodinger_residual(frame, 0, frame.t0 + 0.3 * spec.tau),
        }

    ts = frame.t0 + frame.tau_prime * np.arange(512) / 512
    rho = frame.pair.rho(ts)
    x_p = frame.xp.x_p(ts)
    p_p = frame.xp.p_p(ts)
    diagnostics = dict(frame.diagnostics())
    diagnostics.update(quantum_diag)

    return PhaseReport(
        tau=spec.tau,
        tau_prime=frame.tau_prime,
        omega=frame.Omega,
        sigma=frame.sigma,
        classification=frame.mono.classification,
        trace=frame.mono.trace,
        hannay_closed_form=routes.closed_form,
        hannay_from_definition=routes.from_definition,
        hannay_loop_integral=routes.loop_integral,
        chi=chi,
        gamma=gamma,
        relation_residual=relation_residual,
        diagnostics=diagnostics,
        rho_min=float(np.min(rho)),
        rho_max=float(np.max(rho)),
        rho_period=frame.pair.rho_period,
        center_x_range=(float(np.min(x_p)), float(np.max(x_p))),
        center_p_range=(float(np.min(p_p)), float(np.max(p_p))),
        pair_source=frame.pair.source,
    )


# -- plot data -----------------------------------------------------------------


def emit_plot_data(frame, out_dir, n_times=512, i_sample=1.0, n_slices=5):
    """Write trajectory.csv: frame geometry, an invariant/angle sample along
    one Hamiltonian flow, and |psi_0|^2 at fixed x positions over time.

    Returns the list of written paths.  Re-running with the same config
    produces byte-identical files.
    """
    os.makedirs(out_dir, exist_ok=True)
    spec = frame.spec
    t0, tp = frame.t0, frame.tau_prime
    ts = t0 + tp * np.arange(n_times) / n_times

    x0, p0 = inverse_map(frame, 0.25, i_sample, t0)
    flow = hamilton_flow(spec, x0, p0, t0, t0 + tp, tol=frame.ode_tol)
    xs, ps = flow(ts)
    i_vals = action(frame, xs, ps, ts)
    q_vals = np.unwrap(angle(frame, xs, ps, ts))

    rho = frame.pair.rho(ts)
    rho_dot = frame.pair.rho_dot(ts)
    x_p = frame.xp.x_p(ts)
    p_p = frame.xp.p_p(ts)

    sigma0 = np.sqrt(spec.hbar * frame.pair.rho(t0) ** 2 / frame.Omega)
    offsets = np.linspace(-2.0, 2.0, n_slices)
    slice_x = float(frame.xp.x_p(t0)) + offsets * sigma0
    from .quantum import wavefunction

    psi_sq = np.empty((n_slices, n_times))
    for j, t in enumerate(ts):
        psi_sq[:, j] = np.abs(wavefunction(frame, 0, slice_x, t)) ** 2

    header = ["t [time]", "rho [1]", "rho_dot [1/time]", "x_p [length]",
              "p_p [momentum]", "I_sample [action]", "Q_unwrapped [rad]"]
    header += [f"psi0_sq_at_x={format_float(xv)} [1/length]"
               for xv in slice_x]
    columns = [ts, rho, rho_dot, x_p, p_p, i_vals, q_vals] + list(psi_sq)

    path = os.path.join(out_dir, "trajectory.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(format_float(v) for v in row) + "\n")
    return [path]
