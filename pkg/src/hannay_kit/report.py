"""Report containers and deterministic serialization.

Floats are rendered with 17 significant digits so identical runs produce
byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1

TWO_PI = 2.0 * np.pi

PAIR_CHOICE_CAVEAT = (
    "The bounded homogeneous pair (u, v) is not unique; rho(t), and with it "
    "the reported angle anholonomy and geometric phases, depend on that "
    "choice. Values correspond to the canonical pair unless explicit initial "
    "data was supplied; any fixed admissible choice gives reproducible "
    "values."
)


def format_float(x):
    x = float(x)
    if np.isnan(x):
        return '"nan"'
    if np.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def render_json(obj, indent=0):
    """Minimal JSON renderer with fixed float formatting (17 significant
    digits) and insertion-ordered keys, for bit-reproducible reports."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  "{k}": {render_json(v, indent + 1)}'
            for k, v in obj.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = ", ".join(render_json(v, indent + 1) for v in obj)
        return "[" + items + "]"
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    raise TypeError(f"cannot render {type(obj)!r}")


def _mod_2pi(x):
    return float(np.mod(x, TWO_PI))


def flatten(doc, prefix=""):
    """Flatten a nested report dict to dotted-key rows for CSV output."""
    rows = []
    for key, value in doc.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(flatten(value, prefix=name + "."))
        elif isinstance(value, (list, tuple)):
            for i, item in enumerate(value):
                rows.append((f"{name}[{i}]", item))
        else:
            rows.append((name, value))
    return rows


def render_csv(doc):
    lines = ["key,value"]
    for key, value in flatten(doc):
        if isinstance(value, (float, np.floating)):
            text = format_float(value).strip('"')
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, str):
            text = '"' + value.replace('"', '""') + '"'
        else:
            text = str(value)
        lines.append(f"{key},{text}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PhaseReport:
    """Successful pipeline result: tau', the three Hannay values, the phase
    ladders, the exact-relation residual, and named diagnostics."""

    tau: float
    tau_prime: float
    omega: float
    sigma: float
    classification: str
    trace: float
    hannay_closed_form: float
    hannay_from_definition: float
    hannay_loop_integral: float
    chi: tuple
    gamma: tuple
    relation_residual: float
    diagnostics: dict
    rho_min: float
    rho_max: float
    rho_period: float
    center_x_range: tuple
    center_p_range: tuple
    pair_source: str
    status: str = "ok"

    @property
    def hannay_spread(self):
        values = (self.hannay_closed_form, self.hannay_from_definition,
                  self.hannay_loop_integral)
        return max(values) - min(values)

    @property
    def gamma_spacing_deviation(self):
        """Deviation of gamma from an affine ladder in m."""
        if len(self.gamma) < 3:
            return 0.0
        diffs = np.diff(self.gamma)
        return float(np.max(np.abs(diffs - diffs[0])))

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "status": self.status,
            "classification": {
                "kind": self.classification,
                "trace": self.trace,
            },
            "frame": {
                "tau": self.tau,
                "tau_prime": self.tau_prime,
                "omega": self.omega,
                "sigma": self.sigma,
                "rho_min": self.rho_min,
                "rho_max": self.rho_max,
                "rho_period": self.rho_period,
                "center_x_range": list(self.center_x_range),
                "center_p_range": list(self.center_p_range),
                "pair_source": self.pair_source,
            },
            "hannay": {
                "closed_form": self.hannay_closed_form,
                "from_definition": self.hannay_from_definition,
                "loop_integral": self.hannay_loop_integral,
                "spread": self.hannay_spread,
                "closed_form_mod_2pi": _mod_2pi(self.hannay_closed_form),
            },
            "quantum": {
                "chi": list(self.chi),
                "chi_mod_2pi": [_mod_2pi(c) for c in self.chi],
                "gamma": list(self.gamma),
                "gamma_mod_2pi": [_mod_2pi(g) for g in self.gamma],
                "gamma_spacing_deviation": self.gamma_spacing_deviation,
                "relation_residual": self.relation_residual,
            },
            "diagnostics": dict(self.diagnostics),
            "caveats": [PAIR_CHOICE_CAVEAT],
        }

    def to_json(self):
        return render_json(self.to_dict()) + "\n"


@dataclass(frozen=True)
class RefusalReport:
    """Structured refusal naming the failed existence condition."""

    code: str
    message: str
    classification: dict = field(default_factory=dict)
    status: str = "refused"

    def to_dict(self):
        out = {
            "schema_version": SCHEMA_VERSION,
            "status": self.status,
            "code": self.code,
            "message": self.message,
        }
        if self.classification:
            out["classification"] = dict(self.classification)
        return out

    def to_json(self):
        return render_json(self.to_dict()) + "\n"


@dataclass(frozen=True)
class ClassificationReport:
    """Output of the classify stage (valid for every stability class)."""

    tau: float
    trace: float
    classification: str
    det_residual: float
    eigenvalue_magnitudes: tuple
    status: str = "ok"

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "status": self.status,
            "classification": {
                "kind": self.classification,
                "trace": self.trace,
                "det_residual": self.det_residual,
                "eigenvalue_magnitudes": list(self.eigenvalue_magnitudes),
            },
            "tau": self.tau,
        }

    def to_json(self):
        return render_json(self.to_dict()) + "\n"
