"""Run configuration: one TOML document describes one experiment.

Numbers are in natural units (tau sets the time scale).  Coefficients are
Fourier tables: a constant, an optional base period (default tau), and a
``harmonics`` array of [order, cos_amp, sin_amp] rows.  Parsing is lossless:
serializing a parsed config and re-parsing yields a semantically identical
configuration.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .errors import ConfigError
from .model import OscillatorSpec, PeriodicFunction
from .report import format_float

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

COEFFICIENT_NAMES = ("M", "w_sq", "a", "b", "F", "f")
_COEFF_DEFAULTS = {"M": 1.0, "w_sq": 1.0, "a": 0.0, "b": 0.0, "F": 0.0,
                   "f": 0.0}


@dataclass(frozen=True)
class RunConfig:
    spec: OscillatorSpec
    ode_tol: float = 1e-10
    period_cap: int = 64
    pair_mode: str = "canonical"
    pair_u0: tuple = ()
    pair_v0: tuple = ()
    t0: float = 0.0
    m_max: int = 10
    out_dir: str = "out"
    out_format: str = "json"

    def __post_init__(self):
        if self.pair_mode not in ("canonical", "explicit"):
            raise ConfigError(
                f"pair mode must be 'canonical' or 'explicit', "
                f"got {self.pair_mode!r}")
        if self.pair_mode == "explicit" and \
                (len(self.pair_u0) != 2 or len(self.pair_v0) != 2):
            raise ConfigError(
                "explicit pair mode needs u0 = [u, du/dt] and "
                "v0 = [v, dv/dt]")
        if self.out_format not in ("json", "csv"):
            raise ConfigError(
                f"output format must be 'json' or 'csv', got "
                f"{self.out_format!r}")
        if self.ode_tol <= 0:
            raise ConfigError("solver tolerance must be positive")
        if self.m_max < 1:
            raise ConfigError("m_max must be >= 1")

    @property
    def pair_init(self):
        if self.pair_mode == "explicit":
            return (tuple(self.pair_u0), tuple(self.pair_v0))
        return None

    def to_dict(self):
        spec_d = {"tau": self.spec.tau, "hbar": self.spec.hbar}
        for name in COEFFICIENT_NAMES:
            spec_d[name] = getattr(self.spec, name).to_dict()
        out = {
            "schema_version": 1,
            "spec": spec_d,
            "solver": {"ode_tol": self.ode_tol,
                       "period_cap": self.period_cap},
            "pair": {"mode": self.pair_mode},
            "run": {"t0": self.t0, "m_max": self.m_max},
            "output": {"dir": self.out_dir, "format": self.out_format},
        }
        if self.pair_mode == "explicit":
            out["pair"]["u0"] = list(self.pair_u0)
            out["pair"]["v0"] = list(self.pair_v0)
        return out

    def to_toml(self):
        return dumps_toml(self.to_dict())


def _coefficient_from_table(name, table, tau):
    if not isinstance(table, dict):
        raise ConfigError(f"coefficient {name} must be a table")
    unknown = set(table) - {"constant", "period", "harmonics"}
    if unknown:
        raise ConfigError(
            f"coefficient {name}: unknown keys {sorted(unknown)}; only "
            "Fourier tables (constant/period/harmonics) are supported")
    constant = float(table.get("constant", _COEFF_DEFAULTS[name]))
    period = float(table.get("period", tau))
    harmonics = []
    for row in table.get("harmonics", []):
        if len(row) != 3:
            raise ConfigError(
                f"coefficient {name}: each harmonic is [order, cos_amp, "
                f"sin_amp], got {row!r}")
        harmonics.append((int(row[0]), float(row[1]), float(row[2])))
    return PeriodicFunction(base_period=period, constant=constant,
                            harmonics=tuple(harmonics))


def config_from_dict(doc):
    try:
        spec_d = doc.get("spec", {})
        if "tau" not in spec_d:
            raise ConfigError("spec.tau is required")
        tau = float(spec_d["tau"])
        coeffs = {
            name: _coefficient_from_table(name, spec_d.get(name, {}), tau)
            for name in COEFFICIENT_NAMES
        }
        spec = OscillatorSpec(tau=tau, hbar=float(spec_d.get("hbar", 1.0)),
                              **coeffs)
        solver = doc.get("solver", {})
        pair = doc.get("pair", {})
        run = doc.get("run", {})
        output = doc.get("output", {})
        return RunConfig(
            spec=spec,
            ode_tol=float(solver.get("ode_tol", 1e-10)),
            period_cap=int(solver.get("period_cap", 64)),
            pair_mode=str(pair.get("mode", "canonical")),
            pair_u0=tuple(float(v) for v in pair.get("u0", ())),
            pair_v0=tuple(float(v) for v in pair.get("v0", ())),
            t0=float(run.get("t0", 0.0)),
            m_max=int(run.get("m_max", 10)),
            out_dir=str(output.get("dir", "out")),
            out_format=str(output.get("format", "json")),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc


def parse_config(text):
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    return config_from_dict(doc)


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def set_by_path(doc, dotted_key, value):
    """Set a nested value (e.g. 'spec.a.constant') in a config dict."""
    keys = dotted_key.split(".")
    node = doc
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot descend into {dotted_key!r}")
    node[keys[-1]] = value


# -- TOML emission ------------------------------------------------------------


def _toml_scalar(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = format_float(value)
        # TOML floats need a decimal point or exponent.
        if text.isdigit() or (text.startswith("-") and text[1:].isdigit()):
            text += ".0"
        return text
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    raise ConfigError(f"cannot serialize {type(value)!r} to TOML")


def dumps_toml(doc, prefix=""):
    """Serialize a nested dict of scalars/arrays/tables to TOML text."""
    lines = []
    tables = []
    for key, value in doc.items():
        if isinstance(value, dict):
            tables.append((key, value))
        else:
            lines.append(f"{key} = {_toml_scalar(value)}")
    text = "\n".join(lines)
    for key, value in tables:
        name = f"{prefix}{key}"
        body = dumps_toml(value, prefix=name + ".")
        text += f"\n\n[{name}]\n{body}" if body else f"\n\n[{name}]"
    return text.strip() + ("\n" if not prefix else "")
