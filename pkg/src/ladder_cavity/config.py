"""Line-oriented ``key = value`` run configuration.

Rules: one assignment per line, ``#`` starts a comment, blank lines are
ignored, unknown or repeated keys are errors. Floating-point values accept
``pi``, ``pi/N``, ``N*pi`` and ``N*pi/M`` (optionally signed) besides plain
literals. The six physical keys ``g1 g2 gamma2 kappa omega1 omega2`` are
mandatory; everything else has a default.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace

from .dressed import SolverConfig, SteadyMethod
from .errors import ParameterError
from .model import SystemParams
from .oracle import OracleParams
from .sweep import SweepParam, SweepSpec, grid

__all__ = ["ConfigError", "RunConfig", "parse_config", "config_echo", "read_echo", "PROFILES"]

MANDATORY = ("g1", "g2", "gamma2", "kappa", "omega1", "omega2")

_PI_RE = re.compile(
    r"^(?P<sign>[+-]?)\s*(?:(?P<num>\d+(?:\.\d*)?)\s*\*\s*)?pi(?:\s*/\s*(?P<den>\d+(?:\.\d*)?))?$")


class ConfigError(ParameterError):
    def __init__(self, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


def parse_float(text):
    text = text.strip()
    m = _PI_RE.match(text)
    if m:
        num = float(m["num"]) if m["num"] else 1.0
        den = float(m["den"]) if m["den"] else 1.0
        if den == 0:
            raise ValueError("division by zero")
        value = num * math.pi / den
        return -value if m["sign"] == "-" else value
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _parse_int(text):
    value = float(text)
    if value != int(value):
        raise ValueError("expected an integer")
    return int(value)


def _parse_delta(text):
    text = text.strip()
    return None if text.lower() == "auto" else parse_float(text)


# key -> (parser, default); None default marks a mandatory key
_SCHEMA = {
    "g1": (parse_float, None),
    "g2": (parse_float, None),
    "gamma2": (parse_float, None),
    "kappa": (parse_float, None),
    "omega1": (parse_float, None),
    "omega2": (parse_float, None),
    "gamma1": (parse_float, 1.0),
    "phi1": (parse_float, 0.0),
    "phi2": (parse_float, 0.0),
    "rel_tol": (parse_float, 1e-8),
    "abs_tol": (parse_float, 1e-12),
    "tail_tol": (parse_float, 1e-10),
    "n_max_initial": (_parse_int, 16),
    "n_max_cap": (_parse_int, 4096),
    "steady_method": (lambda s: SteadyMethod(s.strip().upper()), SteadyMethod.LINEAR_SOLVE),
    "integrator": (lambda s: s.strip().upper(), "DOP853"),
    "max_steps": (_parse_int, 400),
    "delta_c": (_parse_delta, "auto"),
    "oracle_n_max": (_parse_int, 20),
    "secular_warn": (parse_float, 0.1),
    "secular_violation": (parse_float, 0.3),
    "sweep_x": (lambda s: SweepParam(s.strip().lower()), SweepParam.PHI2),
    "sweep_x_start": (parse_float, 0.0),
    "sweep_x_stop": (parse_float, 2 * math.pi),
    "sweep_x_count": (_parse_int, 121),
    "sweep_y": (lambda s: SweepParam(s.strip().lower()), SweepParam.RATIO),
    "sweep_y_start": (parse_float, 0.05),
    "sweep_y_stop": (parse_float, 3.0),
    "sweep_y_count": (_parse_int, 60),
}

PROFILES = {
    "fast": {"kappa": 0.1},
    "paper": {"kappa": 1e-3, "n_max_cap": 1024},
}


@dataclass(frozen=True)
class Axis:
    param: SweepParam
    start: float
    stop: float
    count: int


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs apart from output path and worker count."""

    params: SystemParams
    solver: SolverConfig
    delta_c: float | None = None
    oracle_n_max: int = 20
    secular_warn: float = 0.1
    secular_violation: float = 0.3
    sweep_x: Axis = Axis(SweepParam.PHI2, 0.0, 2 * math.pi, 121)
    sweep_y: Axis = Axis(SweepParam.RATIO, 0.05, 3.0, 60)

    @property
    def oracle_params(self):
        return OracleParams(self.params, self.delta_c)

    def sweep_spec(self):
        return SweepSpec(self.sweep_x.param, grid(self.sweep_x.start, self.sweep_x.stop, self.sweep_x.count),
                         self.sweep_y.param, grid(self.sweep_y.start, self.sweep_y.stop, self.sweep_y.count),
                         self.params, self.solver)

    def with_profile(self, name):
        if name is None:
            return self
        try:
            overrides = PROFILES[name]
        except KeyError:
            raise ConfigError(f"unknown profile {name!r}") from None
        values = _flatten(self)
        values.update(overrides)
        return _build(values)


def _flatten(cfg: RunConfig):
    values = {f.name: getattr(cfg.params, f.name) for f in fields(SystemParams)}
    values.update({k: getattr(cfg.solver, k) for k in
                   ("rel_tol", "abs_tol", "tail_tol", "n_max_initial", "n_max_cap",
                    "steady_method", "integrator", "max_steps")})
    values["delta_c"] = "auto" if cfg.delta_c is None else cfg.delta_c
    values["oracle_n_max"] = cfg.oracle_n_max
    values["secular_warn"] = cfg.secular_warn
    values["secular_violation"] = cfg.secular_violation
    for axis_name in ("sweep_x", "sweep_y"):
        axis = getattr(cfg, axis_name)
        values[axis_name] = axis.param
        values[f"{axis_name}_start"] = axis.start
        values[f"{axis_name}_stop"] = axis.stop
        values[f"{axis_name}_count"] = axis.count
    return values


def _build(values, line_of=None):
    line_of = line_of or {}

    def fail(exc, *keys):
        lines = [line_of[k] for k in keys if k in line_of]
        raise ConfigError(str(exc), min(lines) if lines else None) from exc

    phys = {f.name: values[f.name] for f in fields(SystemParams)}
    try:
        params = SystemParams(**phys)
    except ParameterError as exc:
        fail(exc, *[k for k in phys if k in str(exc)] or phys)
    solver_keys = ("rel_tol", "abs_tol", "tail_tol", "n_max_initial", "n_max_cap",
                   "steady_method", "integrator", "max_steps")
    try:
        solver = SolverConfig(**{k: values[k] for k in solver_keys})
    except ParameterError as exc:
        fail(exc, *[k for k in solver_keys if k in str(exc)] or solver_keys)
    if values["oracle_n_max"] < 1:
        fail(ParameterError("oracle_n_max must be >= 1"), "oracle_n_max")
    if not 0 < values["secular_warn"] <= values["secular_violation"]:
        fail(ParameterError("need 0 < secular_warn <= secular_violation"),
             "secular_warn", "secular_violation")
    axes = {}
    for name in ("sweep_x", "sweep_y"):
        axes[name] = Axis(values[name], values[f"{name}_start"], values[f"{name}_stop"],
                          values[f"{name}_count"])
    delta = values["delta_c"]
    cfg = RunConfig(params, solver, None if delta == "auto" else delta,
                    values["oracle_n_max"], values["secular_warn"], values["secular_violation"],
                    axes["sweep_x"], axes["sweep_y"])
    sweep_keys = [k for k in values if k.startswith("sweep_")]
    try:
        cfg.sweep_spec()
    except ParameterError as exc:
        fail(exc, *sweep_keys)
    return cfg


def parse_config(text) -> RunConfig:
    """Parse and validate a configuration text; errors carry line numbers."""
    values = {}
    line_of = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {line_of[key]})", lineno)
        parser = _SCHEMA[key][0]
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})", lineno) from None
        line_of[key] = lineno
    missing = [k for k in MANDATORY if k not in values]
    if missing:
        raise ConfigError(f"missing mandatory key(s): {', '.join(missing)}")
    for key, (_, default) in _SCHEMA.items():
        values.setdefault(key, default)
    return _build(values, line_of)


def _render(value):
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def config_echo(cfg: RunConfig):
    """``key = value`` lines that re-parse to ``cfg``; floats use shortest repr."""
    return [f"{k} = {_render(v)}" for k, v in _flatten(cfg).items()]


def read_echo(text) -> RunConfig:
    """Re-parse the ``# key = value`` header block of an emitted CSV file."""
    lines = []
    for raw in text.splitlines():
        if not raw.startswith("#"):
            break
        lines.append(raw[1:])
    return parse_config("\n".join(lines))


def with_overrides(cfg: RunConfig, **params) -> RunConfig:
    return replace(cfg, params=replace(cfg.params, **params))
