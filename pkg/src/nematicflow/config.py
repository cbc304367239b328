"""Simulation configuration: line-based `key = value` text format.

Rules: one `key = value` per line, `#` starts a comment, blank lines are
ignored, unknown and duplicate keys are rejected.  Scenario parameters use
dotted keys (scenario.k, scenario.amplitude, scenario.seed,
scenario.slope).  CLI overrides are applied after the file parses, with
the same validation.  The environment variable SIM_OUTPUT_DIR overrides
output_dir at run time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import INTEGRATORS, StepPolicy
from .errors import ConfigParseError, ConfigRangeError
from .scenarios import SCENARIO_NAMES, ScenarioSpec
from .spectral import Grid
from .state import PhysicsParams

__all__ = ["SimulationConfig", "load_config", "parse_pairs"]

_SCENARIO_PARAM_KEYS = {
    "scenario.k": int,
    "scenario.amplitude": float,
    "scenario.seed": int,
    "scenario.slope": float,
}

_KEY_TYPES = {
    "dim": int,
    "res": int,
    "length": float,
    "nu": float,
    "scenario": str,
    "dt": float,
    "cfl_factor": float,
    "integrator": str,
    "t_max": float,
    "monitor_max": float,
    "record_every": int,
    "snapshot_every": int,
    "output_dir": str,
    "oversample_linf": bool,
    **_SCENARIO_PARAM_KEYS,
}

_REQUIRED = ("dim", "res", "scenario", "t_max")


@dataclass(frozen=True)
class SimulationConfig:
    """Fully validated run configuration."""

    dim: int
    res: int
    scenario: ScenarioSpec
    t_max: float
    length: float = 2.0 * math.pi
    nu: float = 1.0
    dt: float | None = None
    cfl_factor: float = 0.5
    integrator: str = "IF-RK4"
    monitor_max: float = 1e18
    record_every: int = 10
    snapshot_every: int = 0
    output_dir: str = "."
    oversample_linf: bool = False

    def grid(self) -> Grid:
        return Grid(self.dim, self.res, self.length)

    def params(self) -> PhysicsParams:
        return PhysicsParams(nu=self.nu)

    def policy(self) -> StepPolicy:
        if self.dt is not None:
            return StepPolicy(t_max=self.t_max, dt=self.dt,
                              cfl_factor=None, integrator=self.integrator)
        return StepPolicy(t_max=self.t_max, cfl_factor=self.cfl_factor,
                          integrator=self.integrator)


def _parse_value(key: str, raw: str, lineno=None):
    kind = _KEY_TYPES[key]
    raw = raw.strip()
    try:
        if kind is bool:
            lowered = raw.lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"expected a boolean, got {raw!r}")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigParseError(f"bad value for {key}: {exc}", lineno) from exc


def parse_pairs(text: str) -> dict:
    """Parse config text into a raw key -> value dict; rejects malformed
    lines, unknown keys and duplicates with the offending line number."""
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected `key = value`, got {line!r}", lineno)
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in _KEY_TYPES:
            raise ConfigParseError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigParseError(f"duplicate key {key!r}", lineno)
        values[key] = _parse_value(key, raw, lineno)
    return values


def _require(values: dict):
    for key in _REQUIRED:
        if key not in values:
            raise ConfigRangeError(key, "required key missing")


def _check_range(key, value, ok, expected):
    if not ok:
        raise ConfigRangeError(key, f"must be {expected}, got {value}")


def from_values(values: dict) -> SimulationConfig:
    """Validate a raw key dict and build a SimulationConfig."""
    _require(values)

    dim = values["dim"]
    _check_range("dim", dim, dim in (2, 3), "2 or 3")
    res = values["res"]
    _check_range("res", res, res >= 8 and (res & (res - 1)) == 0,
                 "a power of two >= 8")
    length = values.get("length", 2.0 * math.pi)
    _check_range("length", length, length > 0, "positive")
    nu = values.get("nu", 1.0)
    _check_range("nu", nu, nu > 0, "positive")
    t_max = values["t_max"]
    _check_range("t_max", t_max, t_max > 0, "positive")
    dt = values.get("dt")
    if dt is not None:
        _check_range("dt", dt, dt > 0, "positive")
    cfl = values.get("cfl_factor", 0.5)
    _check_range("cfl_factor", cfl, 0 < cfl <= 1, "in (0, 1]")
    integrator = values.get("integrator", "IF-RK4")
    _check_range("integrator", integrator, integrator in INTEGRATORS,
                 f"one of {INTEGRATORS}")
    monitor_max = values.get("monitor_max", 1e18)
    _check_range("monitor_max", monitor_max, monitor_max > 0, "positive")
    record_every = values.get("record_every", 10)
    _check_range("record_every", record_every, record_every >= 1, ">= 1")
    snapshot_every = values.get("snapshot_every", 0)
    _check_range("snapshot_every", snapshot_every, snapshot_every >= 0, ">= 0")

    name = values["scenario"]
    _check_range("scenario", name, name in SCENARIO_NAMES,
                 f"one of {sorted(SCENARIO_NAMES)}")
    params = {}
    for dotted in _SCENARIO_PARAM_KEYS:
        if dotted in values:
            params[dotted.split(".", 1)[1]] = values[dotted]
    try:
        scenario = ScenarioSpec(name, params)
    except ValueError as exc:
        raise ConfigRangeError("scenario", str(exc)) from exc

    return SimulationConfig(
        dim=dim, res=res, scenario=scenario, t_max=t_max, length=length,
        nu=nu, dt=dt, cfl_factor=cfl, integrator=integrator,
        monitor_max=monitor_max, record_every=record_every,
        snapshot_every=snapshot_every,
        output_dir=values.get("output_dir", "."),
        oversample_linf=values.get("oversample_linf", False),
    )


def load_config(text: str, overrides=()) -> SimulationConfig:
    """Parse config text, apply `key=value` override strings, validate."""
    values = parse_pairs(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigParseError(f"override must be key=value, got {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip()
        if key not in _KEY_TYPES:
            raise ConfigParseError(f"unknown key {key!r} in override")
        values[key] = _parse_value(key, raw)
    return from_values(values)
