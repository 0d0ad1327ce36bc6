"""Experiment configuration: flat dotted-key text format with round-trip parsing.

The on-disk form is diff-friendly provenance: one ``section.key = value`` per
line, ``#`` comments, no nesting.  parse(serialize(cfg)) == cfg holds exactly
(floats are rendered with shortest round-trip decimals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .integrate import IntegratorConfig
from .model import TWO_PI, PhaseState

__all__ = ["ExperimentConfig", "ConfigError", "parse_config", "serialize_config"]


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: initial state, coupling, run length, methods, outputs."""

    x0: float = 0.0
    y0: float = 0.0
    xdot0: float = 0.0
    ydot0: float = 0.1
    eps: float = 0.1
    n_crossings: int = 0
    t_end: float = 0.0
    method: str = "split8"
    steps_per_period: int = 64
    drift_tolerance: float = 1e-9
    landing_substeps: int = 8
    modes: tuple[str, ...] = ("P2",)
    out_dir: str = "out"
    plots: bool = False
    seed: int = 0  # recorded for provenance; the core is deterministic
    sweep_eps: tuple[float, ...] = ()

    def validate(self) -> "ExperimentConfig":
        if self.eps < 0.0 or not math.isfinite(self.eps):
            raise ConfigError(f"run.eps must be finite and >= 0, got {self.eps}")
        if (self.n_crossings > 0) == (self.t_end > 0.0):
            raise ConfigError("exactly one of run.n_crossings and run.t_end must be positive")
        if self.steps_per_period < 4:
            raise ConfigError("integrator.steps_per_period must be >= 4")
        for m in self.modes:
            if m not in ("P1", "P2", "P3"):
                raise ConfigError(f"predict.modes entries must be P1/P2/P3, got {m!r}")
        for e in self.sweep_eps:
            if e < 0.0 or not math.isfinite(e):
                raise ConfigError(f"sweep.eps entries must be finite and >= 0, got {e}")
        try:
            self.integrator()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not all(
            math.isfinite(f) for f in (self.x0, self.y0, self.xdot0, self.ydot0)
        ):
            raise ConfigError("initial state must be finite")
        return self

    def initial_state(self) -> PhaseState:
        return PhaseState(x=self.x0, y=self.y0, xdot=self.xdot0, ydot=self.ydot0)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(
            method=self.method,
            step_size=TWO_PI / self.steps_per_period,
            drift_tolerance=self.drift_tolerance,
            landing_substeps=self.landing_substeps,
        )


_SCHEMA = {
    "initial.x0": ("x0", float),
    "initial.y0": ("y0", float),
    "initial.xdot0": ("xdot0", float),
    "initial.ydot0": ("ydot0", float),
    "run.eps": ("eps", float),
    "run.n_crossings": ("n_crossings", int),
    "run.t_end": ("t_end", float),
    "integrator.method": ("method", str),
    "integrator.steps_per_period": ("steps_per_period", int),
    "integrator.drift_tolerance": ("drift_tolerance", float),
    "integrator.landing_substeps": ("landing_substeps", int),
    "predict.modes": ("modes", "strlist"),
    "output.dir": ("out_dir", str),
    "output.plots": ("plots", bool),
    "provenance.seed": ("seed", int),
    "sweep.eps": ("sweep_eps", "floatlist"),
}

_FIELD_TO_KEY = {attr: key for key, (attr, _) in _SCHEMA.items()}


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_render(v) for v in value)
    return str(value)


def serialize_config(cfg: ExperimentConfig) -> str:
    lines = ["# hhslow experiment configuration"]
    for f in fields(cfg):
        lines.append(f"{_FIELD_TO_KEY[f.name]} = {_render(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def _parse_value(key: str, raw: str, kind):
    raw = raw.strip()
    try:
        if kind is float:
            return float(raw)
        if kind is int:
            return int(raw)
        if kind is bool:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind == "strlist":
            return tuple(s.strip() for s in raw.split(",") if s.strip())
        if kind == "floatlist":
            return tuple(float(s) for s in raw.split(",") if s.strip())
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from exc


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat dotted-key format; unknown keys are errors."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, kind = _SCHEMA[key]
        values[attr] = _parse_value(key, raw, kind)
    return ExperimentConfig(**values).validate()
