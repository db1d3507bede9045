"""Config-file ingestion for the command-line tool.

Config files are TOML. Every key is optional; unknown sections or keys are
rejected so typos do not silently fall back to defaults. See README.md for the
full grammar.
"""
from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

import numpy as np

from .device import ChargeQubitParams, CouplerParams, DeviceParams
from .engine import CycleConfig
from .states import QubitParams

SWEEPABLE = (
    "system.gap",
    "system.temperature",
    "demon.gap",
    "demon.temperature",
    "feedback.theta",
    "feedback.phi",
)
INITIAL_STATES = ("thermal", "ground", "excited", "bell")

_SCHEMA = {
    "system": {"gap": float, "temperature": float, "gamma": float},
    "demon": {"gap": float, "temperature": float, "gamma": float},
    "feedback": {"kind": str, "theta": float, "phi": float},
    "thermalization": {"initial": str, "t_max": float, "count": int},
    "sweep": {"axis": list, "workers": int},
    "device": {
        "e_c_s": float, "e_c_d": float, "n_g_s": float, "n_g_d": float,
        "t_s": float, "t_d": float, "e_0": float, "flux_ratio": float,
        "theta": float, "rotation_time": float, "relaxation_time": float,
        "thermalization_factor": float, "cycle_time": float, "otto_limit": bool,
    },
    "output": {"path": str, "format": str, "plot": bool},
}
_AXIS_KEYS = {"name": str, "min": float, "max": float, "count": int, "scale": str}
_PI_EXPR = re.compile(r"^\s*([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


class ConfigError(ValueError):
    """Malformed or inconsistent config; the message names the offending field."""


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def values(self) -> list[float]:
        if self.scale == "log":
            return [float(v) for v in np.geomspace(self.min, self.max, self.count)]
        return [float(v) for v in np.linspace(self.min, self.max, self.count)]


@dataclass(frozen=True)
class RunConfig:
    cycle: CycleConfig
    gamma_s: float = 1.0
    gamma_d: float = 1.0
    initial: str = "excited"
    t_max: float = 20.0
    t_count: int = 201
    axes: tuple[SweepAxis, ...] = ()
    workers: int = 1
    device: DeviceParams = field(default_factory=DeviceParams)
    output_path: str | None = None
    output_format: str | None = None
    plot: bool = False
    seed: int = 0


def _pi_expr(text: str) -> float | None:
    """Parse ``pi``, ``pi/2``, ``-pi/4``, ``3*pi/2``; None if not of that form."""
    m = _PI_EXPR.match(text)
    if not m:
        return None
    coef = m.group(1)
    if coef in ("", "+"):
        c = 1.0
    elif coef == "-":
        c = -1.0
    else:
        c = float(coef)
    return c * math.pi / (float(m.group(2)) if m.group(2) else 1.0)


def _check_type(where: str, value, kind):
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if kind is float and isinstance(value, str):
        parsed = _pi_expr(value)
        if parsed is None:
            raise ConfigError(f"{where}: expected a number or pi expression, got {value!r}")
        return parsed
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ConfigError(f"{where}: expected {kind.__name__}, got {type(value).__name__} {value!r}")
    return value


def _validated(raw: dict) -> dict:
    out = {}
    for key, body in raw.items():
        if key == "seed":
            out["seed"] = _check_type("seed", body, int)
            continue
        if key not in _SCHEMA:
            raise ConfigError(f"unknown section [{key}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{key}] must be a table")
        section = {}
        for k, v in body.items():
            if k not in _SCHEMA[key]:
                raise ConfigError(f"[{key}] unknown key {k!r}")
            section[k] = _check_type(f"{key}.{k}", v, _SCHEMA[key][k])
        out[key] = section
    return out


def _axes(sweep: dict) -> tuple[SweepAxis, ...]:
    axes = []
    for i, entry in enumerate(sweep.get("axis", [])):
        where = f"sweep.axis[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where} must be a table")
        for k in entry:
            if k not in _AXIS_KEYS:
                raise ConfigError(f"{where}: unknown key {k!r}")
        missing = [k for k in ("name", "min", "max", "count") if k not in entry]
        if missing:
            raise ConfigError(f"{where}: missing {', '.join(missing)}")
        vals = {k: _check_type(f"{where}.{k}", v, _AXIS_KEYS[k]) for k, v in entry.items()}
        ax = SweepAxis(**vals)
        if ax.name not in SWEEPABLE:
            raise ConfigError(f"{where}.name: {ax.name!r} is not one of {', '.join(SWEEPABLE)}")
        if ax.count < 2:
            raise ConfigError(f"{where}.count: need at least 2 points, got {ax.count}")
        if not ax.min < ax.max:
            raise ConfigError(f"{where}: min must be < max")
        if ax.scale not in ("linear", "log"):
            raise ConfigError(f"{where}.scale: expected 'linear' or 'log'")
        if ax.scale == "log" and ax.min <= 0:
            raise ConfigError(f"{where}: log scale needs min > 0")
        axes.append(ax)
    return tuple(axes)


def _device(sec: dict) -> DeviceParams:
    base = DeviceParams()
    try:
        s = ChargeQubitParams(sec.get("e_c_s", base.s.e_c), sec.get("n_g_s", base.s.n_g),
                              sec.get("t_s", base.s.temperature))
        d = ChargeQubitParams(sec.get("e_c_d", base.d.e_c), sec.get("n_g_d", base.d.n_g),
                              sec.get("t_d", base.d.temperature))
        c = CouplerParams(sec.get("e_0", base.coupler.e_0), sec.get("flux_ratio", base.coupler.flux_ratio))
    except ValueError as exc:
        raise ConfigError(f"[device] {exc}") from None
    return DeviceParams(
        s=s, d=d, coupler=c,
        theta=sec.get("theta", base.theta),
        rotation_time=sec.get("rotation_time", base.rotation_time),
        relaxation_time=sec.get("relaxation_time", base.relaxation_time),
        thermalization_factor=sec.get("thermalization_factor", base.thermalization_factor),
        cycle_time=sec.get("cycle_time", base.cycle_time),
        otto_limit=sec.get("otto_limit", base.otto_limit),
    )


def parse_config(text: str) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    cfg = _validated(raw)
    system, demon = cfg.get("system", {}), cfg.get("demon", {})
    fb = cfg.get("feedback", {})
    kind = fb.get("kind", "cev" if "theta" in fb or "phi" in fb else "cnot")
    if kind not in ("cnot", "cev"):
        raise ConfigError(f"feedback.kind: expected 'cnot' or 'cev', got {kind!r}")
    if kind == "cnot" and not math.isclose(fb.get("theta", math.pi / 2), math.pi / 2, abs_tol=1e-15):
        raise ConfigError("feedback.theta: kind 'cnot' requires theta = pi/2")
    try:
        cycle = CycleConfig(
            s=QubitParams(system.get("gap", 2.0), system.get("temperature", 2.0)),
            d=QubitParams(demon.get("gap", 1.0), demon.get("temperature", 0.5)),
            theta=fb.get("theta", math.pi / 2),
            phi=fb.get("phi", 0.0),
            feedback=kind,
        )
    except ValueError as exc:
        raise ConfigError(f"[system]/[demon]/[feedback]: {exc}") from None

    th = cfg.get("thermalization", {})
    initial = th.get("initial", "excited")
    if initial not in INITIAL_STATES:
        raise ConfigError(f"thermalization.initial: expected one of {', '.join(INITIAL_STATES)}, got {initial!r}")
    gammas = (system.get("gamma", 1.0), demon.get("gamma", 1.0))
    if min(gammas) <= 0:
        raise ConfigError("system.gamma / demon.gamma must be > 0")
    t_count = th.get("count", 201)
    if t_count < 2:
        raise ConfigError("thermalization.count: need at least 2 points")
    t_max = th.get("t_max", 20.0 / min(gammas))
    if t_max <= 0:
        raise ConfigError("thermalization.t_max must be > 0")

    sweep = cfg.get("sweep", {})
    out = cfg.get("output", {})
    fmt = out.get("format")
    if fmt is not None and fmt not in ("csv", "json"):
        raise ConfigError(f"output.format: expected 'csv' or 'json', got {fmt!r}")
    workers = sweep.get("workers", 1)
    if workers < 1:
        raise ConfigError("sweep.workers must be >= 1")
    return RunConfig(
        cycle=cycle,
        gamma_s=gammas[0],
        gamma_d=gammas[1],
        initial=initial,
        t_max=t_max,
        t_count=t_count,
        axes=_axes(sweep),
        workers=workers,
        device=_device(cfg.get("device", {})),
        output_path=out.get("path"),
        output_format=fmt,
        plot=out.get("plot", False),
        seed=cfg.get("seed", 0),
    )


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return parse_config("")
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(p)!r}: {exc.strerror}") from None
    return parse_config(text)
