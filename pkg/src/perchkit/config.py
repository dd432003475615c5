"""Flat key-value run configuration (YAML text).

Keys are dotted paths such as ``gains.k0`` or ``scenario.drogon-12.xP``.
Angles are written in degrees under keys ending in ``_deg`` and converted to
radians only when domain objects are built, so that load, dump and load again
gives back the same values bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import yaml

from .control import Gains
from .errors import ArgumentError
from .params import AeroCoeffs, PlatformParams, preset as load_preset
from .planner import FeasibilityConfig, FeasibilityLimits, ManeuverBoundary, feasibility_limits
from .sim import SCENARIOS, Scenario
from .state import ModelMode

__all__ = ["Config", "load_config", "dump_config", "parse_config", "SCHEMA"]

# angle fields of each section (stored in radians by the domain types)
_ANGLES = {
    "gains": {"delta_e_max"},
    "limits": {"alpha_s", "gamma_min", "gammaP_mec"},
    "scenario": {"gamma0"},
}
_LIMIT_OVERRIDES = ("VP_min", "VdotD_min", "gammadotT_max")
_SIM_KEYS = {
    "mode": str,
    "dt": float,
    "design_plant": bool,
    "horizon_factor": float,
    "preview": float,
    "q_ref_tau": float,
    "strategy": str,
}
_SCENARIO_KEYS = ("gamma0", "V0", "xP", "zP")


def _field_kinds(cls) -> dict:
    return {f.name: list if isinstance(f.default, tuple) else float for f in fields(cls)}


def _section_schema(section: str, kinds: dict) -> dict:
    angles = _ANGLES.get(section, set())
    return {(f"{k}_deg" if k in angles else k): v for k, v in kinds.items()}


SCHEMA = {
    "params": _section_schema("params", _field_kinds(PlatformParams)),
    "coeffs": _section_schema("coeffs", _field_kinds(AeroCoeffs)),
    "gains": _section_schema("gains", _field_kinds(Gains)),
    "limits": {**_section_schema("limits", _field_kinds(FeasibilityConfig)), **{k: float for k in _LIMIT_OVERRIDES}},
    "sim": dict(_SIM_KEYS),
    "scenario": _section_schema("scenario", {k: float for k in _SCENARIO_KEYS}),
}


def _coerce(key: str, kind, value):
    if kind is bool:
        if not isinstance(value, bool):
            raise ArgumentError(f"{key}: expected true/false, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ArgumentError(f"{key}: expected a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, (list, tuple)) or not all(_is_number(v) for v in value):
            raise ArgumentError(f"{key}: expected a list of numbers, got {value!r}")
        return [float(v) for v in value]
    if not _is_number(value):
        raise ArgumentError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _to_rad(section: str, values: dict) -> dict:
    out = {}
    for k, v in values.items():
        if k.endswith("_deg") and k[:-4] in _ANGLES.get(section, ()):
            name = k[:-4]
            out[name] = tuple(math.radians(x) for x in v) if isinstance(v, list) else math.radians(v)
        else:
            out[k] = tuple(v) if isinstance(v, list) else v
    return out


@dataclass
class Config:
    """Validated configuration; angle entries stay in degrees as written."""

    preset: str = "eflap"
    params: dict = field(default_factory=dict)
    coeffs: dict = field(default_factory=dict)
    gains: dict = field(default_factory=dict)
    limits: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    scenarios: dict = field(default_factory=dict)  # name -> {gamma0_deg, V0, xP, zP}
    run: list = field(default_factory=list)  # scenario ids to run by default
    output_dir: str | None = None

    def platform(self) -> PlatformParams:
        base, _ = load_preset(self.preset)
        return replace(base, **_to_rad("params", self.params))

    def aero(self) -> AeroCoeffs:
        _, base = load_preset(self.preset)
        return replace(base, **_to_rad("coeffs", self.coeffs))

    def gain_set(self) -> Gains:
        return Gains(**_to_rad("gains", self.gains))

    def feasibility_config(self) -> FeasibilityConfig:
        kw = {k: v for k, v in _to_rad("limits", self.limits).items() if k not in _LIMIT_OVERRIDES}
        return FeasibilityConfig(**kw)

    def feasibility(self) -> FeasibilityLimits:
        lim = feasibility_limits(self.platform(), self.aero(), self.feasibility_config())
        over = {k: v for k, v in self.limits.items() if k in _LIMIT_OVERRIDES}
        return replace(lim, **over) if over else lim

    def mode(self) -> ModelMode:
        return ModelMode.parse(self.sim.get("mode", "full"))

    def scenario_names(self) -> list[str]:
        return sorted(set(SCENARIOS) | set(self.scenarios))

    def scenario(self, name: str, mode=None) -> Scenario:
        if name in self.scenarios:
            v = _to_rad("scenario", self.scenarios[name])
            base = SCENARIOS.get(name)
            if base is not None:
                kw = {k: v.get(k, getattr(base.boundary, k)) for k in _SCENARIO_KEYS}
            else:
                missing = [k for k in _SCENARIO_KEYS if k not in v]
                if missing:
                    raise ArgumentError(f"scenario {name!r} lacks {', '.join(missing)}")
                kw = {k: v[k] for k in _SCENARIO_KEYS}
            boundary = ManeuverBoundary(**kw)
        elif name in SCENARIOS:
            boundary = SCENARIOS[name].boundary
        else:
            raise ArgumentError(f"unknown scenario {name!r}; choose from {self.scenario_names()}")
        sim = {k: v for k, v in self.sim.items() if k != "mode"}
        return Scenario(
            name,
            boundary,
            params=self.platform(),
            coeffs=self.aero(),
            gains=self.gain_set(),
            mode=ModelMode.parse(mode) if mode is not None else self.mode(),
            limits=self.feasibility(),
            **sim,
        )

    def to_flat(self) -> dict:
        out: dict = {"preset": self.preset}
        for section in ("params", "coeffs", "gains", "limits", "sim"):
            for k, v in getattr(self, section).items():
                out[f"{section}.{k}"] = v
        for name, vals in self.scenarios.items():
            for k, v in vals.items():
                out[f"scenario.{name}.{k}"] = v
        if self.run:
            out["run"] = list(self.run)
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out


def parse_config(flat: dict | None) -> Config:
    """Validate a flat mapping; unknown or mistyped keys raise ArgumentError."""
    flat = flat or {}
    if not isinstance(flat, dict):
        raise ArgumentError("configuration must be a mapping of dotted keys")
    cfg = Config()
    for key, value in flat.items():
        if not isinstance(key, str):
            raise ArgumentError(f"configuration key {key!r} is not a string")
        if key == "preset":
            cfg.preset = _coerce(key, str, value)
            load_preset(cfg.preset)
            continue
        if key == "run":
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ArgumentError("run: expected a list of scenario names")
            cfg.run = list(value)
            continue
        if key == "output_dir":
            cfg.output_dir = _coerce(key, str, value)
            continue
        section, _, rest = key.partition(".")
        if section == "scenario":
            name, _, leaf = rest.rpartition(".")
            if not name or leaf not in SCHEMA["scenario"]:
                raise ArgumentError(f"unknown configuration key {key!r}")
            cfg.scenarios.setdefault(name, {})[leaf] = _coerce(key, SCHEMA["scenario"][leaf], value)
            continue
        if section not in SCHEMA or rest not in SCHEMA[section]:
            raise ArgumentError(f"unknown configuration key {key!r}")
        getattr(cfg, section)[rest] = _coerce(key, SCHEMA[section][rest], value)
    if "mode" in cfg.sim:
        ModelMode.parse(cfg.sim["mode"])
    # build once so that value-level errors surface at load time
    cfg.platform(), cfg.aero(), cfg.gain_set(), cfg.feasibility_config()
    for name in cfg.scenarios:
        cfg.scenario(name)
    unknown = [n for n in cfg.run if n not in cfg.scenario_names()]
    if unknown:
        raise ArgumentError(f"run lists unknown scenarios: {', '.join(unknown)}")
    return cfg


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ArgumentError(f"cannot read configuration {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ArgumentError(f"configuration {path} is not valid YAML: {exc}") from None
    return parse_config(data)


def dump_config(cfg: Config, path: str | Path | None = None) -> str:
    text = yaml.safe_dump(cfg.to_flat(), sort_keys=True)
    if path is not None:
        Path(path).write_text(text)
    return text
