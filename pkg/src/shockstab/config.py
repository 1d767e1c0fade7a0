"""Scenario configuration: JSON schema, semantic checks and hashing."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from shockstab.entropy import DEFAULT_C1, DEFAULT_C2, ShockDatum
from shockstab.flux import KINDS, FluxModel
from shockstab.fronttrack import DEFAULT_DELTA, DEFAULT_EVENT_CAP, POLICIES, RESOLVE, Profile
from shockstab.measure import Cone, Rect

SCHEMA_VERSION = "1"

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["flux", "initial", "T", "shock"],
    "properties": {
        "id": {"type": "string"},
        "flux": {
            "type": "object",
            "additionalProperties": False,
            "required": ["name"],
            "properties": {
                "name": {"enum": list(KINDS)},
                "params": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"a": _num, "b": _num},
                },
            },
        },
        "initial": {
            "type": "object",
            "additionalProperties": False,
            "required": ["breakpoints", "values"],
            "properties": {
                "breakpoints": {"type": "array", "items": _num},
                "values": {"type": "array", "items": _num, "minItems": 1},
                "admissibility": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["index", "admissible"],
                        "properties": {
                            "index": {"type": "integer", "minimum": 0},
                            "admissible": {"type": "boolean"},
                        },
                    },
                },
            },
        },
        "policy": {"enum": list(POLICIES)},
        "delta": _pos,
        "T": _pos,
        "shock": {
            "type": "object",
            "additionalProperties": False,
            "required": ["u_ell", "u_r"],
            "properties": {"u_ell": _num, "u_r": _num},
        },
        "windows": {"type": "array", "items": _pos, "minItems": 1},
        "times": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "constants": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "C_thm": _num, "c_drift": _num, "C1": _num, "C2": _num,
                "drift_exponent": _num,
            },
        },
        "event_cap": {"type": "integer", "minimum": 1},
        "regions": {
            "type": "array",
            "items": {
                "oneOf": [
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["type", "t0", "t1"],
                        "properties": {"type": {"const": "rect"}, "t0": _num, "t1": _num,
                                       "a": _num, "b": _num},
                    },
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["type", "R", "S", "t"],
                        "properties": {"type": {"const": "cone"}, "R": _pos,
                                       "S": {"type": "number", "minimum": 0}, "t": _pos},
                    },
                ],
            },
        },
        "var_check": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "pairs": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Constants:
    C_thm: float = 68.0
    c_drift: float = 1.0 / 24.0
    C1: float = DEFAULT_C1
    C2: float = DEFAULT_C2
    drift_exponent: float = 3.0

    def as_dict(self):
        return {"C_thm": self.C_thm, "c_drift": self.c_drift, "C1": self.C1,
                "C2": self.C2, "drift_exponent": self.drift_exponent}


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    id: str
    model: FluxModel
    initial: Profile
    admissible: tuple
    policy: str
    delta: float
    T: float
    shock: ShockDatum
    windows: tuple = (2.0, 5.0, 10.0)
    times: tuple | None = None
    constants: Constants = field(default_factory=Constants)
    event_cap: int = DEFAULT_EVENT_CAP
    var_pairs: int = 50
    var_seed: int = 0
    output_dir: str | None = None
    regions: tuple = ()
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def hash(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def parse_config(raw: dict) -> ScenarioConfig:
    """Validate ``raw`` (schema first, then semantics) and build a config."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from None

    init = raw["initial"]
    bps, vals = init["breakpoints"], init["values"]
    if len(vals) != len(bps) + 1:
        raise ConfigError("initial: need len(values) == len(breakpoints) + 1")
    if any(b >= c for b, c in zip(bps, bps[1:])):
        raise ConfigError("initial: breakpoints must be strictly increasing")
    if any(v == w for v, w in zip(vals, vals[1:])):
        raise ConfigError("initial: adjacent values must differ")
    admissible = [True] * len(bps)
    for item in init.get("admissibility", []):
        if item["index"] >= len(bps):
            raise ConfigError(f"initial/admissibility: index {item['index']} out of range")
        admissible[item["index"]] = item["admissible"]

    sh = raw["shock"]
    if not sh["u_ell"] > sh["u_r"]:
        raise ConfigError("shock: need u_ell > u_r")
    T = float(raw["T"])
    times = raw.get("times")
    if times is not None and any(t > T for t in times):
        raise ConfigError("times: every sample time must lie in [0, T]")
    try:
        model = FluxModel.from_spec(raw["flux"])
    except ValueError as exc:
        raise ConfigError(f"flux: {exc}") from None

    regions = []
    for item in raw.get("regions", []):
        try:
            if item["type"] == "rect":
                regions.append(Rect(float(item["t0"]), float(item["t1"]),
                                    float(item.get("a", -math.inf)), float(item.get("b", math.inf))))
            else:
                regions.append(Cone(float(item["R"]), float(item["S"]), float(item["t"])))
        except ValueError as exc:
            raise ConfigError(f"regions: {exc}") from None

    var = raw.get("var_check", {})
    return ScenarioConfig(
        id=raw.get("id", "scenario"),
        model=model,
        initial=Profile(bps, vals),
        admissible=tuple(admissible),
        policy=raw.get("policy", RESOLVE),
        delta=float(raw.get("delta", DEFAULT_DELTA)),
        T=T,
        shock=ShockDatum(float(sh["u_ell"]), float(sh["u_r"])),
        windows=tuple(float(r) for r in raw.get("windows", (2.0, 5.0, 10.0))),
        times=tuple(float(t) for t in times) if times is not None else None,
        constants=Constants(**{k: float(v) for k, v in raw.get("constants", {}).items()}),
        event_cap=int(raw.get("event_cap", DEFAULT_EVENT_CAP)),
        var_pairs=int(var.get("pairs", 50)),
        var_seed=int(var.get("seed", 0)),
        output_dir=raw.get("output", {}).get("dir"),
        regions=tuple(regions),
        raw=raw,
    )


def load_config(path) -> ScenarioConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(raw)
