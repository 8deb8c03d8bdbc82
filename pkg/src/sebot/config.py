from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

import tomli

from .graph import GraphConfig


@dataclass(frozen=True)
class PipelineConfig:
    xi: float = 0.1
    phi: float = 1.0
    p: float = 0.15
    rho: float = 0.004
    pi: float = 0.4
    theta: float = 1.0
    omega: tuple[float, float, float] = (1.0, 1.0, 1.0)
    seed: Optional[int] = None
    weighted_tensor: bool = False
    max_iter: int = 10_000

    def graph_config(self) -> GraphConfig:
        return GraphConfig(xi=self.xi, phi=self.phi, omega=tuple(self.omega))

    def to_json(self) -> dict:
        out = dataclasses.asdict(self)
        out["omega"] = list(self.omega)
        return out


# dataset-tuned settings; anything not listed keeps the default
PRESETS: dict[str, dict[str, Any]] = {
    "default": {},
    "pronbots": {"xi": 0.01, "p": 0.05, "theta": 0.60},
    "botwiki": {"pi": 0.6, "theta": 0.55},
}

FIELDS = {f.name: f for f in dataclasses.fields(PipelineConfig)}


def parse_omega(value) -> tuple[float, float, float]:
    if isinstance(value, str):
        value = [v for v in value.replace(":", ",").split(",") if v.strip()]
    omega = tuple(float(v) for v in value)
    if len(omega) != 3:
        raise ValueError(f"omega needs three values, got {value!r}")
    return omega


def _coerce(name: str, value):
    if name == "omega":
        return parse_omega(value)
    if name == "seed":
        return None if value is None else int(value)
    if name == "weighted_tensor":
        return bool(value)
    if name == "max_iter":
        return int(value)
    return float(value)


def load_config_file(path) -> dict[str, Any]:
    with open(path, "rb") as fh:
        raw = tomli.load(fh)
    unknown = set(raw) - set(FIELDS) - {"preset"}
    if unknown:
        raise ValueError(f"unknown config keys in {path}: {sorted(unknown)}")
    return raw


def resolve_config(preset: Optional[str] = None, file: Optional[Path] = None,
                   overrides: Optional[Mapping[str, Any]] = None) -> PipelineConfig:
    """Defaults, then preset, then config file, then explicit overrides (flags).

    A ``preset`` key inside the file is used when no preset is passed.
    """
    from_file = load_config_file(file) if file else {}
    preset = preset or from_file.pop("preset", None) or "default"
    from_file.pop("preset", None)
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    values: dict[str, Any] = {}
    for layer in (PRESETS[preset], from_file, overrides or {}):
        for k, v in layer.items():
            if v is None:
                continue
            if k not in FIELDS:
                raise ValueError(f"unknown config key {k!r}")
            values[k] = _coerce(k, v)
    return PipelineConfig(**values)
