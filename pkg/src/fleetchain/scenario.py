"""Scenario files: JSON with a flat `params` object and optional `sweeps`.

Example::

    {
      "name": "reference",
      "params": {"cluster_count": 5, "lam": 2, "seed": 42},
      "sweeps": [{"param": "lam", "values": [2, 3, 4, 5]}],
      "output": "results"
    }

Unknown parameter names and sweep axes that do not reference a config field
are configuration errors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .sim import SimConfig

_CONFIG_FIELDS = {f.name for f in fields(SimConfig)}


class ConfigError(ValueError):
    """Bad scenario file or parameter set."""


@dataclass(frozen=True)
class SweepAxis:
    param: str
    values: tuple

    def __post_init__(self):
        if self.param not in _CONFIG_FIELDS:
            raise ConfigError(f"sweep axis {self.param!r} is not a config field")
        if not self.values:
            raise ConfigError(f"sweep axis {self.param!r} has no values")


@dataclass(frozen=True)
class Scenario:
    name: str
    config: SimConfig
    sweeps: tuple[SweepAxis, ...] = ()
    output: str | None = None
    variant: str = "as-derived"


def make_config(params: dict) -> SimConfig:
    unknown = set(params) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    try:
        return SimConfig(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("scenario root must be a JSON object")
    extra = set(raw) - {"name", "params", "sweeps", "output", "variant"}
    if extra:
        raise ConfigError(f"unknown scenario keys: {sorted(extra)}")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("`params` must be an object")
    config = make_config(params)
    sweeps = []
    for axis in raw.get("sweeps", []):
        if not isinstance(axis, dict) or "param" not in axis or "values" not in axis:
            raise ConfigError("each sweep needs `param` and `values`")
        sweeps.append(SweepAxis(param=axis["param"], values=tuple(axis["values"])))
    variant = raw.get("variant", "as-derived")
    if variant not in ("as-derived", "as-printed"):
        raise ConfigError(f"unknown variant {variant!r}")
    return Scenario(
        name=raw.get("name", path.stem),
        config=config,
        sweeps=tuple(sweeps),
        output=raw.get("output"),
        variant=variant,
    )


def expand(scenario: Scenario) -> list[tuple[str, SimConfig]]:
    """Cartesian product of the sweep axes, in declaration order."""
    if not scenario.sweeps:
        return [("", scenario.config)]
    axes = [[(axis.param, v) for v in axis.values] for axis in scenario.sweeps]
    points = []
    for combo in itertools.product(*axes):
        label = "_".join(f"{param}={value:g}" if isinstance(value, (int, float))
                         else f"{param}={value}" for param, value in combo)
        cfg = replace(scenario.config, **dict(combo))
        points.append((label, cfg))
    return points
