"""YAML configuration loading, validation and hashing.

Keys mirror the ``ScenarioConfig`` field names. Nested mappings are used for
``tx_array``/``rx_array`` (ArraySpec), ``tx_antenna``/``rx_antenna``
(AntennaConfig), ``xf_gain`` (XfGainConfig) and the optional ``sweep``
section. An empty file yields the defaults. Unknown keys are rejected.

Example::

    carrier_frequency: 140e9
    tx_height: 31.5
    tx_array: {kind: UPA, rows: 9, cols: 21, spacing: 3.0, plane: yz}
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, is_dataclass

import yaml

from .analysis import SweepArray, SweepConfig
from .cluster_gen import AntennaConfig, ArraySpec, ScenarioConfig, XfGainConfig
from .errors import ConfigError

# Overrides used for the scatterer-statistics sweep unless the file sets them:
# angles classified in the global frame and an even mix of single- and
# double-bounce clusters.
SWEEP_PRESET = {"angle_frame": "global", "one_bounce_probability": 0.5}
# Receiver height used by the CF/FF comparison.
COMPARE_PRESET = {"angle_frame": "global", "one_bounce_probability": 0.5, "rx_height": 1.5}

_NESTED = {"tx_array": ArraySpec, "rx_array": ArraySpec, "tx_antenna": AntennaConfig,
           "rx_antenna": AntennaConfig, "xf_gain": XfGainConfig}


@dataclass(frozen=True)
class LoadedConfig:
    scenario: ScenarioConfig
    sweep: SweepConfig = field(default_factory=SweepConfig)
    raw: dict = field(default_factory=dict)


def _number(key, value, kind):
    if isinstance(value, bool):
        if kind == "bool":
            return value
        raise ConfigError(key, f"expected a number, got {value!r}")
    if kind == "bool":
        raise ConfigError(key, f"expected true/false, got {value!r}")
    if isinstance(value, str):
        # YAML 1.1 reads 140e9 (no dot) as a string
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {value!r}") from None
    if not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if kind == "int":
        if int(value) != value:
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(float(value)):
        raise ConfigError(key, "must be finite")
    return float(value)


def _vector(key, value):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(key, f"expected a list, got {value!r}")
    return tuple(_number(key, v, "float") for v in value)


def _coerce(key, value, annotation: str):
    ann = annotation.replace(" ", "")
    if value is None:
        if ann.endswith("|None"):
            return None
        raise ConfigError(key, "must not be null")
    ann = ann.removesuffix("|None")
    if ann in ("float", "int", "bool"):
        return _number(key, value, ann)
    if ann == "str":
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if ann == "tuple":
        if key.endswith(("cut_v", "cut_h")):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(key, "expected a list of [angle_deg, gain_db] pairs")
            rows = tuple(_vector(key, row) for row in value)
            if any(len(r) != 2 for r in rows):
                raise ConfigError(key, "each cut row needs [angle_deg, gain_db]")
            return rows
        return _vector(key, value)
    raise ConfigError(key, f"unsupported field type {annotation}")


def _build(cls, data, prefix=""):
    if not isinstance(data, dict):
        raise ConfigError(prefix.rstrip(".") or "<root>", f"expected a mapping, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        path = f"{prefix}{key}"
        if key not in known:
            raise ConfigError(path, "unknown key")
        if key in _NESTED and cls is ScenarioConfig:
            kwargs[key] = _build(_NESTED[key], value, path + ".")
        else:
            kwargs[key] = _coerce(path, value, str(known[key].type))
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        raise ConfigError(prefix + exc.key, exc.message) from None
    except ValueError as exc:
        raise ConfigError(prefix.rstrip(".") or cls.__name__, str(exc)) from None


def _sweep(data) -> SweepConfig:
    if data is None:
        return SweepConfig()
    if not isinstance(data, dict):
        raise ConfigError("sweep", "expected a mapping")
    kwargs = {}
    for key, value in data.items():
        path = f"sweep.{key}"
        if key == "trials":
            kwargs[key] = _number(path, value, "int")
        elif key in ("frequencies", "distances"):
            kwargs[key] = _vector(path, value)
        elif key == "arrays":
            if not isinstance(value, list):
                raise ConfigError(path, "expected a list")
            arrays = []
            for i, item in enumerate(value):
                sub = f"{path}[{i}]"
                if not isinstance(item, dict) or set(item) - {"name", "tx_height", "array"}:
                    raise ConfigError(sub, "entries take name, tx_height and array")
                arrays.append(SweepArray(str(item.get("name", f"array{i}")),
                                         _build(ArraySpec, item.get("array", {}), sub + ".array."),
                                         _number(sub + ".tx_height", item.get("tx_height", 25.0), "float")))
            kwargs[key] = tuple(arrays)
        else:
            raise ConfigError(path, "unknown key")
    try:
        return SweepConfig(**kwargs)
    except ConfigError as exc:
        raise ConfigError("sweep." + exc.key, exc.message) from None


def parse_config(text: str, preset: dict | None = None, source: str = "<string>") -> LoadedConfig:
    """Parse YAML text; ``preset`` supplies defaults that the file may override."""
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark is not None else "unknown position"
        raise ConfigError("<parse>", f"{source}: {where}: {exc.problem}") from None
    except yaml.YAMLError as exc:
        raise ConfigError("<parse>", f"{source}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("<root>", "top level must be a mapping")
    sweep = _sweep(data.get("sweep"))
    scenario_data = dict(preset or {})
    scenario_data.update({k: v for k, v in data.items() if k != "sweep"})
    return LoadedConfig(_build(ScenarioConfig, scenario_data), sweep, data)


def load_config(path, preset: dict | None = None) -> LoadedConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc}") from None
    return parse_config(text, preset, str(path))


def _plain(obj):
    if is_dataclass(obj):
        return {k: _plain(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "value"):
        return obj.value
    return obj


def config_hash(*parts) -> str:
    """64-bit hex digest of the resolved configuration, independent of key order."""
    blob = json.dumps([_plain(p) for p in parts], sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]
