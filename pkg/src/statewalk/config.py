"""Experiment configuration: JSON documents with per-module sections.

The schema is flat: every section holds typed scalar values (plus one list of
floats for drift targets). Unknown sections or keys are rejected with the
line in the file where they appear. Loaded configs are merged over the
defaults below, so a config file only states what it overrides; the merged
document round-trips losslessly through JSON.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

EXPERIMENTS = (
    "gaussian-overlap",
    "sample-gue",
    "sample-goe",
    "walk",
    "constrained-walk",
    "drift-walk",
    "classical-limit",
    "verify-all",
)

DEFAULTS: dict = {
    "experiment": "verify-all",
    "seed": 20260810,
    "out_dir": "runs/statewalk",
    "alpha": 0.01,
    "grid": {"n": 64, "extent": 16.0, "center": 0.0, "hbar": 1.0},
    "gaussian": {"sigma": 1.0, "pairs": 200, "theta_samples": 100},
    "ensemble": {"kind": "gue", "dim": 64, "scale": 1.0, "emit": "spacing", "samples": 200},
    "spectral": {"dim": 200, "samples": 500},
    "walk": {"steps": 60, "dt": 0.02, "stepper": "first-order", "trials": 200,
             "snapshot_stride": 0},
    "constrained": {"dim": 1, "steps": 1000, "dt": 0.01, "step_std": 1.0,
                    "trials": 10000, "trajectory_trials": 100},
    "drift": {"rate": 7.5, "capture_radius": 0.25, "steps": 150, "dt": 0.02,
              "trials": 200, "target_centers": [1.2, -1.6]},
    "potential": {"kind": "linear", "force": 2.0, "spring": 0.0, "quartic": 0.0,
                  "mass": 1.0},
    "classical": {"sigma": 1.0, "dt": 0.0005, "steps": 2000, "action_sigma": 0.1,
                  "action_steps": 1600},
    "tests": {
        "isotropy_samples": 10000,
        "homogeneity_trials": 1000,
        "homogeneity_steps": 25,
        "translation_draws": 10000,
        "born_samples": 100000,
        "equal_distance_trials": 3000,
        "equal_distance_steps": 40,
        "equal_distance_dt": 0.35,
        "equal_distance_eps": 0.15,
        "equal_distance_theta": 0.55,
    },
}

_SCHEMA_TYPES = {
    "experiment": str,
    "seed": int,
    "out_dir": str,
    "alpha": float,
}


class ConfigError(ValueError):
    """Invalid configuration; carries a file/line anchor when available."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        anchor = ""
        if path is not None:
            anchor = f"{path}:" if line is None else f"{path}:{line}:"
            anchor += " "
        super().__init__(anchor + message)


def _find_line(raw: str, key: str) -> int | None:
    needle = f'"{key}"'
    for i, text in enumerate(raw.splitlines(), start=1):
        if needle in text:
            return i
    return None


def _check_value(section: str, key: str, value, default):
    where = f"[{section}] {key}" if section else key
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
        return value
    if isinstance(default, list):
        if not isinstance(value, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(f"{where}: expected a list of numbers")
        return [float(v) for v in value]
    raise ConfigError(f"{where}: unsupported value type")


def merge_config(overrides: dict, path: str | None = None, raw: str = "") -> dict:
    """Validate ``overrides`` against the schema and merge over the defaults."""
    cfg = copy.deepcopy(DEFAULTS)
    for key, value in overrides.items():
        if key not in DEFAULTS:
            raise ConfigError(f"unknown key {key!r}", path, _find_line(raw, key))
        if isinstance(DEFAULTS[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be an object", path, _find_line(raw, key))
            for sub, subval in value.items():
                if sub not in DEFAULTS[key]:
                    raise ConfigError(
                        f"unknown key {sub!r} in section [{key}]", path, _find_line(raw, sub)
                    )
                try:
                    cfg[key][sub] = _check_value(key, sub, subval, DEFAULTS[key][sub])
                except ConfigError as e:
                    raise ConfigError(str(e), path, _find_line(raw, sub)) from None
        else:
            try:
                cfg[key] = _check_value("", key, value, DEFAULTS[key])
            except ConfigError as e:
                raise ConfigError(str(e), path, _find_line(raw, key)) from None

    if cfg["experiment"] not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {cfg['experiment']!r}; one of {', '.join(EXPERIMENTS)}",
            path, _find_line(raw, "experiment"),
        )
    _validate_ranges(cfg, path, raw)
    return cfg


def _validate_ranges(cfg: dict, path, raw):
    def bad(section, key, why):
        raise ConfigError(f"[{section}] {key}: {why}", path, _find_line(raw, key))

    if cfg["ensemble"]["kind"] not in ("gue", "goe"):
        bad("ensemble", "kind", "must be 'gue' or 'goe'")
    if cfg["ensemble"]["emit"] not in ("matrix", "spacing"):
        bad("ensemble", "emit", "must be 'matrix' or 'spacing'")
    if cfg["ensemble"]["dim"] < 2:
        bad("ensemble", "dim", "must be >= 2")
    if cfg["ensemble"]["scale"] <= 0:
        bad("ensemble", "scale", "must be > 0")
    if cfg["walk"]["stepper"] not in ("exact-eigen", "first-order"):
        bad("walk", "stepper", "must be 'exact-eigen' or 'first-order'")
    if cfg["potential"]["kind"] not in ("free", "linear", "harmonic", "quartic"):
        bad("potential", "kind", "unknown potential kind")
    if not 0.0 < cfg["alpha"] < 1.0:
        raise ConfigError("alpha must lie in (0, 1)", path, _find_line(raw, "alpha"))
    for section, key in (
        ("grid", "n"), ("grid", "extent"), ("grid", "hbar"),
        ("gaussian", "sigma"), ("gaussian", "pairs"),
        ("walk", "dt"), ("walk", "trials"),
        ("constrained", "dim"), ("constrained", "steps"), ("constrained", "dt"),
        ("constrained", "trials"),
        ("classical", "dt"), ("classical", "steps"), ("classical", "sigma"),
        ("potential", "mass"),
        ("spectral", "dim"), ("spectral", "samples"),
    ):
        if cfg[section][key] <= 0:
            bad(section, key, "must be > 0")
    if cfg["constrained"]["dim"] > 3:
        bad("constrained", "dim", "must be 1..3")
    if cfg["constrained"]["step_std"] < 0:
        bad("constrained", "step_std", "must be >= 0")
    if cfg["walk"]["steps"] < 0:
        bad("walk", "steps", "must be >= 0")


def load_config(path: str | Path) -> dict:
    p = Path(path)
    try:
        raw = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}", str(p)) from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", str(p), e.lineno) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object", str(p), 1)
    return merge_config(data, path=str(p), raw=raw)
