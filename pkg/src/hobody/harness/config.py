"""Run configuration: defaults < HOBODY_SEED < JSON config file < command-line flags."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..errors import HobodyError, InvalidArgumentError

DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 1


class ConfigError(HobodyError):
    pass


@dataclass
class SuiteConfig:
    n: int = 2
    m: int = 1
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tolerances: dict[str, float] = field(default_factory=dict)
    catalog: str | None = None
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not 1 <= self.n <= 4:
            raise InvalidArgumentError(f"n must be in 1..4, got {self.n}")
        if not 1 <= self.m <= 3:
            raise InvalidArgumentError(f"m must be in 1..3, got {self.m}")
        if self.n * self.m > 12:
            raise InvalidArgumentError("n*m must not exceed 12")
        if self.samples < 1000:
            raise InvalidArgumentError(f"samples must be >= 1000, got {self.samples}")
        if self.seed < 0:
            raise InvalidArgumentError("seed must be non-negative")
        if self.format not in ("json", "csv"):
            raise InvalidArgumentError(f"format must be json or csv, got {self.format}")
        for k, v in self.tolerances.items():
            if not v >= 0:
                raise InvalidArgumentError(f"tolerance for {k} must be non-negative")

    def floor(self, suite: str, default: float) -> float:
        """Relative tolerance floor for a suite, honoring overrides."""
        return float(self.tolerances.get(suite, default))


def parse_tolerances(items: list[str] | None) -> dict[str, float]:
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise InvalidArgumentError(f"--tol expects SUITE=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(val)
        except ValueError:
            raise InvalidArgumentError(f"--tol value for {name!r} is not a number") from None
    return out


def read_config_file(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path} (line {exc.lineno}, column {exc.colno}): {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(SuiteConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def build_config(flags: dict, config_path: str | None = None, env=None) -> SuiteConfig:
    env = os.environ if env is None else env
    values: dict = {}
    if env.get("HOBODY_SEED"):
        try:
            values["seed"] = int(env["HOBODY_SEED"])
        except ValueError:
            raise ConfigError(f"HOBODY_SEED is not an integer: {env['HOBODY_SEED']!r}") from None
    if config_path:
        values.update(read_config_file(config_path))
    tol = dict(values.pop("tolerances", {}) or {})
    tol.update(flags.pop("tolerances", {}) or {})
    values.update({k: v for k, v in flags.items() if v is not None})
    return SuiteConfig(tolerances=tol, **values)
