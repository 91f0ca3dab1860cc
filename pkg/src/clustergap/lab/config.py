"""Sweep configuration: a versioned JSON document with strict keys."""
from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from ..cluster import ALGORITHMS
from ..model import Prior

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class SweepConfig:
    n: tuple[int, ...]
    p: tuple[int, ...]
    K: tuple[int, ...]
    delta_bar_sq: tuple[float, ...]
    algorithms: tuple[str, ...] = ("lloyd",)
    trials: int = 1
    sigma: float = 1.0
    prior: str = Prior.BERNOULLI_HYPERCUBE.value
    seed: int = 0
    output_path: str = "sweep.csv"
    D: int | None = None
    time_budget: float | None = None

    def __post_init__(self):
        for name in ("n", "p", "K", "delta_bar_sq", "algorithms"):
            value = getattr(self, name)
            if isinstance(value, (str, bytes)) or not hasattr(value, "__iter__"):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        try:
            object.__setattr__(self, "delta_bar_sq", tuple(float(v) for v in self.delta_bar_sq))
            object.__setattr__(self, "sigma", float(self.sigma))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"non-numeric value: {exc}") from exc
        self.validate()

    def validate(self):
        for name in ("n", "p", "K", "delta_bar_sq", "algorithms"):
            if not getattr(self, name):
                raise ConfigError(f"grid {name!r} must be nonempty")
        if any(int(v) != v or v < 1 for v in self.n + self.p + self.K):
            raise ConfigError("n, p, K must be positive integers")
        if any(v < 0 for v in self.delta_bar_sq):
            raise ConfigError("delta_bar_sq must be nonnegative")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown algorithms {unknown}; choose from {list(ALGORITHMS)}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials must be an integer >= 1")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        try:
            Prior(self.prior)
        except ValueError:
            raise ConfigError(f"unknown prior {self.prior!r}; choose from {[x.value for x in Prior]}") from None
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.D is not None and (int(self.D) != self.D or self.D < 0):
            raise ConfigError("D must be a nonnegative integer")
        if self.time_budget is not None and not self.time_budget > 0:
            raise ConfigError("time_budget must be positive")

    def cells(self) -> list[tuple[int, int, int, float]]:
        """Grid cells in the fixed order ``n``, ``p``, ``K``, ``delta_bar_sq``."""
        return [(n, p, K, d) for n in self.n for p in self.p for K in self.K for d in self.delta_bar_sq]

    def to_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        d = dict(d)
        version = d.pop("schema_version", None)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        missing = sorted({"n", "p", "K", "delta_bar_sq"} - set(d))
        if missing:
            raise ConfigError(f"missing config keys: {missing}")
        try:
            return cls(**d)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return SweepConfig.from_dict(data)
