from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from smoothspace.errors import ConfigError

try:
    from dotenv import load_dotenv
except ImportError:
    def load_dotenv() -> bool:  # type: ignore[override]
        return False


@dataclass(frozen=True, slots=True)
class ToleranceConfig:
    residual: float = 1e-9
    quadrature: float = 1e-6
    root_imag: float = 1e-9
    rank: float = 1e-10
    zero_set: float = 1e-9

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(slots=True)
class EnvConfig:
    tolerances: ToleranceConfig
    log_level: str


def parse_tolerances(text: str | None, base: ToleranceConfig | None = None) -> ToleranceConfig:
    """Parse ``key=value`` pairs (comma separated) into a tolerance record.

    A bare number is shorthand for ``residual=<number>``.
    """
    config = base or ToleranceConfig()
    if text is None or not text.strip():
        return config
    known = {f.name for f in fields(ToleranceConfig)}
    updates: dict[str, float] = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, sep, raw = chunk.partition("=")
        if not sep:
            key, raw = "residual", chunk
        key = key.strip()
        if key not in known:
            raise ConfigError(f"Unknown tolerance key: {key!r}")
        try:
            value = float(raw)
        except ValueError as exc:
            raise ConfigError(f"Tolerance {key} is not a number: {raw!r}") from exc
        if not value > 0:
            raise ConfigError(f"Tolerance {key} must be positive, got {value}")
        updates[key] = value
    return replace(config, **updates)


def load_env() -> EnvConfig:
    load_dotenv()
    return EnvConfig(
        tolerances=parse_tolerances(os.getenv("SMOOTHSPACE_TOL")),
        log_level=os.getenv("SMOOTHSPACE_LOG_LEVEL", "WARNING").upper(),
    )
