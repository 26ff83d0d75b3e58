"""Run configuration: defaults, key=value config files, LOCTAB_CONFIG env var.

Precedence is flags > config file > defaults; the CLI passes parsed flag
values through `merged`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "LOCTAB_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    k: int = 1
    sieve_limit: int = 10**7
    memory_cap_bytes: int = 512 * 1024 * 1024
    mc_samples: int = 10**6
    mc_seed: int = 42
    yb_n: int = 4
    yb_floor: float = 0.05
    enumeration_cap: int = 10**7
    output: str = ""
    allow_skips: bool = False

    def __post_init__(self):
        for name in ("sieve_limit", "memory_cap_bytes", "mc_samples", "enumeration_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.k < 1:
            raise ValueError("k must be >= 1")


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, raw: str):
    if name not in _FIELD_TYPES:
        raise ValueError(f"unknown config key {name!r}")
    kind = _FIELD_TYPES[name]
    if kind == "bool":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def parse_config_file(path: str) -> dict:
    """Simple key=value lines; '#' starts a comment; keys are field names."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, raw = line.split("=", 1)
            key = key.strip()
            values[key] = _coerce(key, raw.strip())
    return values


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the config file (explicit path or LOCTAB_CONFIG), then
    any explicit overrides (flags win)."""
    cfg = RunConfig()
    file_path = path or os.environ.get(ENV_VAR)
    if file_path:
        cfg = replace(cfg, **parse_config_file(file_path))
    if overrides:
        cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg
