"""Run configuration: flat key=value config files plus CLI overrides.

Schema (all keys optional; CLI flags win over file values):

    data_dir            path to the panel CSV or its directory
    countries           comma list of codes, or alias us|uk|europe
    households          number of simulated households
    seed                master seed (uint64)
    threads             worker processes
    out_dir             output directory for result CSVs
    mode                grid | comparison
    down_fracs          comma list, e.g. 0.1,0.2,0.3,0.4,0.5,1.0
    threshold_fracs     comma list, e.g. 0.1,0.2,0.3,0.4,0.5
    second_home         true|false: add second-home cells (first home 10/10)
    second_down_fracs   comma list for the second-home grid
    second_threshold_fracs  comma list for the second-home grid
    replacement         social security replacement rate (default 0.45)
    income_target_45    2024-USD anchor of mean log earnings at 45
    comparison_paths    portfolio paths for comparison mode
    dump_trajectories   true|false: per-household trajectory CSVs
    audit_households    households with full budget audit in the dump
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


def _parse_bool(v: str) -> bool:
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _parse_fracs(v) -> tuple[float, ...]:
    if isinstance(v, (list, tuple)):
        vals = tuple(float(x) for x in v)
    else:
        vals = tuple(float(x) for x in str(v).split(",") if str(x).strip())
    for x in vals:
        if not 0.0 < x <= 1.0:
            raise ConfigError(f"fraction out of (0, 1]: {x}")
    if not vals:
        raise ConfigError("empty fraction list")
    return vals


@dataclass
class RunConfig:
    data_dir: str = ""                      # empty -> bundled panel
    countries: str | None = None
    households: int = 1_000_000
    seed: int = 20240731
    threads: int = 1
    out_dir: str = "results"
    mode: str = "grid"
    down_fracs: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 1.0)
    threshold_fracs: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    second_home: bool = False
    second_down_fracs: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 1.0)
    second_threshold_fracs: tuple = (0.1, 0.2, 0.3)
    replacement: float = 0.45
    income_target_45: float = 70_000.0
    comparison_paths: int = 1_000_000
    dump_trajectories: bool = False
    audit_households: int = 0
    extra: dict = field(default_factory=dict, repr=False)

    def validate(self) -> None:
        if self.households < 1:
            raise ConfigError("households must be >= 1")
        if self.mode not in ("grid", "comparison"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not 0.0 < self.replacement <= 1.0:
            raise ConfigError("replacement must be in (0, 1]")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not self.down_fracs or not self.threshold_fracs:
            raise ConfigError("strategy grid must be non-empty")

    def config_hash(self) -> str:
        # execution details (worker count, output paths, debug dumps) do not
        # affect results and stay out of the hash
        skip = {"extra", "threads", "out_dir", "dump_trajectories", "audit_households"}
        keys = sorted(f.name for f in fields(self) if f.name not in skip)
        canon = "\n".join(f"{k}={getattr(self, k)!r}" for k in keys)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


_PARSERS = {
    "data_dir": str,
    "countries": lambda v: str(v) or None,
    "households": int,
    "seed": int,
    "threads": int,
    "out_dir": str,
    "mode": str,
    "down_fracs": _parse_fracs,
    "threshold_fracs": _parse_fracs,
    "second_home": _parse_bool,
    "second_down_fracs": _parse_fracs,
    "second_threshold_fracs": _parse_fracs,
    "replacement": float,
    "income_target_45": float,
    "comparison_paths": int,
    "dump_trajectories": _parse_bool,
    "audit_households": int,
}


def read_config_file(path) -> dict:
    """Parse `key = value` lines; '#' starts a comment."""
    values: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    for source in (file_values or {}, overrides or {}):
        for key, val in source.items():
            if val is None:
                continue
            if key not in _PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                setattr(cfg, key, _PARSERS[key](val))
            except ConfigError:
                raise
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key!r}: {val!r} ({exc})")
    cfg.validate()
    return cfg
