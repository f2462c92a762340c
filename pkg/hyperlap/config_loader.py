"""
Utilities to load hyperlap settings from YAML/JSON configuration files.

Values are resolved in the order: command-line flag > environment variable >
configuration file > built-in default. This module covers the last three; the
CLI applies its own flags on top.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional

try:
    import yaml
except ImportError:  # pragma: no cover - fallback handled at runtime
    yaml = None

from .params import DEFAULT_RHO_MIN, DEFAULT_TOL_REL

logger = logging.getLogger(__name__)

TOL_ENV = "HYPERLAP_TOL"
WORKERS_ENV = "HYPERLAP_MAX_WORKERS"


@dataclass
class KernelSettings:
    tol_rel: float = DEFAULT_TOL_REL
    rho_min: float = DEFAULT_RHO_MIN


@dataclass
class VerifySettings:
    """
    Grids and tolerances for the verification suite.
    """

    radii: List[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    harmonicity_rho_min: float = 0.5
    harmonicity_rho_max: float = 5.0
    harmonicity_steps: int = 10
    fd_step: float = 1e-4
    flux_radii: List[float] = field(default_factory=lambda: [0.1, 1.0, 5.0])
    tolerance: float = 1e-6

    def harmonicity_grid(self) -> List[float]:
        steps = max(2, self.harmonicity_steps)
        span = self.harmonicity_rho_max - self.harmonicity_rho_min
        return [self.harmonicity_rho_min + span * i / (steps - 1) for i in range(steps)]


@dataclass
class TableSettings:
    rho_min: float = 0.05
    rho_max: float = 10.0
    steps: int = 40


@dataclass
class Settings:
    kernel: KernelSettings = field(default_factory=KernelSettings)
    verify: VerifySettings = field(default_factory=VerifySettings)
    table: TableSettings = field(default_factory=TableSettings)
    workers: int = 1

    def to_dict(self) -> Dict[str, object]:
        return {
            "kernel": {f.name: getattr(self.kernel, f.name) for f in fields(self.kernel)},
            "verify": {f.name: getattr(self.verify, f.name) for f in fields(self.verify)},
            "table": {f.name: getattr(self.table, f.name) for f in fields(self.table)},
            "workers": self.workers,
        }


def _section(cls, raw: object, name: str):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ValueError(f"Config section '{name}' must be a mapping.")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ValueError(f"Unknown keys in config section '{name}': {', '.join(unknown)}")
    values = {}
    for key, value in raw.items():
        default = getattr(cls(), key)
        if isinstance(default, list):
            if not isinstance(value, list):
                raise ValueError(f"'{name}.{key}' must be a list.")
            values[key] = [float(item) for item in value]
        elif isinstance(default, int) and not isinstance(default, bool):
            values[key] = int(value)
        else:
            values[key] = float(value)
    return cls(**values)


def settings_from_mapping(data: Mapping[str, object]) -> Settings:
    """
    Build Settings from a parsed configuration mapping.
    """
    unknown = sorted(set(data) - {"kernel", "verify", "table", "workers"})
    if unknown:
        raise ValueError(f"Unknown config sections: {', '.join(unknown)}")
    workers = data.get("workers", 1)
    return Settings(
        kernel=_section(KernelSettings, data.get("kernel"), "kernel"),
        verify=_section(VerifySettings, data.get("verify"), "verify"),
        table=_section(TableSettings, data.get("table"), "table"),
        workers=max(1, int(workers)),
    )


def apply_env_overrides(settings: Settings, environ: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Apply HYPERLAP_TOL and HYPERLAP_MAX_WORKERS; invalid values are logged and ignored.
    """
    env = os.environ if environ is None else environ
    raw_tol = env.get(TOL_ENV)
    if raw_tol:
        try:
            tol = float(raw_tol)
            if not tol > 0.0:
                raise ValueError(raw_tol)
        except ValueError:
            logger.warning("Ignoring invalid %s value: %s", TOL_ENV, raw_tol)
        else:
            settings = replace(settings, kernel=replace(settings.kernel, tol_rel=tol))
    raw_workers = env.get(WORKERS_ENV)
    if raw_workers:
        try:
            workers = int(raw_workers)
        except ValueError:
            logger.warning("Ignoring invalid %s value: %s", WORKERS_ENV, raw_workers)
        else:
            settings = replace(settings, workers=max(1, workers))
    return settings


def load_settings(path: Optional[Path] = None, environ: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Load Settings from a YAML or JSON file (defaults when path is None) and apply environment overrides.
    """
    if path is None:
        return apply_env_overrides(Settings(), environ)

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    text = path.read_text(encoding="utf-8")

    suffix = path.suffix.lower()
    if suffix in {".yaml", ".yml"}:
        if yaml is None:
            raise RuntimeError("PyYAML is required to load YAML configs. Please install pyyaml or use JSON.")
        data = yaml.safe_load(text)
    elif suffix == ".json":
        data = json.loads(text)
    else:
        raise ValueError("Config file must be .yaml, .yml or .json")

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValueError("Config structure must be a mapping of sections.")
    logger.debug("Loaded settings from %s", path)
    return apply_env_overrides(settings_from_mapping(data), environ)
