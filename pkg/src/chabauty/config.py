"""Configuration manager — TOML load/save/validate."""

from __future__ import annotations

import logging
import os
import tomllib
from dataclasses import dataclass, field, fields
from pathlib import Path

import tomli_w

from chabauty.fsutil import atomic_write

log = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path.home() / ".config" / "chabauty" / "config.toml"
CONFIG_ENV = "CHABAUTY_CONFIG"


# ── dataclasses ──────────────────────────────────────────────────────────────


@dataclass
class MetricConfig:
    tol: float = 1e-3
    eps_min: float = 1e-4
    eps_max: float = 4.0
    max_points: int = 500_000
    mesh: float = 0.25  # first sampling mesh for continuous pieces
    min_mesh: float = 1e-3
    horizon: int = 4  # indices checked by limit_verdict when no stop is given
    strict: bool = False  # undecided pieces raise instead of warning


@dataclass
class CanonicalConfig:
    tol: float = 1e-9


@dataclass
class InvariantsConfig:
    tol: float = 1e-10
    method: str = "qseries"  # "qseries" or "shell"
    dps: int = 30
    max_points: int = 4_000_000
    newton_max_iter: int = 200


@dataclass
class SphereConfig:
    tol: float = 1e-9


@dataclass
class PlotConfig:
    samples: int = 360
    grid: int = 7
    radius: float = 2.0


@dataclass
class Config:
    metric: MetricConfig = field(default_factory=MetricConfig)
    canonical: CanonicalConfig = field(default_factory=CanonicalConfig)
    invariants: InvariantsConfig = field(default_factory=InvariantsConfig)
    sphere: SphereConfig = field(default_factory=SphereConfig)
    plot: PlotConfig = field(default_factory=PlotConfig)


_SECTIONS = ("metric", "canonical", "invariants", "sphere", "plot")


# ── helpers ──────────────────────────────────────────────────────────────────


def _apply_dict(dc: object, data: dict) -> None:
    """Overwrite dataclass fields from a dict, skipping unknown keys."""
    for f in fields(dc):  # type: ignore[arg-type]
        if f.name in data:
            val = data[f.name]
            if f.type in ("bool", bool):
                val = bool(val)
            elif f.type in ("int", int):
                val = int(val)
            elif f.type in ("float", float):
                val = float(val)
            elif f.type in ("str", str):
                val = str(val)
            setattr(dc, f.name, val)


def _section_to_dict(dc: object) -> dict:
    """Convert a dataclass section to a plain dict (one level)."""
    return {f.name: getattr(dc, f.name) for f in fields(dc)}  # type: ignore[arg-type]


def _clamp(value, lo, hi):
    return max(lo, min(value, hi))


# ── public API ───────────────────────────────────────────────────────────────


def resolve_config_path(path: str | Path | None = None) -> Path:
    """Explicit path, else $CHABAUTY_CONFIG, else the per-user default."""
    if path:
        return Path(path)
    env = os.environ.get(CONFIG_ENV)
    return Path(env) if env else DEFAULT_CONFIG_PATH


def validate_config(cfg: Config) -> None:
    """Clamp and validate all config values in place."""
    m = cfg.metric
    m.tol = _clamp(m.tol, 1e-6, 1.0)
    m.eps_min = _clamp(m.eps_min, 1e-8, 1.0)
    m.eps_max = _clamp(m.eps_max, 1e-3, 100.0)
    if m.eps_min >= m.eps_max:
        log.warning("eps bracket [%g, %g] is empty, resetting", m.eps_min, m.eps_max)
        m.eps_min, m.eps_max = MetricConfig.eps_min, MetricConfig.eps_max
    m.max_points = _clamp(m.max_points, 1_000, 50_000_000)
    m.mesh = _clamp(m.mesh, 1e-4, 10.0)
    m.min_mesh = _clamp(m.min_mesh, 1e-6, m.mesh)
    m.horizon = _clamp(m.horizon, 1, 1_000)

    cfg.canonical.tol = _clamp(cfg.canonical.tol, 1e-15, 1e-3)

    inv = cfg.invariants
    inv.tol = _clamp(inv.tol, 1e-30, 1.0)
    if inv.method not in ("qseries", "shell"):
        log.warning("Unknown invariants method '%s', using qseries", inv.method)
        inv.method = "qseries"
    inv.dps = _clamp(inv.dps, 15, 100)
    inv.max_points = _clamp(inv.max_points, 1_000, 100_000_000)
    inv.newton_max_iter = _clamp(inv.newton_max_iter, 5, 10_000)

    cfg.sphere.tol = _clamp(cfg.sphere.tol, 1e-14, 1e-2)

    cfg.plot.samples = _clamp(cfg.plot.samples, 3, 100_000)
    cfg.plot.grid = _clamp(cfg.plot.grid, 2, 200)
    cfg.plot.radius = _clamp(cfg.plot.radius, 1e-3, 1e3)


def load_config(path: str | Path | None = None) -> Config:
    """Read TOML config, return validated Config.  Missing keys get defaults."""
    path = resolve_config_path(path)
    cfg = Config()

    if path.exists():
        try:
            with open(path, "rb") as fp:
                raw = tomllib.load(fp)
            for name in _SECTIONS:
                if name in raw:
                    _apply_dict(getattr(cfg, name), raw[name])
        except Exception:
            log.exception("Failed to parse config at %s — using defaults", path)
    else:
        log.debug("Config file %s not found — using defaults", path)

    validate_config(cfg)

    return cfg


def to_dict(cfg: Config) -> dict:
    """Export config as a dict of sections."""
    return {name: _section_to_dict(getattr(cfg, name)) for name in _SECTIONS}


def save_config(cfg: Config, path: str | Path | None = None) -> None:
    """Write Config back to TOML atomically with backup."""
    path = resolve_config_path(path)
    with atomic_write(path, "wb", backup=True) as fp:
        tomli_w.dump(to_dict(cfg), fp)
