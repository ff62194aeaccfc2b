"""Scenario configuration: schema, validation, canonical hashing.

A scenario is a plain JSON object.  Physical knobs are the scale-free
combinations (g^2, g*p0, sigma_p^2, g*x1, g*x2, and for 2D omega and
g^2*Ey); numerical overrides live under ``grid`` (wave-packet engine) and
``lattice`` (trajectory engine).  Unknown keys anywhere are rejected.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from typing import Any

from .errors import ConfigError

_GRID_KEYS = {
    "dx": (float, "spatial step"),
    "dt": (float, "time step"),
    "t_max": (float, "total propagation time"),
    "tau_step": (float, "recording interval for the traversal clock"),
    "pad_left": (float, "extra room beyond the reflected excursion"),
    "pad_right": (float, "extra room beyond the transmitted excursion"),
    "dy": (float, "transverse spatial step (2D)"),
    "y_half": (float, "transverse half-extent (2D)"),
    "noise_floor_log": (float, "refuse runs with predicted ln P_inf below this"),
    "negative_current_tol": (float, "tolerated negative-current fraction"),
}

_LATTICE_KEYS = {
    "n_nodes": (int, "base number of time nodes"),
    "t_end": (float, "lattice end time"),
    "a": (float, "detector smoothing width (raw units)"),
    "refine_factor": (float, "node-density boost near the detector crossing"),
    "refine_halfwidth": (float, "half-width of the refined window"),
}


@dataclasses.dataclass(frozen=True)
class GridSpec:
    dx: float | None = None
    dt: float | None = None
    t_max: float | None = None
    tau_step: float = 0.04
    pad_left: float = 20.0
    pad_right: float = 20.0
    dy: float | None = None
    y_half: float | None = None
    noise_floor_log: float = -60.0
    # beating between transmitted momentum components produces genuine
    # transient negative detector current at the 1e-7 scale; a signal
    # drowned in round-off shows an O(1) fraction instead
    negative_current_tol: float = 1e-6


@dataclasses.dataclass(frozen=True)
class LatticeSpec:
    n_nodes: int = 12000
    t_end: float | None = None
    a: float = 0.1
    refine_factor: float = 8.0
    refine_halfwidth: float = 1.0


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    dimension: int
    g2: float
    g_p0: float
    sigma_p2: float
    g_x1: float
    g_x2: float
    omega: float | None = None
    g2_ey: float | None = None
    n_y: int | None = None
    grid: GridSpec = dataclasses.field(default_factory=GridSpec)
    lattice: LatticeSpec = dataclasses.field(default_factory=LatticeSpec)

    @property
    def g(self) -> float:
        return math.sqrt(self.g2)

    @property
    def x1(self) -> float:
        return self.g_x1 / self.g

    @property
    def x2(self) -> float:
        return self.g_x2 / self.g

    @property
    def p0(self) -> float:
        return self.g_p0 / self.g

    @property
    def sigma_p(self) -> float:
        return math.sqrt(self.sigma_p2)

    def canonical_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "dimension": self.dimension,
            "g2": self.g2,
            "g_p0": self.g_p0,
            "sigma_p2": self.sigma_p2,
            "g_x1": self.g_x1,
            "g_x2": self.g_x2,
        }
        if self.dimension == 2:
            d["omega"] = self.omega
            d["g2_ey"] = self.g2_ey
            if self.n_y is not None:
                d["n_y"] = self.n_y
        d["grid"] = dataclasses.asdict(self.grid)
        d["lattice"] = dataclasses.asdict(self.lattice)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True,
                          separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _require_number(d: dict, key: str, *, where: str) -> float:
    if key not in d:
        raise ConfigError(f"missing key '{key}' in {where}")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"key '{key}' in {where} must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"key '{key}' in {where} must be finite, got {v!r}")
    return float(v)


def _build_section(d: Any, keys: dict, cls, where: str):
    if d is None:
        return cls()
    if not isinstance(d, dict):
        raise ConfigError(f"'{where}' must be an object")
    unknown = set(d) - set(keys)
    if unknown:
        raise ConfigError(f"unknown keys in '{where}': {sorted(unknown)}")
    fields: dict[str, Any] = {}
    for k, v in d.items():
        want, _ = keys[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"key '{k}' in {where} must be a number, got {v!r}")
        if want is int:
            if int(v) != v:
                raise ConfigError(f"key '{k}' in {where} must be an integer")
            fields[k] = int(v)
        else:
            if not math.isfinite(v):
                raise ConfigError(f"key '{k}' in {where} must be finite")
            fields[k] = float(v)
    return cls(**fields)


_TOP_KEYS = {"dimension", "g2", "g_p0", "sigma_p2", "g_x1", "g_x2",
             "omega", "g2_ey", "n_y", "grid", "lattice"}


def scenario_from_dict(raw: Any) -> ScenarioConfig:
    """Validate a parsed JSON object and return a ScenarioConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    dim = raw.get("dimension")
    if dim not in (1, 2):
        raise ConfigError(f"'dimension' must be 1 or 2, got {dim!r}")

    g2 = _require_number(raw, "g2", where="scenario")
    g_p0 = _require_number(raw, "g_p0", where="scenario")
    sigma_p2 = _require_number(raw, "sigma_p2", where="scenario")
    g_x1 = _require_number(raw, "g_x1", where="scenario")
    g_x2 = _require_number(raw, "g_x2", where="scenario")
    if g2 <= 0:
        raise ConfigError(f"g2 must be positive, got {g2}")
    if g_p0 <= 0:
        raise ConfigError(f"g_p0 must be positive, got {g_p0}")
    if sigma_p2 < 0:
        raise ConfigError(f"sigma_p2 must be non-negative, got {sigma_p2}")
    if not g_x1 < g_x2:
        raise ConfigError(f"need g_x1 < g_x2, got {g_x1} >= {g_x2}")
    if g_x1 >= 0:
        raise ConfigError("g_x1 must be negative (packet starts left of the barrier)")
    if g_x2 <= 0:
        raise ConfigError("g_x2 must be positive (detector sits right of the barrier)")

    omega = None
    g2_ey = None
    n_y = None
    if dim == 2:
        omega = _require_number(raw, "omega", where="scenario")
        g2_ey = _require_number(raw, "g2_ey", where="scenario")
        if omega <= 0:
            raise ConfigError(f"omega must be positive, got {omega}")
        if g2_ey < 0:
            raise ConfigError(f"g2_ey must be non-negative, got {g2_ey}")
        if "n_y" in raw:
            v = raw["n_y"]
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ConfigError(f"n_y must be a non-negative integer, got {v!r}")
            n_y = v
    else:
        for k in ("omega", "g2_ey", "n_y"):
            if k in raw:
                raise ConfigError(f"key '{k}' only applies to dimension 2")

    grid = _build_section(raw.get("grid"), _GRID_KEYS, GridSpec, "grid")
    lattice = _build_section(raw.get("lattice"), _LATTICE_KEYS, LatticeSpec, "lattice")
    _validate_grid(grid)
    _validate_lattice(lattice)

    return ScenarioConfig(dimension=dim, g2=g2, g_p0=g_p0, sigma_p2=sigma_p2,
                          g_x1=g_x1, g_x2=g_x2, omega=omega, g2_ey=g2_ey,
                          n_y=n_y, grid=grid, lattice=lattice)


def _validate_grid(grid: GridSpec) -> None:
    for name in ("dx", "dt", "t_max", "tau_step", "dy", "y_half"):
        v = getattr(grid, name)
        if v is not None and v <= 0:
            raise ConfigError(f"grid.{name} must be positive, got {v}")
    if grid.tau_step > 0.05:
        raise ConfigError("grid.tau_step must not exceed 0.05")
    if grid.negative_current_tol <= 0:
        raise ConfigError("grid.negative_current_tol must be positive")


def _validate_lattice(lat: LatticeSpec) -> None:
    if lat.n_nodes < 200:
        raise ConfigError(f"lattice.n_nodes too small: {lat.n_nodes}")
    if lat.t_end is not None and lat.t_end <= 0:
        raise ConfigError("lattice.t_end must be positive")
    if lat.a <= 0:
        raise ConfigError("lattice.a must be positive")
    if lat.refine_factor < 1:
        raise ConfigError("lattice.refine_factor must be >= 1")
    if lat.refine_halfwidth <= 0:
        raise ConfigError("lattice.refine_halfwidth must be positive")


def scenario_from_json(path: str) -> ScenarioConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return scenario_from_dict(raw)
