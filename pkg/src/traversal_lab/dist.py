"""Traversal-time distribution container and its on-disk format.

CSV artifact: header ``tau,rho,P_tau`` then one row per grid point, values
printed with 15 significant digits.  A JSON sidecar carries the scenario
hash, engine name, normalization, and engine diagnostics; the CSV itself is
deterministic for a fixed config and version.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

FMT = "%.15g"


@dataclass
class TraversalDistribution:
    """Normalized rho(tau) plus the cumulative passed fraction P_tau.

    ``log_norm`` is ln of the absolute normalization (the total transmission
    probability P_inf for the wave-packet engine, an engine-specific constant
    for the semiclassical one).  rho integrates to 1 on its grid up to the
    truncated tails.
    """

    tau: np.ndarray
    rho: np.ndarray
    p_tau: np.ndarray
    log_norm: float
    engine: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        self.p_tau = np.asarray(self.p_tau, dtype=float)
        if self.tau.ndim != 1 or self.tau.size < 4:
            raise ValueError("tau grid must be 1D with at least 4 points")
        if self.rho.shape != self.tau.shape or self.p_tau.shape != self.tau.shape:
            raise ValueError("tau, rho, P_tau must share a shape")

    @property
    def mass(self) -> float:
        return float(np.trapezoid(self.rho, self.tau))

    def mode(self) -> float:
        return float(self.tau[int(np.argmax(self.rho))])

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("tau,rho,P_tau\n")
            for t, r, p in zip(self.tau, self.rho, self.p_tau):
                fh.write(f"{FMT % t},{FMT % r},{FMT % p}\n")

    def write_sidecar(self, path, config_hash: str) -> None:
        doc = {
            "engine": self.engine,
            "config_hash": config_hash,
            "log_norm": self.log_norm,
            "n_points": int(self.tau.size),
            "tau_range": [float(self.tau[0]), float(self.tau[-1])],
            "meta": _jsonable(self.meta),
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim == 1:
        data = data[None, :]
    return data[:, 0], data[:, 1], data[:, 2]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in np.asarray(obj).tolist()] \
            if isinstance(obj, np.ndarray) else [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def from_log_weights(tau, log_w, engine, log_norm_extra=0.0, meta=None,
                     p_tau=None) -> TraversalDistribution:
    """Build a normalized distribution from ln of an unnormalized density.

    Normalization happens relative to the running maximum so weights spanning
    thousands of e-folds are safe.  ``log_norm_extra`` lets callers report an
    absolute normalization (e.g. ln P_inf) alongside.
    """
    tau = np.asarray(tau, dtype=float)
    log_w = np.asarray(log_w, dtype=float)
    top = float(np.max(log_w))
    w = np.exp(log_w - top)
    z = float(np.trapezoid(w, tau))
    rho = w / z
    if p_tau is None:
        p_tau = _cumulative(tau, rho)
    return TraversalDistribution(tau=tau, rho=rho, p_tau=p_tau,
                                 log_norm=log_norm_extra,
                                 engine=engine, meta=meta or {})


def _cumulative(tau, rho):
    out = np.zeros_like(rho)
    out[1:] = np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(tau))
    return out
