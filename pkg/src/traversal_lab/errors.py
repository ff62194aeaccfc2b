"""Error taxonomy shared by both engines and the CLI.

ConfigError maps to CLI exit code 2, EngineError (and subclasses) to exit
code 3.  Every engine failure carries a short machine-readable ``code`` and a
``context`` dict with the numbers that triggered it.
"""
from __future__ import annotations


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""

    code = "config"

    def __init__(self, message: str, context: dict | None = None):
        super().__init__(message)
        self.context = context or {}


class EngineError(RuntimeError):
    """Base class for runtime failures of either engine."""

    code = "engine"

    def __init__(self, message: str, context: dict | None = None):
        super().__init__(message)
        self.context = context or {}


class NoiseFloorError(EngineError):
    """Transmitted signal provably below double-precision round-off."""

    code = "noise_floor"


class NormalizationError(EngineError):
    """Recorded current fails positivity beyond tolerance."""

    code = "normalization"


class BoundaryLeakError(EngineError):
    """Wave packet reached the grid edge above the leak tolerance."""

    code = "boundary_leak"


class StabilityError(EngineError):
    """Time step too large for the grid's energy range."""

    code = "stability"


class NewtonError(EngineError):
    """Newton iteration failed to converge."""

    code = "newton"


class BranchJumpError(EngineError):
    """Discontinuity detected along an analytic continuation."""

    code = "branch_jump"


class FoldError(EngineError):
    """Branch fold (caustic) within the requested window."""

    code = "fold"


class LatticeError(EngineError):
    """Time lattice too short or too coarse for the requested solution."""

    code = "lattice"
