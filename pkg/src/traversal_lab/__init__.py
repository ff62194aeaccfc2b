"""Dual-engine laboratory for barrier traversal-time distributions.

Two independent routes to the same observable rho(tau):

* ``qprop``: exact split-operator wave-packet propagation with a
  log-scaled flux recorder at the detection point.
* ``semi1d`` / ``semi2d``: semiclassical complex saddle points (closed-form
  continuation in 1D, complex-trajectory boundary-value problems in 2D).

The engines share only the model layer (potentials, initial states) and the
distribution container, never numerical results.
"""

__version__ = "0.1.0"

from .config import (GridSpec, LatticeSpec, ScenarioConfig,  # noqa: F401
                     scenario_from_dict, scenario_from_json)
from .dist import TraversalDistribution, read_csv  # noqa: F401
from .errors import ConfigError, EngineError  # noqa: F401
