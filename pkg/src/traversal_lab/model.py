"""Potentials, detector step, exact transmission, and initial states.

Everything is in units with m = hbar = 1.  The 1D barrier is
U(x) = 1/(g^2 cosh^2(g x)) with height V0 = 1/g^2 and width 1/g; the 2D
system couples a harmonic transverse mode to a Gaussian ridge along
x + y = 0.  The traversal detector adds -i*eps/g^2 times a smoothed step
that turns on to the left of the detection point x2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .errors import ConfigError

ROOT2 = math.sqrt(2.0)

# --------------------------------------------------------------------------
# potentials


def barrier_1d(x, g2):
    """U(x) = 1/(g^2 cosh^2(g x)), overflow-safe for large |x|."""
    g = math.sqrt(g2)
    u = np.minimum(np.abs(g * np.asarray(x, dtype=float)), 350.0)
    return 1.0 / (g2 * np.cosh(u) ** 2)


def barrier_2d(x, y, g2, omega):
    """U(x,y) = omega^2 y^2 / 2 + exp(-g^2 (x+y)^2 / 2) / g^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = x + y
    return 0.5 * omega**2 * y**2 + np.exp(-0.5 * g2 * w**2) / g2


def theta_smooth(u, a):
    """Smoothed step 1/(1 + exp(-u/a)); stable for real or complex u.

    For complex arguments the two-branch form keeps exp() bounded whenever
    Re(u/a) is large of either sign.
    """
    z = np.asarray(u) / a
    if np.iscomplexobj(z):
        pos = np.real(z) >= 0
        zm = np.where(pos, -z, z)
        e = np.exp(zm)
        return np.where(pos, 1.0 / (1.0 + e), e / (1.0 + e))
    from scipy.special import expit

    return expit(z)


def modified_potential_1d(x, g2, eps, g_x2, a=0.1):
    """Barrier plus the absorptive detector term -i*(eps/g^2)*step(x2 - x)."""
    g = math.sqrt(g2)
    x2 = g_x2 / g
    step = theta_smooth(x2 - np.asarray(x), a)
    return barrier_1d(x, g2) - 1j * (eps / g2) * step


def modified_potential_2d(x, y, g2, omega, eps, g_x2, a=0.1):
    g = math.sqrt(g2)
    x2 = g_x2 / g
    step = theta_smooth(x2 - np.asarray(x), a)
    return barrier_2d(x, y, g2, omega) - 1j * (eps / g2) * step


def sphaleron_frequencies(omega):
    """(omega_minus, omega_plus): unstable/stable normal-mode frequencies
    at the 2D saddle (0, 0)."""
    s = math.sqrt(1.0 + omega**4 / 4.0)
    om_minus = math.sqrt(1.0 - omega**2 / 2.0 + s)
    om_plus = math.sqrt(omega**2 / 2.0 - 1.0 + s)
    return om_minus, om_plus


# --------------------------------------------------------------------------
# exact transmission through the 1D barrier


def transmission_log(p, g2):
    """ln of the exact transmission probability at momentum p > 0.

    Evaluated fully in log space so deep-tunneling values (ln P ~ -10^3)
    come out exact instead of underflowing.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ConfigError("transmission is defined for momenta p > 0")
    g = math.sqrt(g2)
    s = math.pi * p / g
    q = 8.0 / g2**2 - 1.0
    # ln sinh^2(s) and ln cosh^2(c) via exponentials of -2s, -2c
    ln_sinh2 = 2.0 * (s + np.log1p(-np.exp(-2.0 * s)) - math.log(2.0))
    if q >= 0:
        c = 0.5 * math.pi * math.sqrt(q)
        ln_cosh2 = 2.0 * (c + np.log1p(np.exp(-2.0 * c)) - math.log(2.0))
    else:
        # very wide-weak barrier: cosh -> cos
        c = 0.5 * math.pi * math.sqrt(-q)
        ln_cosh2 = 2.0 * math.log(abs(math.cos(c)))
    return ln_sinh2 - np.logaddexp(ln_sinh2, ln_cosh2)


def transmission_coefficient_exact(p, g2):
    """Exact transmission probability; underflows to 0.0 where ln P < -745."""
    return np.exp(transmission_log(p, g2))


def transmission_log_wkb(p, g2):
    """Leading tunneling exponent -(2 pi / g^2)(sqrt2 - g p), valid g*p < sqrt2."""
    p = np.asarray(p, dtype=float)
    g = math.sqrt(g2)
    return -(2.0 * math.pi / g2) * (ROOT2 - g * p)


def critical_momenta(g2, sigma_p2, omega_minus=ROOT2):
    """(p_c1, p_c2): boundaries of the three transmission-time regimes.

    p_c2 = sqrt(2 V0) separates over-barrier flight; p_c1 is where the
    saddle of the transmitted momentum distribution reaches p_c2.
    """
    spread = 2.0 * math.pi * sigma_p2 / omega_minus
    if spread >= 1.0:
        # the p_c1 formula assumes the momentum spread fits under the
        # barrier-top scale; outside that it has no meaning, so refuse
        # rather than clamp
        raise ConfigError(
            f"momentum dispersion outside the regime-formula validity "
            f"range: 2 pi sigma_p^2 / omega_minus = {spread:.3f} >= 1",
            {"sigma_p2": float(sigma_p2)})
    g = math.sqrt(g2)
    p_c2 = ROOT2 / g
    p_c1 = p_c2 * (1.0 - spread)
    return p_c1, p_c2


# --------------------------------------------------------------------------
# initial states


def gaussian_wavepacket(x, p0, sigma_p2, x1):
    """Minimum-uncertainty packet centred at x1 with mean momentum p0.

    Momentum density is exp(-(p-p0)^2 / (2 sigma_p^2)) / (sigma_p sqrt(2 pi));
    position spread is 1/(2 sigma_p).
    """
    x = np.asarray(x, dtype=float)
    norm = (2.0 * sigma_p2 / math.pi) ** 0.25
    return norm * np.exp(-sigma_p2 * (x - x1) ** 2 + 1j * p0 * (x - x1))


def momentum_density(p, p0, sigma_p2):
    p = np.asarray(p, dtype=float)
    sigma_p = math.sqrt(sigma_p2)
    return np.exp(-((p - p0) ** 2) / (2.0 * sigma_p2)) / (sigma_p * math.sqrt(2.0 * math.pi))


def oscillator_level(omega, ey_target):
    """Nearest oscillator level to a target transverse energy.

    Returns (n, E_n) with E_n = omega*(n + 1/2).  Ties round down: the less
    excited level is kept when the target sits exactly between two levels.
    """
    n_star = ey_target / omega - 0.5
    n = max(0, math.ceil(n_star - 0.5))
    return n, omega * (n + 0.5)


def oscillator_eigenfunction(n, omega, y):
    """Normalized harmonic-oscillator eigenfunction, stable recurrence."""
    y = np.asarray(y, dtype=float)
    xi = math.sqrt(omega) * y
    phi_prev = np.zeros_like(y)
    phi = (omega / math.pi) ** 0.25 * np.exp(-0.5 * xi**2)
    for k in range(n):
        phi, phi_prev = (
            math.sqrt(2.0 / (k + 1)) * xi * phi - math.sqrt(k / (k + 1.0)) * phi_prev,
            phi,
        )
    return phi


@dataclass(frozen=True)
class InState:
    psi: np.ndarray
    p0: float
    sigma_p2: float
    x1: float
    n_y: int | None = None
    ey: float | None = None


def _check_edges(amp, label):
    rel = max(float(amp[0]), float(amp[-1])) / float(np.max(amp))
    if rel > 1e-12:
        raise ConfigError(
            f"grid too small for the initial packet: {label} boundary "
            f"amplitude is {rel:.2e} of the peak (limit 1e-12)",
            {"edge_ratio": rel})


def build_in_state(config: ScenarioConfig, x, y=None) -> InState:
    """Initial wave function on the given grid(s)."""
    if config.sigma_p2 <= 0:
        raise ConfigError("wave-packet engine needs sigma_p2 > 0")
    psi_x = gaussian_wavepacket(x, config.p0, config.sigma_p2, config.x1)
    _check_edges(np.abs(psi_x), "x")
    if config.dimension == 1:
        return InState(psi=psi_x, p0=config.p0, sigma_p2=config.sigma_p2,
                       x1=config.x1)
    if y is None:
        raise ConfigError("2D scenario needs a transverse grid")
    ey_target = config.g2_ey / config.g2
    if config.n_y is not None:
        n = config.n_y
        ey = config.omega * (n + 0.5)
    else:
        n, ey = oscillator_level(config.omega, ey_target)
    phi_y = oscillator_eigenfunction(n, config.omega, y)
    _check_edges(np.abs(phi_y), "y")
    psi = psi_x[:, None] * phi_y[None, :]
    return InState(psi=psi, p0=config.p0, sigma_p2=config.sigma_p2,
                   x1=config.x1, n_y=n, ey=ey)
