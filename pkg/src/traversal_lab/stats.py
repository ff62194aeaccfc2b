"""Distribution statistics: moments with tail completion, tail fits,
Gumbel fits, and distances between normalized curves."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import least_squares

from .dist import TraversalDistribution, _cumulative

EULER_GAMMA = 0.5772156649015329


def gumbel_pdf(tau, mu, beta):
    """Minimum-type Gumbel density with mode mu and width beta."""
    z = (np.asarray(tau, dtype=float) - mu) / beta
    return np.exp(-z - np.exp(-z)) / beta


def gumbel_mean_var(mu, beta):
    return mu + EULER_GAMMA * beta, (math.pi * beta) ** 2 / 6.0


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    r2: float
    window: tuple[float, float]


def tail_fit(tau, rho, *, drop=(3.0, 12.0), min_points=8) -> TailFit:
    """Least-squares line through ln rho on the far tail.

    The window is chosen where ln rho has fallen between ``drop[0]`` and
    ``drop[1]`` below the peak, which skips the mode region but stays above
    any numerical floor.
    """
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    i_peak = int(np.argmax(rho))
    good = rho > 0
    ln = np.full_like(rho, -np.inf)
    ln[good] = np.log(rho[good])
    top = ln[i_peak]
    sel = np.zeros_like(good)
    sel[i_peak:] = True
    sel &= (ln < top - drop[0]) & (ln > top - drop[1]) & good
    if int(sel.sum()) < min_points:
        raise ValueError(
            f"tail window has {int(sel.sum())} points (<{min_points}); "
            "distribution truncated too early for a tail fit")
    t = tau[sel]
    y = ln[sel]
    A = np.vstack([t, np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return TailFit(slope=float(coef[0]), intercept=float(coef[1]), r2=r2,
                   window=(float(t[0]), float(t[-1])))


def tail_extrapolate(dist: TraversalDistribution, *, drop=(3.0, 12.0),
                     r2_min=0.99, depth=30.0) -> TraversalDistribution:
    """Complete a truncated density with its fitted exponential tail.

    The tail slope comes from ``tail_fit`` on the requested window; the
    density is continued from its last grid point with that slope until it
    has fallen ``depth`` further e-folds, then everything is renormalized.
    A curve whose tail window is not actually exponential (R^2 below
    ``r2_min``) is refused rather than silently completed.  Applying the
    operation twice is a no-op: the result carries a marker.
    """
    if dist.meta.get("tail_extrapolated"):
        return dist
    fit = tail_fit(dist.tau, dist.rho, drop=drop)
    if fit.r2 < r2_min:
        raise ValueError(
            f"tail window {fit.window} is not exponential enough to "
            f"extrapolate: R^2 = {fit.r2:.4f} < {r2_min}")
    rate = -fit.slope
    if rate <= 0:
        raise ValueError("tail is not decaying; nothing to extrapolate")
    step = float(dist.tau[-1] - dist.tau[-2])
    n_ext = int(math.ceil(depth / (rate * step)))
    t_ext = dist.tau[-1] + step * np.arange(1, n_ext + 1)
    r_ext = dist.rho[-1] * np.exp(-rate * (t_ext - dist.tau[-1]))
    tau = np.concatenate([dist.tau, t_ext])
    rho = np.concatenate([dist.rho, r_ext])
    rho /= np.trapezoid(rho, tau)
    meta = dict(dist.meta)
    meta.update({"tail_extrapolated": True, "tail_rate": rate,
                 "tail_fit_r2": fit.r2, "tail_fit_window": list(fit.window)})
    return TraversalDistribution(tau=tau, rho=rho, p_tau=_cumulative(tau, rho),
                                 log_norm=dist.log_norm, engine=dist.engine,
                                 meta=meta)


def moments(tau, rho, *, tail_rate=None, check_mass=True):
    """(mean, variance, mass) by trapezoid rule.

    With ``tail_rate`` = s > 0 the density is completed beyond the last grid
    point by rho(T) * exp(-s (tau - T)); the correction integrals are done in
    closed form.  Mean and variance refer to the completed, renormalized
    density.  Input must be normalized to 1e-3 unless ``check_mass`` is off:
    a far-off mass usually means a truncated or unnormalized curve whose
    moments would be silently wrong.
    """
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    m0 = float(np.trapezoid(rho, tau))
    if check_mass and abs(m0 - 1.0) > 1e-3:
        raise ValueError(
            f"input mass {m0:.6f} is not 1; normalize first or pass "
            "check_mass=False")
    m1 = float(np.trapezoid(rho * tau, tau))
    m2 = float(np.trapezoid(rho * tau**2, tau))
    if tail_rate is not None:
        s = float(tail_rate)
        if s <= 0:
            raise ValueError("tail_rate must be positive")
        T = float(tau[-1])
        r = float(rho[-1])
        m0 += r / s
        m1 += r * (T / s + 1.0 / s**2)
        m2 += r * (T**2 / s + 2.0 * T / s**2 + 2.0 / s**3)
    mean = m1 / m0
    var = m2 / m0 - mean**2
    return mean, var, m0


@dataclass(frozen=True)
class GumbelFit:
    location: float      # mode of the fitted density
    scale: float         # 1/decay-rate; > 0 by construction
    sup_distance: float  # max |fit - data| on the normalized curves


def fit_gumbel(tau, rho) -> GumbelFit:
    """Least-squares fit of the two-parameter Gumbel form to a density."""
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    mass = float(np.trapezoid(rho, tau))
    rho = rho / mass
    mu0 = float(tau[int(np.argmax(rho))])
    mean, var, _ = moments(tau, rho)
    beta0 = math.sqrt(max(var, 1e-12) * 6.0) / math.pi

    def resid(q):
        mu, lb = q
        return gumbel_pdf(tau, mu, math.exp(lb)) - rho

    sol = least_squares(resid, x0=[mu0, math.log(beta0)], method="lm")
    mu, lb = sol.x
    beta = math.exp(lb)
    sup = float(np.max(np.abs(sol.fun)))
    return GumbelFit(location=float(mu), scale=beta, sup_distance=sup)


def _resample(tau, rho, grid):
    spline = CubicSpline(tau, rho)
    out = spline(grid)
    out[(grid < tau[0]) | (grid > tau[-1])] = 0.0
    return np.clip(out, 0.0, None)


def distance(tau_a, rho_a, tau_b, rho_b, *, kind="sup", align_modes=True,
             n_grid=4001):
    """Distance between two densities after unit-mass normalization.

    Curves are interpolated onto a common grid; with ``align_modes`` the
    second curve is shifted so the modes coincide (interpolated vertex of a
    parabola through the discrete peak).  ``kind``: "sup" for max |diff|,
    "l1" for integrated |diff|.
    """
    tau_a = np.asarray(tau_a, dtype=float)
    rho_a = np.asarray(rho_a, dtype=float)
    tau_b = np.asarray(tau_b, dtype=float)
    rho_b = np.asarray(rho_b, dtype=float)
    shift = 0.0
    if align_modes:
        shift = _peak_location(tau_a, rho_a) - _peak_location(tau_b, rho_b)
    tau_b = tau_b + shift
    lo = max(tau_a[0], tau_b[0])
    hi = min(tau_a[-1], tau_b[-1])
    if hi <= lo:
        raise ValueError("distributions do not overlap")
    grid = np.linspace(lo, hi, n_grid)
    a = _resample(tau_a, rho_a, grid)
    b = _resample(tau_b, rho_b, grid)
    a /= np.trapezoid(a, grid)
    b /= np.trapezoid(b, grid)
    if kind == "sup":
        return float(np.max(np.abs(a - b)))
    if kind == "l1":
        return float(np.trapezoid(np.abs(a - b), grid))
    raise ValueError(f"unknown distance kind {kind!r}")


def _peak_location(tau, rho):
    i = int(np.argmax(rho))
    if i == 0 or i == len(tau) - 1:
        return float(tau[i])
    # parabolic vertex through the three points around the discrete max
    t0, t1, t2 = tau[i - 1], tau[i], tau[i + 1]
    y0, y1, y2 = rho[i - 1], rho[i], rho[i + 1]
    denom = (y0 - 2.0 * y1 + y2)
    if denom == 0:
        return float(t1)
    # uniform-grid vertex formula is fine at our spacings
    h = 0.5 * (t2 - t0)
    return float(t1 + 0.5 * h * (y0 - y2) / denom)
