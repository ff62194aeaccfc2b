"""Semiclassical traversal-time distributions for the 1D barrier.

The stationary-phase condition for arrival at the detector couples the
initial Gaussian, the barrier's energy-dependent phase, and the free travel
into one holomorphic equation for the complex variable u = g^2 E + i eps
(E: modified energy, eps: detector strength):

    f(u; tau) = i (sqrt(2u) - P0) / (2 s2) + X21 - sqrt(2u) tau + Ln u/(u-1)

with P0 = g p0, s2 = sigma_p^2, X21 = g (x2 - x1).  Everything in this
module works on that scaled equation, so a solved branch is valid for every
g^2 at once; g^2 only enters when weights e^{Phi/g^2} are formed.

Internally the curve is parametrized by d = u - 1, the distance from the
barrier-top point: the interesting structure (log-lingering tails) lives at
|d| ~ e^{-omega_minus tau}, far below float64 granularity around u = 1
itself, while d keeps full relative precision.  The logarithm Ln(d) and the
angle arg((sqrt u + 1)/(sqrt u - 1)) are tracked continuously along the
continuation (no principal branch): anchors fix the sheet, steps unwrap it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .dist import TraversalDistribution, from_log_weights
from .errors import BranchJumpError, ConfigError, NewtonError
from .model import ROOT2, critical_momenta
from .stats import EULER_GAMMA

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# parameters and regime classification


@dataclass(frozen=True)
class Params1D:
    p0: float        # g * p0
    s2: float        # sigma_p^2
    x21: float       # g * (x2 - x1)
    g2: float

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "Params1D":
        if config.dimension != 1:
            raise ConfigError("semi1d needs a 1D scenario")
        if config.sigma_p2 <= 0:
            raise ConfigError("semi1d needs sigma_p2 > 0")
        return cls(p0=config.g_p0, s2=config.sigma_p2,
                   x21=config.g_x2 - config.g_x1, g2=config.g2)


@dataclass(frozen=True)
class RegimeReport:
    regime: str          # "stable" | "unstable" | "classical"
    g_pc1: float
    g_pc2: float
    g_p0: float
    boundary: bool = False


def classify_regime(g2, g_p0, sigma_p2) -> RegimeReport:
    """Which of the three transmission-time regimes p0 falls into.

    Momenta exactly on a critical value count as unstable (the limit
    formulas on either side diverge there, the full distribution does
    not) and come back flagged.
    """
    p_c1, p_c2 = critical_momenta(g2, sigma_p2)
    g = math.sqrt(g2)
    g_pc1, g_pc2 = g * p_c1, g * p_c2
    if g_p0 < g_pc1:
        regime = "stable"
    elif g_p0 <= g_pc2:
        regime = "unstable"
    else:
        regime = "classical"
    boundary = g_p0 in (g_pc1, g_pc2)
    return RegimeReport(regime=regime, g_pc1=g_pc1, g_pc2=g_pc2, g_p0=g_p0,
                        boundary=boundary)


# --------------------------------------------------------------------------
# tracked branches


def _track_log(z: complex, prev: complex) -> complex:
    """Value of log(z) on the sheet continuous with ``prev``."""
    raw = complex(np.log(complex(z)))
    n = round((prev.imag - raw.imag) / TWO_PI)
    return raw + 2j * math.pi * n


def _track_angle(z: complex, prev: float) -> float:
    raw = float(np.angle(complex(z)))
    n = round((prev - raw) / TWO_PI)
    return raw + TWO_PI * n


def _sqrt2u(d: complex) -> complex:
    """sqrt(2u) = sqrt(2 + 2d); principal branch (Re u > 0 in-domain)."""
    return ROOT2 * complex(np.sqrt(complex(1.0 + d)))


def _sqrtu_m1(d: complex) -> complex:
    """sqrt(1 + d) - 1 via rationalization: full relative accuracy at
    tiny |d|, where the direct difference (and complex log1p/expm1, whose
    real parts round at 1 ulp of 1) would destroy the phase."""
    return d / (complex(np.sqrt(complex(1.0 + d))) + 1.0)


# --------------------------------------------------------------------------
# the saddle equation, in d = u - 1


def _f_value(d, tau, log_d, p: Params1D) -> complex:
    ru = _sqrt2u(d)
    return 1j * (ru - p.p0) / (2.0 * p.s2) + p.x21 - ru * tau \
        + complex(np.log1p(complex(d))) - log_d


def _f_prime(d, tau, p: Params1D) -> complex:
    ru = _sqrt2u(d)
    return (1j / (2.0 * p.s2) - tau) / ru + 1.0 / (1.0 + d) - 1.0 / d


def _newton(tau, d0, log_d_prev, p: Params1D, max_iter=60):
    """Solve f = 0 from d0, carrying the Ln(d) sheet from log_d_prev.

    Returns (d, log_d).  Tolerances: hard 1e-12 * scale; if Newton steps
    fall below representable size the point is accepted at 1e-8 * scale.
    """
    d = complex(d0)
    log_d = _track_log(d, log_d_prev)
    f = _f_value(d, tau, log_d, p)
    scale = 1.0 + abs(p.x21) + abs(tau)
    tol_hard = 1e-12 * scale
    tol_soft = 1e-8 * scale
    for _ in range(max_iter):
        if abs(f) < tol_hard:
            return d, log_d
        fp = _f_prime(d, tau, p)
        du = -f / fp
        if abs(du) <= 4e-16 * abs(d):
            if abs(f) < tol_soft:
                return d, log_d
            raise NewtonError("saddle stagnated above tolerance",
                              {"tau": float(tau), "resid": float(abs(f))})
        cap = 0.7 * abs(d)
        if abs(du) > cap:
            du *= cap / abs(du)
        step = 1.0
        improved = False
        for _ in range(30):
            d_try = d + step * du
            if (1.0 + d_try).real > 0.0:
                ld_try = _track_log(d_try, log_d)
                f_try = _f_value(d_try, tau, ld_try, p)
                if abs(f_try) < abs(f):
                    d, log_d, f = d_try, ld_try, f_try
                    improved = True
                    break
            step *= 0.5
        if not improved:
            if abs(f) < tol_soft:
                return d, log_d
            raise NewtonError("saddle iteration stalled",
                              {"tau": float(tau), "resid": float(abs(f))})
    raise NewtonError("saddle iteration did not converge",
                      {"tau": float(tau), "resid": float(abs(f))})


class EnergyPoint:
    """One converged point of the saddle curve u(tau) = 1 + d(tau)."""

    __slots__ = ("tau", "d", "log_d", "chi", "params")

    def __init__(self, tau, d, log_d, chi, params: Params1D):
        self.tau = float(tau)
        self.d = complex(d)
        self.log_d = complex(log_d)   # tracked Ln(u - 1)
        self.chi = float(chi)         # tracked arg (sqrt u + 1)/(sqrt u - 1)
        self.params = params

    @property
    def u(self) -> complex:
        return 1.0 + self.d

    @property
    def eps(self) -> float:
        return self.d.imag

    @property
    def g2_energy(self) -> float:
        return 1.0 + self.d.real

    @property
    def energy(self) -> float:
        return self.g2_energy / self.params.g2

    def f_prime(self) -> complex:
        return _f_prime(self.d, self.tau, self.params)

    def phi(self) -> float:
        """Scaled exponent: rho ~ |f'|^-1 exp(phi/g^2) before normalization."""
        p = self.params
        return (self.g2_energy - 0.5 * p.p0**2) / p.s2 \
            - 2.0 * self.eps * self.tau + 2.0 * ROOT2 * self.chi

    def suppression_exponent(self) -> float:
        """F with rho ~ exp(-F/g^2); additive constants dropped."""
        return -self.phi()

    def prefactor(self) -> float:
        """Fluctuation prefactor A (up to tau-independent constants).

        A^2 = (d Re u / d p0)|_eps / Re sqrt(2u); the identity
        A * sqrt(-d eps/d tau) = |f'|^-1 / sqrt(2 s2) ties it to the
        direct |f'|^-1 weight.
        """
        p = self.params
        ru = _sqrt2u(self.d)
        denom = 2.0 * p.s2 * (self.f_prime() * np.conj(ru)).imag
        if denom <= 0:
            raise BranchJumpError(
                "prefactor lost positivity along the branch",
                {"tau": self.tau, "d": [self.d.real, self.d.imag]})
        return 1.0 / math.sqrt(denom)


# --------------------------------------------------------------------------
# anchors


def _anchor(p: Params1D):
    """Starting point (regime, tau, d, log_d, chi) of the continuation."""
    regime = classify_regime(p.g2, p.p0, p.s2).regime
    if regime == "stable":
        rt = p.p0 + TWO_PI * p.s2          # sqrt(2 u0) at the center
        u0 = 0.5 * rt**2
        d0 = u0 - 1.0                      # negative real
        tau_c = (p.x21 + math.log(u0 / (1.0 - u0))) / rt
        log_d = complex(math.log(-d0), math.pi)   # eps -> 0+ side of the cut
        chi = -math.pi
        return regime, tau_c, complex(d0), log_d, chi
    if regime == "classical":
        u0 = 0.5 * p.p0**2
        d0 = u0 - 1.0                      # positive real
        tau_c = (p.x21 + math.log(u0 / d0)) / p.p0
        log_d = complex(math.log(d0), 0.0)
        chi = 0.0
        return regime, tau_c, complex(d0), log_d, chi
    # unstable: seed deep in the tail where d = r e^{i theta*}
    theta = (ROOT2 - p.p0) / (2.0 * p.s2)
    tau_hi = (p.x21 + 14.0) / ROOT2 + 3.0
    r = math.exp(p.x21 - ROOT2 * tau_hi)
    d_seed = r * complex(math.cos(theta), math.sin(theta))
    log_d0 = complex(math.log(r), theta)
    d, log_d = _newton(tau_hi, d_seed, log_d0, p)
    z = (2.0 + _sqrtu_m1(d)) / _sqrtu_m1(d)
    chi = _track_angle(z, -theta)
    return regime, tau_hi, d, log_d, chi


# --------------------------------------------------------------------------
# branch continuation


@dataclass
class Semi1DTrace:
    tau: np.ndarray
    d: np.ndarray
    phi: np.ndarray
    ln_fprime: np.ndarray
    regime: str
    params: Params1D
    anchor_tau: float
    meta: dict = field(default_factory=dict)

    @property
    def u(self) -> np.ndarray:
        return 1.0 + self.d

    @property
    def eps(self) -> np.ndarray:
        return self.d.imag

    @property
    def g2_energy(self) -> np.ndarray:
        return 1.0 + self.d.real

    def log_weight(self) -> np.ndarray:
        """ln of the unnormalized density on the trace grid."""
        return self.phi / self.params.g2 - self.ln_fprime

    def legendre_residual(self) -> float:
        """max |dPhi/dtau - 2 eps| / max(1, |2 eps|), centered differences."""
        dphi = np.gradient(self.phi, self.tau, edge_order=2)
        target = 2.0 * self.eps
        denom = np.maximum(1.0, np.abs(target))
        return float(np.max(np.abs(dphi - target) / denom))

    def point(self, i: int) -> EnergyPoint:
        p = self.params
        d = complex(self.d[i])
        tau = float(self.tau[i])
        # chi back from the stored exponent; Ln(d) sheet back from f = 0
        chi = (self.phi[i] - (1.0 + d.real - 0.5 * p.p0**2) / p.s2
               + 2.0 * d.imag * tau) / (2.0 * ROOT2)
        ru = _sqrt2u(d)
        log_d = complex(np.log1p(complex(d))) \
            + (1j * (ru - p.p0) / (2.0 * p.s2) + p.x21 - ru * tau)
        return EnergyPoint(tau, d, log_d, chi, p)


def trace_branch_1d(params: Params1D, tau_step=0.04, depth=45.0,
                    max_points=120000) -> Semi1DTrace:
    """Continue the saddle curve across its whole weight-carrying window.

    Expands from the regime anchor in both directions on a uniform tau
    lattice until the log weight (phi/g^2 - ln|f'|) has dropped ``depth``
    below its running maximum on that side.
    """
    regime, tau_a, d_a, ld_a, chi_a = _anchor(params)

    def expand(direction):
        out = []
        tau_prev, d_prev, ld_prev, chi_prev = tau_a, d_a, ld_a, chi_a
        dd_dtau = 0.0 + 0.0j
        best = -math.inf
        n = 0
        while n < max_points:
            n += 1
            tau_next = tau_a + direction * n * tau_step
            if tau_next <= tau_step * 0.5:
                break
            d_next, ld_next, chi_next = _advance(
                tau_prev, d_prev, ld_prev, chi_prev, tau_next, dd_dtau,
                params)
            pt = EnergyPoint(tau_next, d_next, ld_next, chi_next, params)
            lnfp = math.log(abs(pt.f_prime()))
            lnw = pt.phi() / params.g2 - lnfp
            out.append((tau_next, d_next, pt.phi(), lnfp))
            best = max(best, lnw)
            if lnw < best - depth:
                break
            dd_dtau = (d_next - d_prev) / (tau_next - tau_prev)
            tau_prev, d_prev, ld_prev, chi_prev = \
                tau_next, d_next, ld_next, chi_next
        return out

    left = expand(-1.0)
    right = expand(+1.0)
    pt_a = EnergyPoint(tau_a, d_a, ld_a, chi_a, params)
    rows = left[::-1] + [(tau_a, d_a, pt_a.phi(),
                          math.log(abs(pt_a.f_prime())))] + right
    tau = np.array([r[0] for r in rows])
    d = np.array([r[1] for r in rows], dtype=complex)
    phi = np.array([r[2] for r in rows])
    lnfp = np.array([r[3] for r in rows])
    return Semi1DTrace(tau=tau, d=d, phi=phi, ln_fprime=lnfp, regime=regime,
                       params=params, anchor_tau=tau_a)


def _advance(tau_prev, d_prev, ld_prev, chi_prev, tau_next, dd_dtau, p,
             _level=0):
    """One continuation step with automatic bisection on trouble."""
    guess = d_prev + dd_dtau * (tau_next - tau_prev)
    if (1.0 + guess).real <= 0 or guess == 0:
        guess = d_prev
    try:
        d, ld = _newton(tau_next, guess, ld_prev, p)
        jump = abs(d - d_prev)
        allowed = 4.0 * max(abs(dd_dtau) * abs(tau_next - tau_prev),
                            0.02 * abs(d_prev)) + 0.5 * abs(d_prev)
        if jump > allowed:
            raise NewtonError("step jump", {"tau": tau_next})
    except NewtonError:
        if _level >= 14:
            raise BranchJumpError(
                "continuation could not cross a structure; branch jump",
                {"tau": float(tau_next)})
        tau_mid = 0.5 * (tau_prev + tau_next)
        d_m, ld_m, chi_m = _advance(tau_prev, d_prev, ld_prev, chi_prev,
                                    tau_mid, dd_dtau, p, _level + 1)
        slope = (d_m - d_prev) / (tau_mid - tau_prev)
        return _advance(tau_mid, d_m, ld_m, chi_m, tau_next, slope, p,
                        _level + 1)
    z = (2.0 + _sqrtu_m1(d)) / _sqrtu_m1(d)
    chi = _track_angle(z, chi_prev)
    if abs(chi - chi_prev) > 0.5 * math.pi and _level < 14:
        # angle moved too fast for safe unwrapping: resolve by bisection
        tau_mid = 0.5 * (tau_prev + tau_next)
        d_m, ld_m, chi_m = _advance(tau_prev, d_prev, ld_prev, chi_prev,
                                    tau_mid, dd_dtau, p, _level + 1)
        slope = (d_m - d_prev) / (tau_mid - tau_prev)
        return _advance(tau_mid, d_m, ld_m, chi_m, tau_next, slope, p,
                        _level + 1)
    return d, ld, chi


def solve_modified_energy(g2, tau, g_p0, sigma_p2, g_x1, g_x2) -> EnergyPoint:
    """Saddle point (E, eps) at a single requested tau.

    Walks the continuation from the regime anchor to tau so the branch
    sheet is the physical one.
    """
    p = Params1D(p0=g_p0, s2=sigma_p2, x21=g_x2 - g_x1, g2=g2)
    _, tau_a, d_a, ld_a, chi_a = _anchor(p)
    n_steps = max(1, int(math.ceil(abs(tau - tau_a) / 0.04)))
    taus = np.linspace(tau_a, tau, n_steps + 1)
    d_prev, ld_prev, chi_prev = d_a, ld_a, chi_a
    tau_prev = tau_a
    slope = 0.0 + 0.0j
    for t in taus[1:]:
        d, ld, chi = _advance(tau_prev, d_prev, ld_prev, chi_prev, float(t),
                              slope, p)
        if t != tau_prev:
            slope = (d - d_prev) / (t - tau_prev)
        tau_prev, d_prev, ld_prev, chi_prev = float(t), d, ld, chi
    return EnergyPoint(tau_prev, d_prev, ld_prev, chi_prev, p)


# --------------------------------------------------------------------------
# distributions and limits


def rho_semi_1d(config: ScenarioConfig, tau_step=None, depth=45.0):
    """Semiclassical rho(tau) for a 1D scenario.

    Returns (TraversalDistribution, Semi1DTrace).  The density is
    |f'(u)|^-1 exp(phi/g^2) normalized on the scanned window; the trace
    carries the saddle data for diagnostics.
    """
    p = Params1D.from_config(config)
    step = tau_step if tau_step is not None else min(config.grid.tau_step,
                                                     0.04)
    trace = trace_branch_1d(p, tau_step=step, depth=depth)
    log_w = trace.log_weight()
    slope_right = (log_w[-1] - log_w[-5]) / (trace.tau[-1] - trace.tau[-5])
    slope_left = (log_w[4] - log_w[0]) / (trace.tau[4] - trace.tau[0])
    meta = {
        "regime": trace.regime,
        "anchor_tau": trace.anchor_tau,
        "legendre_residual": trace.legendre_residual(),
        "tail_rate_right": float(-slope_right),
        "rise_rate_left": float(slope_left),
        "g_pc1": classify_regime(p.g2, p.p0, p.s2).g_pc1,
        "g_pc2": classify_regime(p.g2, p.p0, p.s2).g_pc2,
    }
    dist = from_log_weights(trace.tau, log_w, engine="semi1d", meta=meta)
    dist.meta.update(meta)
    return dist, trace


def write_trace_csv(trace: Semi1DTrace, rho, path) -> None:
    """Per-point diagnostic artifact: tau,eps,E,F,A,rho.

    ``rho`` is the normalized density on the trace grid (the distribution
    returned alongside the trace).  F is the scaled suppression exponent
    whose tau-derivative is -2 eps; A the fluctuation prefactor.
    """
    from .dist import FMT

    rho = np.asarray(rho, dtype=float)
    if rho.shape != trace.tau.shape:
        raise ConfigError("rho must live on the trace grid")
    with open(path, "w") as fh:
        fh.write("tau,eps,E,F,A,rho\n")
        for i in range(trace.tau.size):
            pt = trace.point(i)
            row = (pt.tau, pt.eps, pt.energy, pt.suppression_exponent(),
                   pt.prefactor(), rho[i])
            fh.write(",".join(FMT % v for v in row) + "\n")


def mean_traversal_semi_1d(config: ScenarioConfig, tau_step=0.04):
    """<tau> and variance of the semiclassical density, tail-completed."""
    from .stats import moments

    dist, trace = rho_semi_1d(config, tau_step=tau_step)
    rate = dist.meta.get("tail_rate_right", ROOT2)
    if rate <= 0:
        raise BranchJumpError("right tail not decaying; window too short",
                              {"rate": rate})
    mean, var, _ = moments(dist.tau, dist.rho, tail_rate=rate)
    return mean, var, dist, trace


@dataclass(frozen=True)
class GumbelLimit:
    eps0: float
    mu: float
    beta: float
    mean: float
    var: float
    omega_minus: float

    def rho(self, tau):
        from .stats import gumbel_pdf

        return gumbel_pdf(tau, self.mu, self.beta)


def gumbel_limit(g2, g_p0, sigma_p2, g_x1, g_x2) -> GumbelLimit:
    """Closed-form unstable-regime limit of rho(tau).

    eps0 = sin((sqrt2 - g p0)/(2 sigma_p^2)) exp(g(x2 - x1)); the density
    is the minimum-type Gumbel with rate omega_minus = sqrt2 and location
    ln(2 eps0/(g^2 omega_minus)) / omega_minus.
    """
    rep = classify_regime(g2, g_p0, sigma_p2)
    if rep.regime != "unstable":
        raise ConfigError(
            f"Gumbel limit applies to the unstable regime only; "
            f"g_p0={g_p0} is {rep.regime} (window ({rep.g_pc1:.4f}, "
            f"{rep.g_pc2:.4f}))")
    theta = (ROOT2 - g_p0) / (2.0 * sigma_p2)
    eps0 = math.sin(theta) * math.exp(g_x2 - g_x1)
    om = ROOT2
    beta = 1.0 / om
    mu = math.log(2.0 * eps0 / (g2 * om)) / om
    mean = mu + EULER_GAMMA * beta
    var = (math.pi * beta) ** 2 / 6.0
    return GumbelLimit(eps0=eps0, mu=mu, beta=beta, mean=mean, var=var,
                       omega_minus=om)


@dataclass(frozen=True)
class GaussianLimit:
    tau_c: float
    var: float
    u0: float
    dtau_deps: float


def gaussian_limit(g2, g_p0, sigma_p2, g_x1, g_x2) -> GaussianLimit:
    """Stable-regime center and width.

    The variance comes from implicit differentiation of f(u; tau) = 0 at
    the eps = 0 center: sigma_tau^2 = -(g^2/2) dtau/deps, no finite
    differences.
    """
    rep = classify_regime(g2, g_p0, sigma_p2)
    if rep.regime != "stable":
        raise ConfigError(f"Gaussian limit applies to the stable regime; "
                          f"g_p0={g_p0} is {rep.regime}")
    p = Params1D(p0=g_p0, s2=sigma_p2, x21=g_x2 - g_x1, g2=g2)
    _, tau_c, d0c, _, _ = _anchor(p)
    d0 = d0c.real
    if abs(d0) < 1e-6:
        raise ConfigError(
            "variance formula singular this close to the lower critical "
            "momentum; use the full distribution instead",
            {"g_p0": g_p0, "g_pc1": rep.g_pc1})
    u0 = 1.0 + d0
    rt = math.sqrt(2.0 * u0)
    fp = (1j / (2.0 * p.s2) - tau_c) / rt + 1.0 / u0 - 1.0 / d0
    # f' (dmu + i deps) - rt dtau = 0 with deps = 1
    dmu = -fp.real / fp.imag
    dtau = (fp.real * dmu - fp.imag) / rt
    var = -0.5 * g2 * dtau
    return GaussianLimit(tau_c=tau_c, var=var, u0=u0, dtau_deps=dtau)


@dataclass(frozen=True)
class OverBarrierTail:
    eps0: float
    omega_minus: float
    tau_c: float

    def log_rho_shape(self, tau):
        """ln rho up to an additive constant, valid on the far tail."""
        tau = np.asarray(tau, dtype=float)
        om = self.omega_minus
        return -om * tau - (2.0 * self.eps0 / om) * np.exp(-om * tau)


def overbarrier_tail(g2, g_p0, sigma_p2, g_x1, g_x2) -> OverBarrierTail:
    """Classical-regime tail law: rate omega_minus with an eps0 < 0
    double-exponential correction.

    eps0 is the analytic continuation of the unstable-regime coefficient;
    above the barrier the sine argument goes negative and the
    e^{-omega_minus tau} envelope survives with an opposite-sign correction.
    """
    rep = classify_regime(g2, g_p0, sigma_p2)
    if rep.regime != "classical":
        raise ConfigError(f"over-barrier tail applies to the classical "
                          f"regime; g_p0={g_p0} is {rep.regime}")
    theta = (ROOT2 - g_p0) / (2.0 * sigma_p2)
    eps0 = math.sin(theta) * math.exp(g_x2 - g_x1)
    u0 = 0.5 * g_p0**2
    tau_c = (g_x2 - g_x1 + math.log(u0 / (u0 - 1.0))) / g_p0
    return OverBarrierTail(eps0=eps0 / g2, omega_minus=ROOT2, tau_c=tau_c)


def euclidean_period(energy, g2):
    """Period of the Euclidean oscillation under the inverted barrier.

    T(E) = 2 pi / (g sqrt(2E)) for 0 < E <= V0 = 1/g^2; monotonically
    decreasing in E, T(V0) = pi sqrt 2.
    """
    energy = np.asarray(energy, dtype=float)
    v0 = 1.0 / g2
    if np.any(energy <= 0) or np.any(energy > v0 * (1 + 1e-12)):
        raise ConfigError(f"euclidean period needs 0 < E <= V0 = {v0}")
    g = math.sqrt(g2)
    return 2.0 * math.pi / (g * np.sqrt(2.0 * energy))
