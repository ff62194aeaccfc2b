"""Statistics layer: Gumbel forms, tail fits and completion, distances.

Oracles here are closed forms: the minimum-type Gumbel has mean
mu + gamma*beta and variance (pi*beta)^2/6, and an exponential density
s*exp(-s*tau) has mean 1/s and variance 1/s^2, so truncation plus the
closed-form tail completion must reproduce those exactly.
"""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from traversal_lab.dist import TraversalDistribution, _cumulative
from traversal_lab.stats import (EULER_GAMMA, GumbelFit, distance, fit_gumbel,
                                 gumbel_mean_var, gumbel_pdf, moments,
                                 tail_extrapolate, tail_fit)

BETA = 1.0 / math.sqrt(2.0)


def gumbel_curve(mu=20.0, beta=BETA, lo=5.0, hi=45.0, n=2001):
    tau = np.linspace(lo, hi, n)
    return tau, gumbel_pdf(tau, mu, beta)


def as_dist(tau, rho):
    rho = rho / np.trapezoid(rho, tau)
    return TraversalDistribution(tau=tau, rho=rho,
                                 p_tau=_cumulative(tau, rho),
                                 log_norm=0.0, engine="test")


class TestGumbelForm:
    def test_mass_mean_var_against_quadrature(self):
        tau, rho = gumbel_curve(n=8001)
        mean, var, mass = moments(tau, rho)
        mu_ref, var_ref = gumbel_mean_var(20.0, BETA)
        assert mass == pytest.approx(1.0, abs=1e-10)
        assert mean == pytest.approx(mu_ref, rel=1e-8)
        assert var == pytest.approx(var_ref, rel=1e-6)
        assert var_ref == pytest.approx(math.pi**2 / 12.0, rel=1e-12)

    def test_mode_sits_at_location(self):
        tau, rho = gumbel_curve()
        assert tau[np.argmax(rho)] == pytest.approx(20.0, abs=0.03)
        # density value at the mode is 1/(e*beta)
        assert rho.max() == pytest.approx(1.0 / (math.e * BETA), rel=1e-4)

    def test_fit_recovers_parameters(self):
        tau, rho = gumbel_curve()
        fit = fit_gumbel(tau, rho)
        assert isinstance(fit, GumbelFit)
        assert fit.location == pytest.approx(20.0, abs=1e-8)
        assert fit.scale == pytest.approx(BETA, rel=1e-8)
        assert fit.sup_distance < 1e-10

    def test_fit_reports_misfit(self):
        tau = np.linspace(5.0, 45.0, 2001)
        rho = np.exp(-0.5 * ((tau - 20.0) / 1.5) ** 2)
        rho /= np.trapezoid(rho, tau)
        fit = fit_gumbel(tau, rho)
        # a symmetric curve cannot be matched by the skewed form
        assert fit.sup_distance > 0.01
        assert fit.scale > 0


class TestTailFit:
    def test_exponential_tail_slope(self):
        tau, rho = gumbel_curve()
        fit = tail_fit(tau, rho)
        # far tail of the minimum-type Gumbel decays at 1/beta
        assert fit.slope == pytest.approx(-1.0 / BETA, rel=0.02)
        assert fit.r2 > 0.999
        assert fit.window[0] > 20.0

    def test_pure_exponential_is_exact(self):
        tau = np.linspace(0.0, 12.0, 1201)
        rho = 1.3 * np.exp(-1.3 * tau)
        fit = tail_fit(tau, rho)
        assert fit.slope == pytest.approx(-1.3, rel=1e-9)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_truncated_curve_refused(self):
        tau, rho = gumbel_curve(hi=21.5)  # cut just past the mode
        with pytest.raises(ValueError, match="truncated"):
            tail_fit(tau, rho)


class TestTailExtrapolate:
    def test_completion_restores_moments(self):
        # truncate a Gumbel at ~8 e-folds below peak, complete, compare
        tau, rho = gumbel_curve(hi=20.0 + 8.0 * BETA)
        d = tail_extrapolate(as_dist(tau, rho), depth=40.0)
        mean, var, mass = moments(d.tau, d.rho)
        mu_ref, var_ref = gumbel_mean_var(20.0, BETA)
        assert mass == pytest.approx(1.0, abs=1e-6)
        assert abs(mean - mu_ref) / mu_ref < 0.01
        assert abs(var - var_ref) / var_ref < 0.01
        assert d.meta["tail_extrapolated"] is True
        assert d.meta["tail_rate"] == pytest.approx(1.0 / BETA, rel=0.05)

    def test_idempotent(self):
        tau, rho = gumbel_curve(hi=26.0)
        d = tail_extrapolate(as_dist(tau, rho))
        again = tail_extrapolate(d)
        assert again is d

    def test_non_exponential_refused(self):
        tau = np.linspace(-8.0, 8.0, 1601)
        rho = np.exp(-0.5 * tau**2)
        with pytest.raises(ValueError, match="exponential"):
            tail_extrapolate(as_dist(tau, rho), r2_min=0.999)

    def test_rising_tail_refused(self):
        t = np.linspace(0.0, 10.0, 801)
        ln = np.where(t < 0.07, 0.0, -12.5 + 0.5 * t)
        rho = np.exp(ln)
        with pytest.raises(ValueError, match="not decaying"):
            tail_extrapolate(as_dist(t, rho))


class TestMoments:
    def test_closed_form_tail_completion(self):
        # truncated exponential, completed analytically, is the full one
        s = 1.2
        tau = np.linspace(0.0, 2.5, 1251)
        rho = s * np.exp(-s * tau)
        rho /= np.trapezoid(rho, tau)
        mean, var, mass = moments(tau, rho, tail_rate=s)
        assert mean == pytest.approx(1.0 / s, rel=1e-5)
        assert var == pytest.approx(1.0 / s**2, rel=1e-4)
        assert mass == pytest.approx(1.0 / (1.0 - math.exp(-s * 2.5)),
                                     rel=1e-5)

    def test_mass_guard(self):
        tau = np.linspace(0.0, 10.0, 501)
        rho = np.exp(-tau)  # mass ~ 1 - e^-10, fine
        moments(tau, rho)
        with pytest.raises(ValueError, match="normalize"):
            moments(tau, 2.0 * rho)
        mean, var, mass = moments(tau, 2.0 * rho, check_mass=False)
        assert mass == pytest.approx(2.0, rel=1e-3)
        assert mean == pytest.approx(1.0, rel=1e-3)

    def test_bad_tail_rate(self):
        tau = np.linspace(0.0, 10.0, 501)
        rho = np.exp(-tau)
        with pytest.raises(ValueError):
            moments(tau, rho, tail_rate=-1.0)


class TestDistance:
    def test_self_distance_zero(self):
        tau, rho = gumbel_curve()
        assert distance(tau, rho, tau, rho) == pytest.approx(0.0, abs=1e-14)
        assert distance(tau, rho, tau, rho, kind="l1") == pytest.approx(
            0.0, abs=1e-13)

    def test_mode_alignment_removes_pure_shift(self):
        tau, rho = gumbel_curve()
        taus, rhos = gumbel_curve(mu=23.7, lo=8.0, hi=48.0)
        aligned = distance(tau, rho, taus, rhos)
        raw = distance(tau, rho, taus, rhos, align_modes=False)
        assert aligned < 1e-6
        assert raw > 0.1

    def test_resample_stability(self):
        # same density sampled on incommensurate grids
        a_tau = np.arange(10.0, 40.0, 0.04)
        b_tau = np.arange(9.5, 41.0, 0.053)
        a = gumbel_pdf(a_tau, 20.0, BETA)
        b = gumbel_pdf(b_tau, 20.0, BETA)
        assert distance(a_tau, a, b_tau, b, align_modes=False) < 1e-4

    def test_errors(self):
        tau, rho = gumbel_curve()
        with pytest.raises(ValueError, match="overlap"):
            distance(tau, rho, tau + 100.0, rho, align_modes=False)
        with pytest.raises(ValueError, match="kind"):
            distance(tau, rho, tau, rho, kind="l7")

    @given(st.floats(7.0, 13.0), st.floats(0.6, 2.0),
           st.floats(7.0, 13.0), st.floats(0.6, 2.0))
    def test_metric_axioms_on_bumps(self, c1, w1, c2, w2):
        tau = np.linspace(0.0, 20.0, 501)
        a = np.exp(-0.5 * ((tau - c1) / w1) ** 2)
        b = np.exp(-0.5 * ((tau - c2) / w2) ** 2)
        ab = distance(tau, a, tau, b)
        ba = distance(tau, b, tau, a)
        assert ab >= 0.0
        assert ab == pytest.approx(ba, abs=1e-9)
