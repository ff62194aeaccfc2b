"""Wave-packet engine: propagation primitives, drivers, and guard rails.

Primitives are checked against closed forms (free Gaussian dispersion, the
exact one-period recurrence of a coherent state in a harmonic well).  The
drivers are checked two independent ways: the recorded distribution's
normalization against the momentum-resolved mode sum, and the flux route
against the accumulated-mass route inside one run.  Frozen reference values
come from runs whose dx and dt halvings moved ln P_inf by ~1e-5 and the
density sup norm by ~5e-3; their tolerances sit an order above that.

Scenario placement note: an initial packet prepared on a potential tail is
not an asymptotic free state and radiates its off-shell content at start-up.
The 1D scenarios here keep g|x1| >= 10 (sech tail), and the 2D smoke keeps
omega*x1^2/(2*(1+omega*sigma_x^2)) >= 30 (diagonal ridge against the
oscillator ground state), which puts that radiation under the 1e-8 edge
monitor for the whole run.
"""
import math

import numpy as np
import pytest

from traversal_lab import stats
from traversal_lab.config import scenario_from_dict
from traversal_lab.errors import (BoundaryLeakError, ConfigError,
                                  NoiseFloorError, StabilityError)
from traversal_lab.model import (ROOT2, barrier_1d, momentum_density,
                                 transmission_log)
from traversal_lab.qprop import (GridState, detector_probability, evolve,
                                 transmission_mode_sum,
                                 traversal_distribution_exact,
                                 traversal_distribution_exact_2d)

CHEAP_1D = {"dimension": 1, "g2": 0.1, "g_p0": 1.3, "sigma_p2": 0.02,
            "g_x1": -10.0, "g_x2": 6.0}


class TestEvolve:
    def test_free_dispersion_matches_closed_form(self):
        n, dx = 1024, 0.05
        x = -25.6 + dx * np.arange(n)
        s0, p0, t = 1.0, 3.0, 4.0
        psi = (2 * math.pi * s0**2) ** -0.25 \
            * np.exp(-(x + 10.0) ** 2 / (4 * s0**2) + 1j * p0 * x)
        state = GridState(psi=psi.astype(complex), dx=dx, x0=x[0])
        out = evolve(state, np.zeros(n), 1e-3, 4000)
        s2 = s0**2 * (1 + (t / (2 * s0**2)) ** 2)
        centre = -10.0 + p0 * t
        rho = (2 * math.pi * s2) ** -0.5 * np.exp(-(x - centre) ** 2 / (2 * s2))
        err = np.max(np.abs(np.abs(out.psi) ** 2 - rho)) / rho.max()
        assert err < 1e-11
        assert out.t == pytest.approx(4.0, rel=1e-12)

    def test_free_dispersion_2d(self):
        nx, ny, dx, dy = 256, 192, 0.1, 0.12
        x = -12.8 + dx * np.arange(nx)
        y = -11.52 + dy * np.arange(ny)
        X, Y = x[:, None], y[None, :]
        psi = np.exp(-(X**2) / 4 - (Y**2) / 4 + 2j * X)
        psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * dx * dy)
        state = GridState(psi=psi.astype(complex), dx=dx, x0=x[0],
                          dy=dy, y0=y[0])
        t = 1.5
        out = evolve(state, np.zeros((nx, ny)), 1e-3, 1500)
        s2 = 1.0 + (t / 2.0) ** 2
        rho = np.exp(-((X - 3.0) ** 2) / (2 * s2) - Y**2 / (2 * s2)) \
            / (2 * math.pi * s2)
        err = np.max(np.abs(np.abs(out.psi) ** 2 - rho)) / rho.max()
        assert err < 1e-10

    def test_coherent_state_returns_after_one_period(self):
        omega = 1.0
        dx = 0.025
        x = -12.8 + dx * np.arange(1024)
        v = 0.5 * omega**2 * x**2
        psi0 = (omega / math.pi) ** 0.25 * np.exp(-omega * (x - 2.0) ** 2 / 2)
        state = GridState(psi=psi0.astype(complex), dx=dx, x0=x[0])
        period = 2 * math.pi / omega
        n = int(round(period / 5e-4))
        out = evolve(state, v, period / n, n)
        overlap = abs(np.sum(np.conj(psi0) * out.psi) * dx)
        assert abs(1.0 - overlap) < 1e-10

    def test_energy_and_norm_conserved_through_crossing(self):
        g2 = 0.1
        dx = 0.05
        x = -80.0 + dx * np.arange(3200)
        v = barrier_1d(x, g2)
        p0 = 1.3 / math.sqrt(g2)
        psi = (2 * math.pi * 16) ** -0.25 \
            * np.exp(-(x + 40.0) ** 2 / 64 + 1j * p0 * x)
        state = GridState(psi=psi.astype(complex), dx=dx, x0=x[0])

        def energy(s):
            k = 2 * math.pi * np.fft.fftfreq(s.psi.size, s.dx)
            ph = np.fft.fft(s.psi)
            ke = np.sum(0.5 * k**2 * np.abs(ph) ** 2) / np.sum(np.abs(ph) ** 2)
            return float(ke + np.sum(v * np.abs(s.psi) ** 2) * s.dx)

        e0 = energy(state)
        out = evolve(state, v, 1e-3, 20000)
        assert abs(energy(out) - e0) / e0 < 1e-11
        assert abs(np.sum(np.abs(out.psi) ** 2) * dx - 1.0) < 1e-10

    def test_input_state_not_mutated(self):
        x = -10.0 + 0.1 * np.arange(200)
        psi = np.exp(-x**2).astype(complex)
        state = GridState(psi=psi, dx=0.1, x0=x[0])
        before = state.psi.copy()
        evolve(state, np.zeros(200), 1e-3, 5)
        assert np.array_equal(state.psi, before)

    def test_oversized_step_rejected(self):
        x = -10.0 + 0.05 * np.arange(400)
        psi = np.exp(-x**2 + 3j * x).astype(complex)
        state = GridState(psi=psi, dx=0.05, x0=x[0])
        with pytest.raises(StabilityError) as exc:
            evolve(state, np.zeros(400), 0.2, 1)
        assert exc.value.context["dt"] == 0.2
        assert exc.value.context["dt"] * exc.value.context["e_phase"] >= 0.5

    def test_detector_probability_partitions_norm(self):
        x = -10.0 + 0.1 * np.arange(200)
        psi = np.exp(-((x - 1.0) ** 2) + 2j * x).astype(complex)
        psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * 0.1)
        state = GridState(psi=psi, dx=0.1, x0=x[0])
        total = detector_probability(state, x[0] - 1.0)
        assert total == pytest.approx(1.0, abs=1e-12)
        right = detector_probability(state, 0.0)
        left = total - right
        assert 0 < right < 1 and 0 < left < 1
        assert right > left  # packet centred at +1


class TestModeSum:
    def test_agrees_with_direct_quadrature(self):
        cfg = scenario_from_dict(CHEAP_1D)
        ln_p, p_hat = transmission_mode_sum(cfg)
        p = np.linspace(cfg.p0 - 8 * cfg.sigma_p, cfg.p0 + 8 * cfg.sigma_p,
                        20001)
        t = np.exp([transmission_log(pi, cfg.g2) for pi in p])
        f = momentum_density(p, cfg.p0, cfg.sigma_p2)
        direct = math.log(float(np.trapezoid(t * f, p)))
        assert ln_p == pytest.approx(direct, abs=1e-10)
        assert cfg.p0 - 2 * cfg.sigma_p < p_hat < cfg.p0 + 8 * cfg.sigma_p

    def test_deep_tunneling_value_and_saddle(self):
        # g^2 = 0.002 at g p0 = 1.35: sub-barrier by ~54 e-folds, and the
        # transmitting band pins to the barrier-top momentum g p = sqrt(2)
        cfg = scenario_from_dict({"dimension": 1, "g2": 0.002, "g_p0": 1.35,
                                  "sigma_p2": 0.02, "g_x1": -10.0,
                                  "g_x2": 10.0})
        ln_p, p_hat = transmission_mode_sum(cfg)
        assert ln_p == pytest.approx(-54.31671406, abs=1e-6)
        assert abs(cfg.g * p_hat - ROOT2) < 1e-4

    def test_moderate_saddle_tracks_packet_band(self):
        cfg = scenario_from_dict(CHEAP_1D)
        _, p_hat = transmission_mode_sum(cfg)
        assert cfg.g * p_hat == pytest.approx(1.395197, abs=1e-3)

    def test_rejects_2d_scenario(self):
        cfg = scenario_from_dict({"dimension": 2, "g2": 0.1, "g_p0": 1.52,
                                  "omega": 0.5, "g2_ey": 0.05,
                                  "sigma_p2": 0.01, "g_x1": -13.0,
                                  "g_x2": 6.0})
        with pytest.raises(ConfigError):
            transmission_mode_sum(cfg)


@pytest.fixture(scope="module")
def cheap_run():
    cfg = scenario_from_dict(CHEAP_1D)
    dist, diag = traversal_distribution_exact(cfg)
    return cfg, dist, diag


class TestExact1D:
    def test_normalization_frozen(self, cheap_run):
        _, dist, diag = cheap_run
        assert dist.log_norm == pytest.approx(-4.0708065886, abs=2e-6)
        assert diag.ln_p_inf == dist.log_norm

    def test_flux_route_agrees_with_mass_route(self, cheap_run):
        _, _, diag = cheap_run
        assert abs(diag.ln_p_inf_flux - diag.ln_p_inf) < 1e-7

    def test_mode_sum_route_agrees(self, cheap_run):
        _, _, diag = cheap_run
        assert abs(diag.extras["ln_p_inf_mode_sum"] - diag.ln_p_inf) < 1e-4

    def test_density_shape_frozen(self, cheap_run):
        _, dist, _ = cheap_run
        assert np.all(dist.rho >= 0)
        assert dist.tau[np.argmax(dist.rho)] == pytest.approx(13.76, abs=0.02)
        mean, var, _ = stats.moments(dist.tau, dist.rho)
        assert mean == pytest.approx(13.908421, rel=1e-5)
        assert var == pytest.approx(1.373195, rel=1e-4)

    def test_density_is_normalized(self, cheap_run):
        _, dist, _ = cheap_run
        assert np.trapezoid(dist.rho, dist.tau) == pytest.approx(1.0, abs=1e-6)
        assert dist.p_tau[-1] == pytest.approx(1.0, abs=1e-9)

    def test_cumulative_density_matches_passed_fraction(self, cheap_run):
        # rho and p_tau are recorded independently (current vs mass); their
        # mutual consistency is a discretization-level statement
        _, dist, _ = cheap_run
        cum = np.concatenate([[0.0], np.cumsum(
            0.5 * (dist.rho[1:] + dist.rho[:-1]) * np.diff(dist.tau))])
        assert np.max(np.abs(cum - dist.p_tau)) < 5e-4

    def test_run_is_clean(self, cheap_run):
        _, _, diag = cheap_run
        assert diag.norm_drift < 1e-10
        assert diag.edge_peak_ratio < 1e-8
        assert diag.negative_current_ratio < 1e-20
        assert "tail_filter" not in diag.extras

    def test_grid_resolution_frozen(self, cheap_run):
        _, _, diag = cheap_run
        assert diag.grid_points == 810
        assert diag.dx == pytest.approx(0.396963, abs=1e-5)
        assert diag.dt == pytest.approx(0.01, rel=1e-9)

    def test_meta_carries_config_hash(self, cheap_run):
        cfg, dist, _ = cheap_run
        assert dist.meta["config_hash"] == cfg.config_hash()
        assert dist.engine == "exact1d"

    def test_halving_dx_dt_moves_little(self, cheap_run):
        cfg, dist, diag = cheap_run
        half = scenario_from_dict({**CHEAP_1D, "grid": {
            "dx": diag.dx / 2, "dt": diag.dt / 2}})
        dist2, _ = traversal_distribution_exact(half)
        assert abs(dist2.log_norm - dist.log_norm) < 1e-4
        sup = stats.distance(dist.tau, dist.rho, dist2.tau, dist2.rho,
                             kind="sup", align_modes=False)
        assert sup < 0.02
        m1, _, _ = stats.moments(dist.tau, dist.rho)
        m2, _, _ = stats.moments(dist2.tau, dist2.rho)
        assert abs(m2 - m1) < 0.05


@pytest.fixture(scope="module")
def deep_run():
    cfg = scenario_from_dict({"dimension": 1, "g2": 0.008, "g_p0": 1.3,
                              "sigma_p2": 0.02, "g_x1": -10.0, "g_x2": 6.0})
    dist, diag = traversal_distribution_exact(cfg)
    return cfg, dist, diag


class TestSpectralFilter:
    def test_filter_engages_below_threshold(self, deep_run):
        _, _, diag = deep_run
        filt = diag.extras["tail_filter"]
        assert filt["cut"] == pytest.approx(14.8662, rel=1e-3)
        assert filt["width"] == pytest.approx(0.11445, rel=1e-2)
        assert filt["log_mass_kept"] == pytest.approx(-4.8624, abs=0.01)

    def test_deep_normalization_against_mode_sum(self, deep_run):
        _, dist, diag = deep_run
        assert dist.log_norm == pytest.approx(-42.030221, abs=1e-4)
        assert abs(diag.ln_p_inf - diag.extras["ln_p_inf_mode_sum"]) < 1e-5
        assert abs(diag.ln_p_inf_flux - diag.ln_p_inf) < 1e-6

    def test_deep_density_clean_and_frozen(self, deep_run):
        _, dist, diag = deep_run
        assert np.trapezoid(dist.rho, dist.tau) == pytest.approx(1.0,
                                                                 abs=1e-5)
        assert dist.tau[np.argmax(dist.rho)] == pytest.approx(14.56, abs=0.05)
        mean, _, _ = stats.moments(dist.tau, dist.rho)
        assert mean == pytest.approx(14.9529, rel=1e-4)
        assert diag.edge_peak_ratio < 1e-10
        assert diag.negative_current_ratio == 0.0

    def test_tail_slope_is_barrier_top_frequency(self, deep_run):
        # decades below the mode the density falls as exp(-sqrt(2) tau):
        # the log-slope equals the unstable barrier-top frequency
        _, dist, _ = deep_run
        fit = stats.tail_fit(dist.tau, dist.rho)
        assert fit.slope == pytest.approx(-ROOT2, abs=0.005)
        assert fit.r2 > 0.999

    def test_moderately_deep_runs_unfiltered(self):
        # ln P ~ -37 sits above the filter threshold; the full state
        # propagates and the tail stays signal-dominated
        cfg = scenario_from_dict({"dimension": 1, "g2": 0.06, "g_p0": 1.0,
                                  "sigma_p2": 0.02, "g_x1": -10.0,
                                  "g_x2": 6.0})
        dist, diag = traversal_distribution_exact(cfg)
        assert "tail_filter" not in diag.extras
        assert dist.log_norm == pytest.approx(-36.763386, abs=1e-4)
        assert abs(diag.ln_p_inf - diag.extras["ln_p_inf_mode_sum"]) < 1e-3
        mean, _, _ = stats.moments(dist.tau, dist.rho)
        assert mean == pytest.approx(14.6815, rel=1e-4)
        assert diag.negative_current_ratio < 1e-9


class TestGuards:
    def test_unmeasurable_scenario_refused(self):
        # predicted ln P ~ -110 with a transmitting band inseparable from
        # the bulk: no spectral cut can rescue it, so the driver refuses
        cfg = scenario_from_dict({"dimension": 1, "g2": 0.02, "g_p0": 1.0,
                                  "sigma_p2": 0.02, "g_x1": -10.0,
                                  "g_x2": 6.0})
        with pytest.raises(NoiseFloorError) as exc:
            traversal_distribution_exact(cfg)
        ctx = exc.value.context
        assert ctx["ln_p_inf_predicted"] == pytest.approx(-110.4, abs=0.5)
        assert ctx["ln_p_inf_working"] < cfg.grid.noise_floor_log

    def test_wrong_dimension_rejected_both_ways(self):
        c1 = scenario_from_dict(CHEAP_1D)
        c2 = scenario_from_dict({"dimension": 2, "g2": 0.1, "g_p0": 1.52,
                                 "omega": 0.5, "g2_ey": 0.05,
                                 "sigma_p2": 0.01, "g_x1": -13.0,
                                 "g_x2": 6.0})
        with pytest.raises(ConfigError):
            traversal_distribution_exact(c2)
        with pytest.raises(ConfigError):
            traversal_distribution_exact_2d(c1)

    def test_edge_monitor_trips_on_shallow_placement(self):
        # a packet prepared at g|x1| = 6 sits on the barrier's exponential
        # tail; the resulting start-up radiation outruns the bulk and
        # reaches the pads, which the edge monitor must refuse
        cfg = scenario_from_dict({**CHEAP_1D, "g_x1": -6.0})
        with pytest.raises(BoundaryLeakError) as exc:
            traversal_distribution_exact(cfg)
        assert exc.value.context["edge_ratio"] > 1e-8

    def test_unrepresentable_momentum_rejected(self):
        cfg = scenario_from_dict({**CHEAP_1D, "grid": {"dx": 0.7}})
        with pytest.raises(ConfigError) as exc:
            traversal_distribution_exact(cfg)
        assert "cannot represent momenta" in str(exc.value)


@pytest.fixture(scope="module")
def smoke_2d():
    cfg = scenario_from_dict({"dimension": 2, "g2": 0.1, "g_p0": 1.52,
                              "omega": 0.5, "g2_ey": 0.05, "sigma_p2": 0.01,
                              "g_x1": -13.0, "g_x2": 6.0,
                              "grid": {"t_max": 16.0, "pad_left": 50,
                                       "pad_right": 50}})
    dist, diag = traversal_distribution_exact_2d(cfg)
    return cfg, dist, diag


class TestExact2D:
    def test_channel_selection(self, smoke_2d):
        _, dist, _ = smoke_2d
        assert dist.meta["n_y"] == 0
        assert dist.meta["ey"] == pytest.approx(0.25, rel=1e-12)

    def test_normalization_frozen(self, smoke_2d):
        _, dist, _ = smoke_2d
        assert dist.log_norm == pytest.approx(-6.4128709673, abs=1e-5)

    def test_density_frozen(self, smoke_2d):
        _, dist, _ = smoke_2d
        mean, var, _ = stats.moments(dist.tau, dist.rho)
        assert mean == pytest.approx(14.104521, rel=1e-4)
        assert var == pytest.approx(1.186902, rel=1e-3)
        assert dist.tau[np.argmax(dist.rho)] == pytest.approx(14.28,
                                                              abs=0.05)
        assert np.trapezoid(dist.rho, dist.tau) == pytest.approx(1.0,
                                                                 abs=1e-3)

    def test_run_is_clean(self, smoke_2d):
        _, _, diag = smoke_2d
        assert diag.norm_drift < 1e-10
        assert diag.edge_peak_ratio < 1e-9
        assert diag.negative_current_ratio < 1e-20

    def test_engine_label(self, smoke_2d):
        _, dist, _ = smoke_2d
        assert dist.engine == "exact2d"
        assert dist.p_tau[-1] == pytest.approx(1.0, abs=1e-9)
