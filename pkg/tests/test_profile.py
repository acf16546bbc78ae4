"""Normal form, limit ODE, long-time expansion, and scattering fits."""

import math

import numpy as np
import pytest

from kgflow.nonlinearity import monomial
from kgflow.profile import (FitResult, InsufficientData, ProfileSeries,
                            StationRecorder, UnwrapError, asymptotic_u,
                            fit_modified_scattering, frame_fields, normal_form,
                            ode_exact, ode_rk4, phi1_field, phi_fn,
                            station_samples, theta_window, w_field)
from kgflow.semiclassical import FrameConfig
from kgflow.solver import SolverConfig, linear_propagate, make_initial, run
from kgflow.spectral import Grid1D


@pytest.fixture
def frame():
    return FrameConfig(h=0.05, M=256, X=1.2)


class TestWindowsAndFields:
    def test_theta_window_plateau(self):
        x = np.array([0.0, 0.9, 0.95, 0.963, 0.975, 1.0])
        w = theta_window(x, delta0=0.05)
        assert w[0] == 1.0 and w[1] == 1.0 and w[2] == 1.0
        assert 0.0 < w[3] < 1.0
        assert w[4] == 0.0 and w[5] == 0.0

    def test_phi1_field_cubic_power(self):
        x = np.array([0.0, 0.3, 0.6])
        vals = phi1_field(monomial(u=3), x)
        expected = -(3.0 / 8.0) * (1 - x**2) ** 2
        assert np.allclose(vals, expected, atol=1e-12)

    def test_phi1_field_none_is_zero(self):
        assert np.all(phi1_field(None, np.linspace(-0.9, 0.9, 7)) == 0.0)

    def test_phi1_field_vanishes_outside_light_cone(self):
        vals = phi1_field(monomial(u=3), np.array([1.5, -2.0]))
        assert np.all(vals == 0.0)


class TestNormalForm:
    def test_no_nonlinearity_is_identity_copy(self, frame):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(frame.M) + 1j * rng.standard_normal(frame.M)
        f = normal_form(v, None, frame)
        assert np.array_equal(f, v)
        assert f is not v

    def test_correction_small_and_vanishing_with_h(self):
        P = monomial(u=3)
        errors = []
        for h in (0.1, 0.05, 0.025):
            frame = FrameConfig(h=h, M=512, X=1.2)
            v = (np.exp(-((frame.x / 0.3) ** 2)) * (1 + 0.5j)
                 * np.cos(3 * frame.x))
            f = normal_form(v, P, frame)
            err = np.max(np.abs(f - v))
            assert err < h  # explicit h prefactor in the bracket
            errors.append(err)
        assert errors[0] > errors[1] > errors[2]

    def test_delta0_validation(self, frame):
        with pytest.raises(ValueError):
            normal_form(np.zeros(frame.M), monomial(u=3), frame, delta0=0.7)


class TestLimitODE:
    def setup_method(self):
        self.f1 = np.array([0.3 + 0.4j, -0.2 + 0.1j])
        self.phi1 = np.array([-0.375, -0.2])
        self.phi = np.array([1.0, 0.95])

    def test_exact_modulus_constant(self):
        out = ode_exact(self.f1, self.phi1, self.phi, 1000.0)
        assert np.allclose(np.abs(out), np.abs(self.f1), atol=1e-14)

    def test_exact_initial_time(self):
        assert np.allclose(ode_exact(self.f1, self.phi1, self.phi, 1.0),
                           self.f1)

    def test_rk4_matches_exact(self):
        t_end = 1000.0
        num = ode_rk4(self.f1, self.phi1, self.phi, t_end, dt=0.1)
        ref = ode_exact(self.f1, self.phi1, self.phi, t_end)
        assert np.max(np.abs(num - ref)) < 1e-6

    def test_rk4_modulus_drift_small(self):
        num = ode_rk4(self.f1, self.phi1, self.phi, 1000.0, dt=0.1)
        assert np.max(np.abs(np.abs(num) - np.abs(self.f1))) < 1e-10

    def test_rk4_partial_final_step(self):
        num = ode_rk4(self.f1, self.phi1, self.phi, 2.35, dt=0.1)
        ref = ode_exact(self.f1, self.phi1, self.phi, 2.35)
        assert np.max(np.abs(num - ref)) < 1e-7

    def test_zero_phi1_is_pure_rotation(self):
        out = ode_exact(self.f1, np.zeros(2), self.phi, 7.0)
        assert np.allclose(out, self.f1 * np.exp(1j * self.phi * 6.0))


class TestAsymptoticExpansion:
    def test_free_wave_at_origin(self):
        # a = 1, Phi_1 = 0, x = 0: u ~ (eps/sqrt(t)) cos t
        eps, t = 0.1, 50.0
        val = asymptotic_u(1.0 + 0.0j, 0.0, eps, t, 0.0)
        assert val == pytest.approx(eps / math.sqrt(t) * math.cos(t), abs=1e-14)

    def test_log_phase_twist(self):
        eps, t = 0.1, 100.0
        val = asymptotic_u(1.0 + 0.0j, -0.375, eps, t, 0.0)
        phase = t - 0.375 * eps**2 * math.log(t)
        assert val == pytest.approx(eps / math.sqrt(t) * math.cos(phase),
                                    abs=1e-14)

    def test_requires_interior_point(self):
        with pytest.raises(ValueError):
            asymptotic_u(1.0, 0.0, 0.1, 2.0, 3.0)


def synthetic_series(stations, phi, amp, slope, times, c_over_t=0.0):
    series = ProfileSeries(stations=np.asarray(stations, dtype=float))
    for t in times:
        phase = (np.asarray(phi) * t + np.asarray(slope) * np.log(t)
                 + c_over_t / t)
        series.times.append(float(t))
        series.values.append(np.asarray(amp) * np.exp(1j * phase))
    return series


class TestScatteringFit:
    stations = [0.0, 0.3]

    def test_planted_slope_recovered(self):
        phi = phi_fn(self.stations)
        slope = np.array([0.01, -0.02])
        series = synthetic_series(self.stations, phi, [0.5, 0.4], slope,
                                  np.arange(1.0, 201.0))
        fit = fit_modified_scattering(series, phi)
        assert np.allclose(fit.phase_slope, slope, atol=1e-6)
        assert np.allclose(fit.amplitude, [0.5, 0.4], atol=1e-12)
        assert np.all(fit.residual_rms < 1e-8)

    def test_dispersive_tail_absorbed(self):
        # a 1/t phase correction must not alias into the log-t slope
        phi = phi_fn(self.stations)
        slope = np.array([0.005, 0.005])
        series = synthetic_series(self.stations, phi, [0.5, 0.5], slope,
                                  np.arange(1.0, 401.0), c_over_t=-0.13)
        fit = fit_modified_scattering(series, phi)
        assert np.allclose(fit.phase_slope, slope, atol=1e-6)

    def test_pure_linear_phase_gives_zero_slope(self):
        phi = phi_fn(self.stations)
        series = synthetic_series(self.stations, phi, [0.5, 0.4],
                                  np.zeros(2), np.arange(1.0, 201.0))
        fit = fit_modified_scattering(series, phi)
        assert np.all(np.abs(fit.phase_slope) < 1e-8)
        assert np.all(np.abs(fit.linear_drift) < 1e-10)

    def test_ode_data_recovers_phase_coefficient(self):
        phi = phi_fn(self.stations)
        phi1 = phi1_field(monomial(u=3), self.stations)
        f1 = np.array([0.5 + 0.0j, 0.3 + 0.2j])
        series = ProfileSeries(stations=np.asarray(self.stations))
        for t in np.arange(1.0, 301.0):
            series.times.append(float(t))
            series.values.append(ode_exact(f1, phi1, phi, float(t)))
        fit = fit_modified_scattering(series, phi, phi1_values=phi1,
                                      epsilon=1.0)
        assert np.allclose(fit.phase_slope, phi1 * np.abs(f1) ** 2, atol=1e-8)
        assert np.all(fit.relative_error < 1e-6)

    def test_insufficient_data(self):
        series = synthetic_series([0.0], [1.0], [0.5], [0.0], [1.0, 2.0])
        with pytest.raises(InsufficientData):
            fit_modified_scattering(series, [1.0])

    def test_unwrap_ambiguity_detected(self):
        series = ProfileSeries(stations=np.array([0.0]))
        for n in range(20):
            series.times.append(float(n + 1))
            series.values.append(np.array([(-1.0) ** n + 0.0j]))
        with pytest.raises(UnwrapError):
            fit_modified_scattering(series, [0.0])

    def test_epsilon_scales_amplitude(self):
        phi = phi_fn([0.0])
        series = synthetic_series([0.0], phi, [0.05], [0.0],
                                  np.arange(1.0, 101.0))
        fit = fit_modified_scattering(series, phi, epsilon=0.1)
        assert fit.amplitude[0] == pytest.approx(0.5, abs=1e-12)


class TestStationSampling:
    def test_recorder_rejects_exterior_stations(self):
        with pytest.raises(ValueError):
            StationRecorder([0.0, 0.95])

    def test_samples_match_definition(self):
        grid = Grid1D(1024, 60.0)
        state, _ = make_initial("gaussian", 0.1, grid)
        state = linear_propagate(state, 4.0)
        stations = np.array([0.0, 0.3])
        vals = station_samples(state, stations)
        from kgflow.spectral import apply_multiplier, interp_eval
        g = apply_multiplier(lambda k: (1 + k**2) ** -0.5, state.ut, grid).real
        pts = state.t * stations
        expected = np.sqrt(state.t) * (interp_eval(state.u, pts, grid)
                                       - 1j * interp_eval(g, pts, grid))
        assert np.allclose(vals, expected)

    def test_station_outside_cell(self):
        grid = Grid1D(256, 10.0)
        state, _ = make_initial("gaussian", 0.1, grid)
        state.t = 20.0
        with pytest.raises(ValueError):
            station_samples(state, [0.8])

    def test_recorder_with_run(self):
        grid = Grid1D(512, 30.0)
        config = SolverConfig(dt=0.05, t_end=5.0, epsilon=0.05)
        rec = StationRecorder([0.0])
        run(grid, None, config, observers=[rec])
        assert rec.series.times == [1.0, 2.0, 3.0, 4.0, 5.0]
        assert all(np.isfinite(v).all() for v in rec.series.values)


class TestFrameFields:
    def test_w_field_linear_evolution(self):
        # for the linear flow, |w| is transported: check the L2 norm
        grid = Grid1D(1024, 60.0)
        state, _ = make_initial("gaussian", 0.1, grid)
        w0 = w_field(state)
        later = linear_propagate(state, 9.0)
        w1 = w_field(later)
        assert np.linalg.norm(w1) == pytest.approx(np.linalg.norm(w0),
                                                   rel=1e-12)

    def test_frame_fields_shapes(self, frame):
        grid = Grid1D(2048, 60.0)
        state, _ = make_initial("gaussian", 0.1, grid)
        state = linear_propagate(state, 19.0)
        v, v_sig, v_sl = frame_fields(state, frame)
        assert v.shape == v_sig.shape == v_sl.shape == (frame.M,)
        # the weighted, localized field is no larger than the raw one
        assert np.max(np.abs(v_sl)) <= np.max(np.abs(v)) * 2.0
