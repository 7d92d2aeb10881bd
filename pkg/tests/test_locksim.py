"""Unit tests for disturbance synthesis, the homodyne lock loops and EPR photocurrents."""

import math

import numpy as np
import pytest

from eprlock.model import PhysicsDomainError
from eprlock.nopo import LockFieldState
from eprlock import locksim


class TestTimeSeries:
    def test_times_and_duration(self):
        ts = locksim.TimeSeries(sample_rate=100.0, samples=np.zeros(50))
        assert ts.duration == pytest.approx(0.5)
        assert ts.times[1] == pytest.approx(0.01)

    def test_validation(self):
        with pytest.raises(ValueError):
            locksim.TimeSeries(sample_rate=0.0, samples=np.zeros(5))
        with pytest.raises(ValueError):
            locksim.TimeSeries(sample_rate=1.0, samples=np.array([]))


class TestSynthDisturbance:
    def test_seeded_reproducibility(self):
        spec = locksim.DisturbanceSpec(random_walk_diffusion=1.0, white_noise_density=1e-8, rng_seed=5)
        a = locksim.synth_disturbance(spec, 0.5, 1e4)
        b = locksim.synth_disturbance(spec, 0.5, 1e4)
        np.testing.assert_array_equal(a.samples, b.samples)
        other = locksim.DisturbanceSpec(random_walk_diffusion=1.0, white_noise_density=1e-8, rng_seed=6)
        assert not np.array_equal(a.samples, locksim.synth_disturbance(other, 0.5, 1e4).samples)

    def test_white_noise_sample_variance(self):
        density, rate = 1e-6, 1e5
        spec = locksim.DisturbanceSpec(white_noise_density=density, rng_seed=1)
        ts = locksim.synth_disturbance(spec, 10.0, rate)
        assert np.var(ts.samples) == pytest.approx(density * rate / 2.0, rel=0.02)

    def test_random_walk_growth(self):
        spec = locksim.DisturbanceSpec(random_walk_diffusion=2.0, rng_seed=3)
        trials = [
            locksim.synth_disturbance(
                locksim.DisturbanceSpec(random_walk_diffusion=2.0, rng_seed=s), 1.0, 1e3
            ).samples[-1]
            for s in range(400)
        ]
        # terminal value variance = diffusion * duration
        assert np.var(trials) == pytest.approx(2.0, rel=0.2)

    def test_ramp_and_sinusoid(self):
        spec = locksim.DisturbanceSpec(ramp_rate=3.0, sinusoids=((10.0, 0.5, 0.0),))
        ts = locksim.synth_disturbance(spec, 1.0, 1e4)
        t = ts.times
        np.testing.assert_allclose(
            ts.samples, 3.0 * t + 0.5 * np.sin(2.0 * np.pi * 10.0 * t), atol=1e-12
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            locksim.DisturbanceSpec(random_walk_diffusion=-1.0)
        with pytest.raises(ValueError):
            locksim.synth_disturbance(locksim.DisturbanceSpec(), 1e-9, 10.0)


class TestErrorSignal:
    def test_sinusoidal_fringe(self):
        theta = np.linspace(-math.pi, math.pi, 101)
        sig = locksim.error_signal(theta, 2.0, 3.0, 0.0, 1)
        np.testing.assert_allclose(sig, 6.0 * np.sin(theta), atol=1e-12)

    def test_beat_sign_flips_reference(self):
        plus = locksim.error_signal(0.2, 1.0, 1.0, 0.3, 1)
        minus = locksim.error_signal(0.2, 1.0, 1.0, 0.3, -1)
        assert plus == pytest.approx(math.sin(0.5))
        assert minus == pytest.approx(math.sin(-0.1))

    def test_validation(self):
        with pytest.raises(ValueError):
            locksim.error_signal(0.0, -1.0, 1.0, 0.0, 1)
        with pytest.raises(ValueError):
            locksim.error_signal(0.0, 1.0, 1.0, 0.0, 2)


class TestLockinDemodulate:
    def test_constant_phase_settles_to_quadrature(self):
        rate, theta, ref = 1e5, 0.4, 0.1
        iq = 2.0 * np.exp(1j * theta) * np.ones(20000)
        out = locksim.lockin_demodulate(iq, rate, ref, 1e3)
        assert out.samples[-1] == pytest.approx(2.0 * math.sin(theta - ref), rel=1e-6)

    def test_low_pass_rejects_fast_modulation(self):
        rate = 1e5
        t = np.arange(40000) / rate
        fast = 0.5 * np.sin(2.0 * np.pi * 2e4 * t)
        iq = np.exp(1j * fast)
        out = locksim.lockin_demodulate(iq, rate, 0.0, 100.0)
        assert np.std(out.samples[20000:]) < 0.02 * np.std(fast)

    def test_cutoff_guard(self):
        with pytest.raises(ValueError):
            locksim.lockin_demodulate(np.ones(16, dtype=complex), 100.0, 0.0, 30.0)


FIELDS = LockFieldState(a_cls=1.0 + 0j, a_cli=0.5 + 0j)


def _quiet_loop(**kw):
    base = dict(kp=0.01, ki=5e3, lpf_cutoff=1e4, actuator_range=20.0,
                actuator_resonance=2e4, actuator_q=10.0)
    base.update(kw)
    return locksim.LoopConfig(**base)


class TestRunClosedLoop:
    def test_zero_disturbance_stays_locked(self):
        quiet = locksim.DisturbanceSpec()
        result = locksim.run_closed_loop(
            _quiet_loop(), _quiet_loop(beat_sign=-1), (quiet, quiet, quiet), FIELDS, 0.2, 2e5
        )
        assert np.max(np.abs(result.common_mode_theta.samples)) < 1e-12
        assert result.in_lock_fraction == 1.0
        assert result.saturation_events.size == 0
        assert not result.unstable

    def test_suppresses_slow_drift(self):
        drift = locksim.DisturbanceSpec(random_walk_diffusion=1.0, rng_seed=11)
        quiet = locksim.DisturbanceSpec()
        result = locksim.run_closed_loop(
            _quiet_loop(), _quiet_loop(beat_sign=-1), (drift, quiet, quiet), FIELDS, 1.0, 2e5
        )
        open_loop = locksim.synth_disturbance(drift, 1.0, 2e5)
        assert np.std(result.residual_theta_s.samples) < 0.05 * np.std(open_loop.samples)
        assert result.in_lock_fraction > 0.99

    def test_pump_noise_enters_idler_arm_only(self):
        quiet = locksim.DisturbanceSpec()
        pump = locksim.DisturbanceSpec(random_walk_diffusion=1.0, rng_seed=21)
        result = locksim.run_closed_loop(
            _quiet_loop(), _quiet_loop(beat_sign=-1), (quiet, quiet, pump), FIELDS, 0.5, 2e5
        )
        assert np.max(np.abs(result.residual_theta_s.samples)) < 1e-12
        assert np.std(result.residual_theta_i.samples) > 0

    def test_ramp_beyond_range_saturates(self):
        ramp = locksim.DisturbanceSpec(ramp_rate=15.0)
        quiet = locksim.DisturbanceSpec()
        result = locksim.run_closed_loop(
            _quiet_loop(actuator_range=20.0), _quiet_loop(beat_sign=-1),
            (ramp, quiet, quiet), FIELDS, 2.0, 2e5,
        )
        assert result.saturation_events.size >= 1
        assert result.in_lock_fraction < 1.0

    def test_sample_rate_guard(self):
        quiet = locksim.DisturbanceSpec()
        with pytest.raises(ValueError, match="rate"):
            locksim.run_closed_loop(
                _quiet_loop(), _quiet_loop(beat_sign=-1), (quiet, quiet, quiet), FIELDS, 0.1, 1e5
            )

    def test_common_mode_consistency_enforced(self):
        ts = locksim.TimeSeries(1.0, np.zeros(4))
        bad = locksim.TimeSeries(1.0, np.ones(4))
        with pytest.raises(ValueError, match="common"):
            locksim.LockRunResult(
                residual_theta_s=ts, residual_theta_i=ts, common_mode_theta=bad,
                saturation_events=np.array([]), in_lock_fraction=1.0,
            )


class TestCalibrateErrorSignal:
    def test_sine_fringe(self):
        theta = np.linspace(0.0, 2.0 * math.pi, 4097)
        scan = locksim.TimeSeries(1e3, 0.7 * np.sin(theta))
        s_pp, beta = locksim.calibrate_error_signal(scan, 2.0 * math.pi)
        assert s_pp == pytest.approx(1.4, rel=1e-12)
        assert beta == pytest.approx(1.0 / 0.7, rel=1e-12)

    def test_incomplete_fringe_rejected(self):
        scan = locksim.TimeSeries(1e3, np.sin(np.linspace(0.0, 3.0, 100)))
        with pytest.raises(PhysicsDomainError, match="fringe"):
            locksim.calibrate_error_signal(scan, 3.0)

    def test_flat_scan_rejected(self):
        scan = locksim.TimeSeries(1e3, np.zeros(100))
        with pytest.raises(PhysicsDomainError, match="flat"):
            locksim.calibrate_error_signal(scan)


class TestSynthThetaProcess:
    def test_exact_rms_and_reproducibility(self):
        ts = locksim.synth_theta_process(0.01, 200.0, 2.0, 1e5, 9)
        assert np.std(ts.samples) == pytest.approx(0.01, rel=1e-12)
        again = locksim.synth_theta_process(0.01, 200.0, 2.0, 1e5, 9)
        np.testing.assert_array_equal(ts.samples, again.samples)

    def test_zero_sigma_is_silent(self):
        ts = locksim.synth_theta_process(0.0, 200.0, 0.1, 1e4, 9)
        assert np.all(ts.samples == 0.0)


class TestSynthEprPhotocurrents:
    GAMMA = 15e6

    def test_reproducibility(self):
        a = locksim.synth_epr_photocurrents(0.5, 0.9, 0.9, self.GAMMA, None, 0.5, 1e5, 42)
        b = locksim.synth_epr_photocurrents(0.5, 0.9, 0.9, self.GAMMA, None, 0.5, 1e5, 42)
        np.testing.assert_array_equal(a[0].samples, b[0].samples)
        np.testing.assert_array_equal(a[1].samples, b[1].samples)

    def test_difference_current_is_squeezed(self):
        q_s, q_i = locksim.synth_epr_photocurrents(0.8, 1.0, 1.0, self.GAMMA, None, 5.0, 2e5, 3)
        shot = locksim.shot_noise_reference(5.0, 2e5, 4)
        minus = locksim.TimeSeries(2e5, (q_s.samples - q_i.samples) / math.sqrt(2.0))
        plus = locksim.TimeSeries(2e5, (q_s.samples + q_i.samples) / math.sqrt(2.0))
        vm = locksim.band_rms(minus, 5e3, 1.5e4, shot)
        vp = locksim.band_rms(plus, 5e3, 1.5e4, shot)
        assert vm == pytest.approx(1.0 / 81.0, rel=0.15)  # (1-eps)^2/(1+eps)^2 near DC
        assert vp == pytest.approx(81.0, rel=0.15)

    def test_dark_noise_raises_floor(self):
        clean = locksim.synth_epr_photocurrents(0.8, 1.0, 1.0, self.GAMMA, None, 2.0, 1e5, 5)
        dark = locksim.synth_epr_photocurrents(0.8, 1.0, 1.0, self.GAMMA, None, 2.0, 1e5, 5, dark_noise=True)
        v_clean = np.var(clean[0].samples - clean[1].samples)
        v_dark = np.var(dark[0].samples - dark[1].samples)
        assert v_dark > v_clean

    def test_domain_check(self):
        with pytest.raises(PhysicsDomainError):
            locksim.synth_epr_photocurrents(1.0, 0.9, 0.9, self.GAMMA, None, 0.1, 1e4, 0)


class TestBandRms:
    def test_white_noise_is_unit_ratio(self):
        a = locksim.shot_noise_reference(5.0, 1e5, 1)
        b = locksim.shot_noise_reference(5.0, 1e5, 2)
        assert locksim.band_rms(a, 1e3, 2e4, b) == pytest.approx(1.0, rel=0.05)

    def test_band_and_rate_guards(self):
        a = locksim.shot_noise_reference(1.0, 1e4, 1)
        b = locksim.shot_noise_reference(1.0, 2e4, 2)
        # shot reference at a different sample rate
        with pytest.raises(ValueError):
            locksim.band_rms(a, 1e3, 4e3, b)
        # band extends past Nyquist
        with pytest.raises(ValueError):
            locksim.band_rms(a, 1e3, 6e3, a)
