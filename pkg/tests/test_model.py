"""Unit tests for shared domain types, phase conventions and configuration."""

import math

import numpy as np
import pytest

from eprlock.model import (
    CavityParams,
    ConfigError,
    DetectionParams,
    FrequencyPlan,
    PhaseNoiseSpec,
    PhysicsDomainError,
    PumpParams,
    SeedParams,
    complex_to_pair,
    config_from_dict,
    db,
    pair_to_complex,
    validate_frequency_plan,
    wrap_phase,
)


class TestWrapPhase:
    def test_identity_inside_range(self):
        for phi in (-3.0, -1.0, 0.0, 0.5, 3.0):
            assert wrap_phase(phi) == pytest.approx(phi, abs=1e-15)

    def test_half_open_interval(self):
        # pi maps to itself, -pi maps to +pi: the interval is (-pi, pi].
        assert wrap_phase(math.pi) == pytest.approx(math.pi)
        assert wrap_phase(-math.pi) == pytest.approx(math.pi)

    def test_wraps_multiples(self):
        assert wrap_phase(3.0 * math.pi / 2.0) == pytest.approx(-math.pi / 2.0)
        assert wrap_phase(2.0 * math.pi + 0.3) == pytest.approx(0.3)
        assert wrap_phase(-7.0 * math.pi) == pytest.approx(math.pi)

    def test_array_input(self):
        phis = np.array([0.0, 4.0 * math.pi, -5.0])
        out = wrap_phase(phis)
        assert out.shape == phis.shape
        np.testing.assert_allclose(out, [0.0, 0.0, -5.0 + 2.0 * math.pi], atol=1e-12)


class TestDb:
    def test_known_values(self):
        assert db(1.0) == pytest.approx(0.0)
        assert db(10.0) == pytest.approx(10.0)
        assert db(0.5) == pytest.approx(-3.0103, abs=1e-4)

    def test_rejects_nonpositive(self):
        with pytest.raises(PhysicsDomainError):
            db(0.0)
        with pytest.raises(PhysicsDomainError):
            db(-1.0)


class TestFrequencyPlan:
    def test_energy_conserving_plan_validates(self):
        plan = FrequencyPlan(
            lambda_s=1064e-9, lambda_i=852e-9, lambda_p=473e-9, omega_cl_offset=3e6
        )
        ok, msg = validate_frequency_plan(plan)
        assert ok
        assert "relative mismatch" in msg

    def test_violating_plan_fails(self):
        plan = FrequencyPlan(
            lambda_s=1064e-9, lambda_i=1064e-9, lambda_p=473e-9, omega_cl_offset=3e6
        )
        ok, _ = validate_frequency_plan(plan)
        assert not ok

    def test_rejects_nonpositive_fields(self):
        with pytest.raises(ValueError):
            FrequencyPlan(lambda_s=0.0, lambda_i=852e-9, lambda_p=473e-9, omega_cl_offset=3e6)
        with pytest.raises(ValueError):
            FrequencyPlan(lambda_s=1064e-9, lambda_i=852e-9, lambda_p=473e-9, omega_cl_offset=0.0)


class TestCavityParams:
    def test_total_rate_and_normalized_detuning(self):
        cav = CavityParams(gamma_in=2e6, gamma_out=12e6, mu=1e6, delta=3e6)
        assert cav.gamma_total == pytest.approx(15e6)
        assert cav.delta_norm == pytest.approx(0.2)

    def test_rejects_negative_rates_and_zero_total(self):
        with pytest.raises(ValueError):
            CavityParams(gamma_in=-1.0, gamma_out=1.0)
        with pytest.raises(ValueError):
            CavityParams(gamma_in=0.0, gamma_out=0.0, mu=0.0)


class TestPumpParams:
    def test_below_threshold_flag(self):
        assert PumpParams(epsilon=0.8).below_threshold
        assert not PumpParams(epsilon=1.0).below_threshold

    def test_above_threshold_constructible(self):
        # epsilon >= 1 is a valid configuration (divergent dynamics are
        # diagnosed downstream), only negative pump amplitude is rejected.
        assert PumpParams(epsilon=1.2).epsilon == 1.2
        with pytest.raises(ValueError):
            PumpParams(epsilon=-0.1)


class TestSeedParams:
    def test_rejects_negative_amplitude(self):
        with pytest.raises(ValueError):
            SeedParams(alpha_cl=-1.0)


class TestDetectionParams:
    def test_efficiency_bounds(self):
        with pytest.raises(ValueError):
            DetectionParams(eta_s=1.1, eta_i=0.9)
        with pytest.raises(ValueError):
            DetectionParams(eta_s=0.9, eta_i=-0.1)
        with pytest.raises(ValueError):
            DetectionParams(eta_s=0.9, eta_i=0.9, g_weight=0.0)


class TestPhaseNoiseSpec:
    def test_uncorrelated_common_mode(self):
        spec = PhaseNoiseSpec(sigma_s=0.01, sigma_i=0.01, cov_si=0.0)
        assert spec.sigma_theta == pytest.approx(0.01 / math.sqrt(2.0))

    def test_fully_correlated_common_mode(self):
        spec = PhaseNoiseSpec(sigma_s=0.01, sigma_i=0.01, cov_si=1e-4)
        assert spec.sigma_theta == pytest.approx(0.01)

    def test_cauchy_schwarz_enforced(self):
        with pytest.raises(ValueError):
            PhaseNoiseSpec(sigma_s=0.01, sigma_i=0.01, cov_si=2e-4)


class TestComplexPair:
    def test_round_trip(self):
        z = 1.25 - 0.5j
        assert pair_to_complex(complex_to_pair(z)) == z

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            pair_to_complex([float("nan"), 0.0])


def _valid_raw():
    return {
        "frequency_plan": {
            "lambda_s": 1064e-9,
            "lambda_i": 852e-9,
            "lambda_p": 473e-9,
            "omega_cl_offset": 3e6,
        },
        "cavity": {"gamma_in": 2e6, "gamma_out": 12e6, "mu": 1e6, "delta": 0.0},
        "pump": {"epsilon": 0.8, "phi_p": 0.0},
        "seed": {"alpha_cl": 1.0, "seed_phase": 0.0},
        "detection": {"eta_s": 0.89, "eta_i": 0.89},
        "phase_noise": {"sigma_s": 0.01, "sigma_i": 0.01},
    }


class TestConfigFromDict:
    def test_builds_typed_config(self):
        cfg = config_from_dict(_valid_raw())
        assert cfg.cavity.gamma_total == pytest.approx(15e6)
        assert cfg.pump.epsilon == 0.8
        assert cfg.detection.g_weight == 1.0

    def test_missing_block(self):
        raw = _valid_raw()
        del raw["pump"]
        with pytest.raises(ConfigError, match="pump"):
            config_from_dict(raw)

    def test_unknown_key(self):
        raw = _valid_raw()
        raw["cavity"]["gamma_bogus"] = 1.0
        with pytest.raises(ConfigError, match="cavity"):
            config_from_dict(raw)

    def test_invalid_value(self):
        raw = _valid_raw()
        raw["detection"]["eta_s"] = 2.0
        with pytest.raises(ConfigError, match="detection"):
            config_from_dict(raw)

    def test_non_object_block(self):
        raw = _valid_raw()
        raw["seed"] = [1, 2]
        with pytest.raises(ConfigError, match="seed"):
            config_from_dict(raw)
