"""Shared domain types, unit conventions and frequency-plan bookkeeping.

Conventions used throughout the package:

* configuration frequencies and rates are cyclic (Hz); spectra are
  expressed in the normalized Fourier variable ``omega_norm = Omega/gamma``
  so the rad/s-vs-Hz choice cancels,
* the vacuum (shot-noise) variance of a single-mode quadrature is 1,
* phases are stored in (-pi, pi] and compared modulo 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class EprlockError(Exception):
    """Base class for package errors."""


class ConfigError(EprlockError):
    """Invalid or inconsistent configuration input."""


class PhysicsDomainError(EprlockError, ValueError):
    """Parameters outside the physically meaningful domain."""


class AboveThresholdError(PhysicsDomainError):
    """Pump at or above oscillation threshold: no steady state."""


class NumericalError(EprlockError):
    """A numerical procedure failed (singular system, no convergence)."""


def wrap_phase(phi):
    """Wrap an angle (scalar or array) into (-pi, pi]."""
    return np.pi - np.remainder(np.pi - np.asarray(phi), 2.0 * np.pi)


def db(linear_variance) -> float:
    """Convert a positive linear variance ratio to decibels."""
    v = np.asarray(linear_variance, dtype=float)
    if np.any(v <= 0.0):
        raise PhysicsDomainError("dB conversion requires a positive variance")
    return 10.0 * np.log10(linear_variance)


def _require_finite(name: str, *values) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")


@dataclass(frozen=True)
class FrequencyPlan:
    """Wavelengths of the three fields plus the coherent-lock offset (Hz)."""

    lambda_s: float
    lambda_i: float
    lambda_p: float
    omega_cl_offset: float

    def __post_init__(self):
        for name in ("lambda_s", "lambda_i", "lambda_p"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.omega_cl_offset <= 0:
            raise ValueError("omega_cl_offset must be positive")


def validate_frequency_plan(plan: FrequencyPlan) -> tuple[bool, str]:
    """Check energy conservation 1/ls + 1/li = 1/lp to 1e-3 relative.

    Returns (ok, diagnostic).
    """
    lhs = 1.0 / plan.lambda_s + 1.0 / plan.lambda_i
    rhs = 1.0 / plan.lambda_p
    rel = abs(lhs - rhs) / rhs
    ok = rel < 1e-3
    msg = (
        f"1/lambda_s + 1/lambda_i = {lhs:.6e} 1/m vs 1/lambda_p = {rhs:.6e} 1/m "
        f"(relative mismatch {rel:.3e})"
    )
    return ok, msg


@dataclass(frozen=True)
class CavityParams:
    """Decay rates (Hz), detuning (Hz) and derived normalized quantities."""

    gamma_in: float
    gamma_out: float
    mu: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.gamma_in < 0 or self.gamma_out < 0 or self.mu < 0:
            raise ValueError("decay rates must be non-negative")
        if self.gamma_total <= 0:
            raise ValueError("total decay rate must be positive")
        _require_finite("delta", self.delta)

    @property
    def gamma_total(self) -> float:
        return self.gamma_in + self.gamma_out + self.mu

    @property
    def delta_norm(self) -> float:
        return self.delta / self.gamma_total


@dataclass(frozen=True)
class PumpParams:
    """Normalized pump amplitude (relative to threshold) and pump phase."""

    epsilon: float
    phi_p: float = 0.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        _require_finite("phi_p", self.phi_p)

    @property
    def below_threshold(self) -> bool:
        return self.epsilon < 1.0


@dataclass(frozen=True)
class SeedParams:
    """Injected coherent-lock seed: real amplitude (sqrt(photons/s)) and phase."""

    alpha_cl: float
    seed_phase: float = 0.0

    def __post_init__(self):
        if self.alpha_cl < 0:
            raise ValueError("alpha_cl must be non-negative")
        _require_finite("seed_phase", self.seed_phase)


@dataclass(frozen=True)
class DetectionParams:
    """Homodyne efficiencies, electronic setpoint phases and combination weight."""

    eta_s: float
    eta_i: float
    theta_ref_s: float = 0.0
    theta_ref_i: float = 0.0
    g_weight: float = 1.0

    def __post_init__(self):
        for name in ("eta_s", "eta_i"):
            eta = getattr(self, name)
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.g_weight <= 0:
            raise ValueError("g_weight must be positive")


@dataclass(frozen=True)
class PhaseNoiseSpec:
    """Per-arm residual phase-noise standard deviations and covariance."""

    sigma_s: float
    sigma_i: float
    cov_si: float = 0.0

    def __post_init__(self):
        if self.sigma_s < 0 or self.sigma_i < 0:
            raise ValueError("sigma must be non-negative")
        if abs(self.cov_si) > self.sigma_s * self.sigma_i + 1e-15:
            raise ValueError("cov_si violates the Cauchy-Schwarz bound")

    @property
    def sigma_theta(self) -> float:
        """Common-mode standard deviation sqrt((s^2 + i^2 + 2 cov)/4)."""
        var = (self.sigma_s**2 + self.sigma_i**2 + 2.0 * self.cov_si) / 4.0
        if var < 0:
            raise PhysicsDomainError("negative common-mode variance")
        return math.sqrt(var)


def complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def pair_to_complex(pair) -> complex:
    re, im = float(pair[0]), float(pair[1])
    _require_finite("complex amplitude", re, im)
    return complex(re, im)


@dataclass(frozen=True)
class SystemConfig:
    """Typed view of the JSON configuration blocks shared by all modules."""

    plan: FrequencyPlan
    cavity: CavityParams
    pump: PumpParams
    seed: SeedParams
    detection: DetectionParams
    phase_noise: PhaseNoiseSpec


_BLOCK_TYPES = {
    "frequency_plan": FrequencyPlan,
    "cavity": CavityParams,
    "pump": PumpParams,
    "seed": SeedParams,
    "detection": DetectionParams,
    "phase_noise": PhaseNoiseSpec,
}


def config_from_dict(raw: dict) -> SystemConfig:
    """Build the typed configuration from a parsed JSON dict.

    Unknown keys inside a block and missing blocks raise ConfigError.
    """
    blocks = {}
    for key, cls in _BLOCK_TYPES.items():
        if key not in raw:
            raise ConfigError(f"missing configuration block '{key}'")
        if not isinstance(raw[key], dict):
            raise ConfigError(f"configuration block '{key}' must be an object")
        try:
            blocks[key] = cls(**raw[key])
        except TypeError as exc:
            raise ConfigError(f"bad fields in block '{key}': {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"invalid values in block '{key}': {exc}") from exc
    return SystemConfig(
        plan=blocks["frequency_plan"],
        cavity=blocks["cavity"],
        pump=blocks["pump"],
        seed=blocks["seed"],
        detection=blocks["detection"],
        phase_noise=blocks["phase_noise"],
    )
