"""Time-domain simulation of the dual homodyne phase locks.

Beat notes are represented at complex baseband (the analytic envelope
around the +-3 MHz offset), so sample rates stay in the 100 kHz-1 MHz
range. Quantum noise enters as classical correlated Gaussian processes
with the correct second moments, which is exact for the Gaussian
quantities measured here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from . import kernels
from .model import PhysicsDomainError
from .nopo import LockFieldState
from .spectra import two_mode_variance

# Residual larger than this counts as out of lock.
IN_LOCK_THRESHOLD = 0.1  # rad

# Homodyne dark-noise clearance over shot noise, modeled as additive white
# noise when enabled.
DARK_NOISE_CLEARANCE_DB = 24.0


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real-valued record."""

    sample_rate: float
    samples: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.samples.size == 0:
            raise ValueError("samples must be non-empty")

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class DisturbanceSpec:
    """Synthetic phase disturbance: random walk + white noise + lines + ramp."""

    random_walk_diffusion: float = 0.0  # rad^2/s
    white_noise_density: float = 0.0  # rad^2/Hz, one-sided
    sinusoids: tuple = ()  # (frequency Hz, amplitude rad, phase rad)
    ramp_rate: float = 0.0  # rad/s, deterministic drift
    rng_seed: int = 0

    def __post_init__(self):
        if self.random_walk_diffusion < 0 or self.white_noise_density < 0:
            raise ValueError("noise densities must be non-negative")
        object.__setattr__(
            self, "sinusoids", tuple(tuple(float(x) for x in s) for s in self.sinusoids)
        )


@dataclass(frozen=True)
class LoopConfig:
    """PI servo with demodulation low-pass and a resonant PZT actuator."""

    kp: float = 0.5
    ki: float = 1.2e4  # 1/s
    lpf_cutoff: float = 1e4  # Hz
    actuator_range: float = 20.0  # rad
    actuator_resonance: float = 2e4  # Hz
    actuator_q: float = 10.0
    theta_ref: float = 0.0
    beat_sign: int = 1

    def __post_init__(self):
        if self.lpf_cutoff <= 0 or self.actuator_range <= 0:
            raise ValueError("lpf_cutoff and actuator_range must be positive")
        if self.actuator_resonance <= 0 or self.actuator_q <= 0:
            raise ValueError("actuator parameters must be positive")
        if self.beat_sign not in (1, -1):
            raise ValueError("beat_sign must be +1 or -1")


@dataclass(frozen=True)
class LockRunResult:
    """Residual phases of both loops plus lock-quality bookkeeping."""

    residual_theta_s: TimeSeries
    residual_theta_i: TimeSeries
    common_mode_theta: TimeSeries
    saturation_events: np.ndarray  # times (s)
    in_lock_fraction: float
    unstable: bool = False

    def __post_init__(self):
        expected = 0.5 * (self.residual_theta_s.samples + self.residual_theta_i.samples)
        if not np.array_equal(expected, self.common_mode_theta.samples):
            raise ValueError("common_mode_theta must be the pointwise arm average")


def synth_disturbance(spec: DisturbanceSpec, duration: float, rate: float) -> TimeSeries:
    """Seeded disturbance record; bit-reproducible for a fixed seed."""
    n = int(round(duration * rate))
    if n < 2:
        raise ValueError("duration*rate must be at least 2 samples")
    dt = 1.0 / rate
    rng = np.random.default_rng(spec.rng_seed)
    out = np.zeros(n)
    if spec.random_walk_diffusion > 0:
        steps = rng.normal(0.0, math.sqrt(spec.random_walk_diffusion * dt), n)
        out += np.cumsum(steps)
    if spec.white_noise_density > 0:
        # one-sided density W over [0, Nyquist] -> sample variance W*rate/2
        out += rng.normal(0.0, math.sqrt(spec.white_noise_density * rate / 2.0), n)
    t = np.arange(n) * dt
    for freq, amp, phase in spec.sinusoids:
        out += amp * np.sin(2.0 * np.pi * freq * t + phase)
    if spec.ramp_rate != 0.0:
        out += spec.ramp_rate * t
    return TimeSeries(sample_rate=rate, samples=out, label="rad")


def error_signal(theta, amp_lo, amp_cl, theta_ref, beat_sign):
    """Demodulated beat-note error signal |LO||CL| sin(theta + beat_sign*theta_ref).

    beat_sign is +1 for the signal arm and -1 for the idler arm, matching
    the opposite beat-note frequencies.
    """
    if amp_lo < 0 or amp_cl < 0:
        raise ValueError("amplitudes must be non-negative")
    if beat_sign not in (1, -1):
        raise ValueError("beat_sign must be +1 or -1")
    return amp_lo * amp_cl * np.sin(np.asarray(theta) + beat_sign * theta_ref)


def lockin_demodulate(
    baseband_iq: np.ndarray, sample_rate: float, theta_ref: float, lpf_cutoff: float
) -> TimeSeries:
    """Rotate the complex baseband beat by -theta_ref, take the quadrature
    component, and first-order low-pass it.
    """
    if lpf_cutoff >= sample_rate / 4.0:
        raise ValueError("lpf_cutoff must be below sample_rate/4")
    z = np.asarray(baseband_iq, dtype=complex) * np.exp(-1j * theta_ref)
    quad = z.imag
    alpha = 1.0 - math.exp(-2.0 * math.pi * lpf_cutoff / sample_rate)
    filtered = lfilter([alpha], [1.0, -(1.0 - alpha)], quad)
    return TimeSeries(sample_rate=sample_rate, samples=filtered, label="error signal")


def _run_arm(loop: LoopConfig, dist: np.ndarray, rate: float, amp: float):
    dt = 1.0 / rate
    lpf_alpha = 1.0 - math.exp(-2.0 * math.pi * loop.lpf_cutoff * dt)
    w_res = 2.0 * math.pi * loop.actuator_resonance
    return kernels.servo_loop(
        np.ascontiguousarray(dist, dtype=np.float64),
        dt,
        float(amp),
        float(loop.kp),
        float(loop.ki),
        lpf_alpha,
        w_res,
        w_res / loop.actuator_q,
        float(loop.actuator_range),
    )


def run_closed_loop(
    loop_s: LoopConfig,
    loop_i: LoopConfig,
    disturbances: tuple[DisturbanceSpec, DisturbanceSpec, DisturbanceSpec],
    lock_fields: LockFieldState,
    duration: float,
    rate: float,
) -> LockRunResult:
    """Simulate both phase locks sample by sample.

    ``disturbances`` is (signal arm, idler arm, pump phase); pump-phase
    fluctuations enter the idler loop because the idler lock field phase
    tracks phi_p - phi_CLs. An unstable loop is reported through the
    ``unstable`` flag rather than an exception.
    """
    if rate < 20.0 * max(loop_s.lpf_cutoff, loop_i.lpf_cutoff):
        raise ValueError("rate must be at least 20x the demodulation cutoff")
    spec_s, spec_i, spec_pump = disturbances
    d_s = synth_disturbance(spec_s, duration, rate).samples
    d_i = synth_disturbance(spec_i, duration, rate).samples
    d_p = synth_disturbance(spec_pump, duration, rate).samples
    d_i_total = d_i + d_p

    amp_s = abs(lock_fields.a_cls)
    amp_i = abs(lock_fields.a_cli)
    res_s, sat_s = _run_arm(loop_s, d_s, rate, amp_s)
    res_i, sat_i = _run_arm(loop_i, d_i_total, rate, amp_i)

    common = 0.5 * (res_s + res_i)
    t = np.arange(res_s.size) / rate
    sat_times = np.sort(np.concatenate([t[sat_s], t[sat_i]]))
    in_lock = float(
        np.mean((np.abs(res_s) < IN_LOCK_THRESHOLD) & (np.abs(res_i) < IN_LOCK_THRESHOLD))
    )

    # Diverging residual variance marks an unstable loop: compare the last
    # quarter of the record against the second quarter (first quarter is
    # acquisition transient).
    n = res_s.size
    unstable = False
    if n >= 8:
        for r in (res_s, res_i):
            early = float(np.std(r[n // 4 : n // 2]))
            late = float(np.std(r[3 * n // 4 :]))
            if late > 10.0 * max(early, 1e-12) and late > 1.0:
                unstable = True
    return LockRunResult(
        residual_theta_s=TimeSeries(rate, res_s, "rad"),
        residual_theta_i=TimeSeries(rate, res_i, "rad"),
        common_mode_theta=TimeSeries(rate, common, "rad"),
        saturation_events=sat_times,
        in_lock_fraction=in_lock,
        unstable=unstable,
    )


def calibrate_error_signal(scan: TimeSeries, phase_span: float | None = None):
    """Peak-to-peak fringe amplitude and calibration factor beta = 2/S_pp.

    ``phase_span`` is the LO phase range swept during the scan; when given
    it must cover at least one full fringe.
    """
    if phase_span is not None and phase_span < 2.0 * math.pi:
        raise PhysicsDomainError(
            f"scan covers {phase_span:.3f} rad < 2*pi: incomplete fringe"
        )
    s_pp = float(np.max(scan.samples) - np.min(scan.samples))
    if s_pp <= 0:
        raise PhysicsDomainError("flat scan: cannot calibrate")
    return s_pp, 2.0 / s_pp


def _lorentzian_filter(white: np.ndarray, rate: float, gamma: float, epsilon: float, sign: str) -> np.ndarray:
    """Shape unit white noise to the corrected lossless two-mode spectrum."""
    n = white.size
    freqs = np.fft.rfftfreq(n, d=1.0 / rate)
    h = np.sqrt(two_mode_variance(epsilon, 1.0, freqs / gamma, sign))
    return np.fft.irfft(np.fft.rfft(white) * h, n)


def _resample_to(series: TimeSeries, n: int, rate: float) -> np.ndarray:
    t_new = np.arange(n) / rate
    return np.interp(t_new, series.times, series.samples)


def synth_theta_process(
    sigma: float, cutoff: float, duration: float, rate: float, rng_seed: int
) -> TimeSeries:
    """Stationary low-pass Gaussian phase process with exact RMS ``sigma``."""
    n = int(round(duration * rate))
    rng = np.random.default_rng(rng_seed)
    white = rng.standard_normal(n)
    alpha = 1.0 - math.exp(-2.0 * math.pi * cutoff / rate)
    x = lfilter([alpha], [1.0, -(1.0 - alpha)], white)
    std = float(np.std(x))
    if sigma > 0 and std > 0:
        x *= sigma / std
    else:
        x = np.zeros(n)
    return TimeSeries(sample_rate=rate, samples=x, label="rad")


def synth_epr_photocurrents(
    epsilon: float,
    eta_s: float,
    eta_i: float,
    gamma: float,
    residual_theta: tuple[TimeSeries, TimeSeries] | None,
    duration: float,
    rate: float,
    rng_seed: int,
    dark_noise: bool = False,
) -> tuple[TimeSeries, TimeSeries]:
    """Correlated homodyne photocurrent records with EPR statistics.

    Construction: four independent white-noise records are shaped to the
    corrected squeezing/anti-squeezing Lorentzians (the joint quadratures
    and their orthogonal counterparts), rotated per sample by the
    instantaneous common-mode phase, transformed to the per-arm currents,
    and mixed with vacuum for the 1-eta loss of each arm. Deterministic
    for a fixed seed.
    """
    if not 0.0 <= epsilon < 1.0:
        raise PhysicsDomainError(f"epsilon = {epsilon} outside [0, 1)")
    n = int(round(duration * rate))
    rng = np.random.default_rng(rng_seed)
    q_minus = _lorentzian_filter(rng.standard_normal(n), rate, gamma, epsilon, "minus")
    q_plus = _lorentzian_filter(rng.standard_normal(n), rate, gamma, epsilon, "plus")
    q_minus_orth = _lorentzian_filter(rng.standard_normal(n), rate, gamma, epsilon, "plus")
    q_plus_orth = _lorentzian_filter(rng.standard_normal(n), rate, gamma, epsilon, "minus")

    if residual_theta is not None:
        r_s, r_i = residual_theta
        theta = 0.5 * (_resample_to(r_s, n, rate) + _resample_to(r_i, n, rate))
        c, s = np.cos(theta), np.sin(theta)
        q_minus = q_minus * c + q_minus_orth * s
        q_plus = q_plus * c + q_plus_orth * s

    q_s = (q_plus + q_minus) / math.sqrt(2.0)
    q_i = (q_plus - q_minus) / math.sqrt(2.0)
    q_s = math.sqrt(eta_s) * q_s + math.sqrt(1.0 - eta_s) * rng.standard_normal(n)
    q_i = math.sqrt(eta_i) * q_i + math.sqrt(1.0 - eta_i) * rng.standard_normal(n)
    if dark_noise:
        dark = 10.0 ** (-DARK_NOISE_CLEARANCE_DB / 20.0)
        q_s = q_s + dark * rng.standard_normal(n)
        q_i = q_i + dark * rng.standard_normal(n)
    return (
        TimeSeries(sample_rate=rate, samples=q_s, label="shot-noise units"),
        TimeSeries(sample_rate=rate, samples=q_i, label="shot-noise units"),
    )


def shot_noise_reference(duration: float, rate: float, rng_seed: int) -> TimeSeries:
    """Unit-variance white record used as the shot-noise normalization."""
    n = int(round(duration * rate))
    rng = np.random.default_rng(rng_seed)
    return TimeSeries(sample_rate=rate, samples=rng.standard_normal(n), label="shot-noise units")


def band_rms(
    series: TimeSeries, f_lo: float, f_hi: float, shot_reference: TimeSeries
) -> float:
    """Band-integrated PSD of ``series`` normalized to the shot reference.

    Returns a variance in shot-noise units (the squared normalized RMS).
    """
    from .estimation import integrate_psd, welch_psd

    nyquist = series.sample_rate / 2.0
    if not 0.0 <= f_lo < f_hi <= nyquist:
        raise ValueError(f"band [{f_lo}, {f_hi}] outside [0, Nyquist={nyquist}]")
    if shot_reference.sample_rate != series.sample_rate:
        raise ValueError("shot reference must share the series sample rate")
    num = integrate_psd(welch_psd(series), f_lo, f_hi)
    den = integrate_psd(welch_psd(shot_reference), f_lo, f_hi)
    return (num / den) ** 2
