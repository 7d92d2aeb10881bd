"""Spectral estimation and model fitting.

Welch PSDs (Hann window, 50% overlap by default, Parseval-normalized),
band integration for phase-noise RMS extraction, error-signal calibration,
and the two-parameter (eta, sigma_Theta) fit of squeezing-vs-pump data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sp_signal
from scipy.optimize import minimize

from .locksim import TimeSeries
from .model import NumericalError, PhysicsDomainError
from .spectra import phase_noise_variance, two_mode_variance

WINDOWS = ("hann", "rectangular")

# Upper bound for the logistic transform of sigma_Theta during fitting.
_SIGMA_MAX = 0.5


@dataclass(frozen=True)
class PsdEstimate:
    """Averaged-periodogram estimate plus the metadata that produced it."""

    frequencies: np.ndarray
    densities: np.ndarray
    segment_length: int
    overlap_fraction: float
    window: str

    def __post_init__(self):
        if np.any(self.densities < 0):
            raise ValueError("densities must be non-negative")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequencies must be strictly increasing")


@dataclass(frozen=True)
class SqueezingDataset:
    """Measured (epsilon, var_minus, var_plus, uncertainty) points.

    ``uncertainty`` is the relative 1-sigma measurement uncertainty shared
    by both branches of the point (the squeezed and anti-squeezed variances
    differ by orders of magnitude, so a single absolute error bar cannot
    describe both). Zero means "unknown"; the fit then weights equally on
    log-variance.
    """

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(float(x) for x in p) for p in self.points)
        for eps, vm, vp, _unc in pts:
            if not 0.0 <= eps < 1.0:
                raise ValueError(f"epsilon = {eps} outside [0, 1)")
            if vm <= 0 or vp <= 0:
                raise ValueError("variances must be positive")
        object.__setattr__(self, "points", pts)

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def var_minus(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def var_plus(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])

    @property
    def uncertainties(self) -> np.ndarray:
        return np.array([p[3] for p in self.points])


@dataclass(frozen=True)
class FitResult:
    eta_hat: float
    sigma_hat: float
    eta_err: float
    sigma_err: float
    residual_norm: float
    converged: bool
    at_boundary: bool = False


def welch_psd(
    series: TimeSeries,
    segment_length: int | None = None,
    overlap_fraction: float = 0.5,
    window: str = "hann",
) -> PsdEstimate:
    """One-sided Welch PSD whose band integral recovers the series variance."""
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}, got {window!r}")
    n = series.samples.size
    if segment_length is None:
        segment_length = max(8, min(n // 8, 2**16))
    if segment_length > n:
        raise ValueError("series shorter than one segment")
    if not 0.0 <= overlap_fraction <= 0.9:
        raise ValueError("overlap_fraction must lie in [0, 0.9]")
    win = "hann" if window == "hann" else "boxcar"
    freqs, dens = sp_signal.welch(
        series.samples,
        fs=series.sample_rate,
        window=win,
        nperseg=segment_length,
        noverlap=int(overlap_fraction * segment_length),
        detrend=False,
        scaling="density",
    )
    return PsdEstimate(
        frequencies=freqs,
        densities=dens,
        segment_length=int(segment_length),
        overlap_fraction=float(overlap_fraction),
        window=window,
    )


def integrate_psd(psd: PsdEstimate, f_lo: float, f_hi: float) -> float:
    """RMS value sqrt(integral of the density over [f_lo, f_hi])."""
    f = psd.frequencies
    if f_lo >= f_hi:
        raise ValueError("empty band")
    if f_lo < f[0] - 1e-12 or f_hi > f[-1] + 1e-12:
        raise ValueError(f"band [{f_lo}, {f_hi}] outside estimate range [{f[0]}, {f[-1]}]")
    mask = (f >= f_lo) & (f <= f_hi)
    if np.count_nonzero(mask) < 2:
        raise ValueError("band contains fewer than two frequency bins")
    return float(math.sqrt(np.trapezoid(psd.densities[mask], f[mask])))


def apply_calibration(series: TimeSeries, beta: float) -> TimeSeries:
    """Convert error-signal units to radians via the small-angle slope."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    return TimeSeries(
        sample_rate=series.sample_rate, samples=beta * series.samples, label="rad"
    )


def _model_variances(eps_grid: np.ndarray, eta: float, sigma: float, omega_norm: float, mode: str):
    vm = np.array([two_mode_variance(e, eta, omega_norm, "minus") for e in eps_grid])
    vp = np.array([two_mode_variance(e, eta, omega_norm, "plus") for e in eps_grid])
    vm_pn = np.array([phase_noise_variance(m, p, sigma, mode) for m, p in zip(vm, vp)])
    vp_pn = np.array([phase_noise_variance(p, m, sigma, mode) for m, p in zip(vm, vp)])
    return vm_pn, vp_pn


def _to_natural(u: np.ndarray) -> tuple[float, float]:
    eta = 1.0 / (1.0 + math.exp(-u[0]))
    sigma = _SIGMA_MAX / (1.0 + math.exp(-u[1]))
    return eta, sigma


def _to_unbounded(eta: float, sigma: float) -> np.ndarray:
    eta = min(max(eta, 1e-6), 1.0 - 1e-6)
    sigma = min(max(sigma, 1e-6 * _SIGMA_MAX), _SIGMA_MAX * (1.0 - 1e-6))
    return np.array([math.log(eta / (1.0 - eta)), math.log(sigma / (_SIGMA_MAX - sigma))])


def fit_phase_noise_model(
    data: SqueezingDataset,
    omega_norm: float = 0.0,
    mode: str = "small-angle",
    n_bootstrap: int = 200,
    bootstrap_seed: int = 0,
) -> FitResult:
    """Joint weighted least-squares fit of (eta, sigma_Theta) to both branches.

    Derivative-free simplex with 9 multi-starts on a parameter grid,
    logistic transforms keeping the parameters physical. Uncertainties come
    from the finite-difference Jacobian at the optimum, cross-checked by a
    seeded bootstrap over data points (the larger of the two is reported).
    """
    if len(data.points) < 4:
        raise ValueError("need at least 4 data points")
    eps = data.epsilons
    unc = data.uncertainties
    use_weights = np.all(unc > 0)

    def residuals(eta: float, sigma: float, vm: np.ndarray, vp: np.ndarray, w) -> np.ndarray:
        m_vm, m_vp = _model_variances(eps, eta, sigma, omega_norm, mode)
        if use_weights:
            # w is the relative uncertainty: whiten each branch by its own
            # absolute 1-sigma error.
            return np.concatenate([(m_vm - vm) / (w * vm), (m_vp - vp) / (w * vp)])
        return np.concatenate([np.log(m_vm) - np.log(vm), np.log(m_vp) - np.log(vp)])

    def objective_factory(vm, vp, w):
        def obj(u):
            eta, sigma = _to_natural(u)
            r = residuals(eta, sigma, vm, vp, w)
            return float(r @ r)

        return obj

    weights = unc if use_weights else None

    def solve(vm, vp, starts):
        obj = objective_factory(vm, vp, weights)
        best = None
        ok = False
        for eta0, sigma0 in starts:
            res = minimize(
                obj,
                _to_unbounded(eta0, sigma0),
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000},
            )
            if best is None or res.fun < best.fun:
                best = res
            ok = ok or bool(res.success)
        return best, ok

    starts = [(e, s) for e in (0.6, 0.8, 0.95) for s in (0.002, 0.01, 0.05)]
    best, converged = solve(data.var_minus, data.var_plus, starts)
    eta_hat, sigma_hat = _to_natural(best.x)
    r_opt = residuals(eta_hat, sigma_hat, data.var_minus, data.var_plus, weights)
    residual_norm = float(np.linalg.norm(r_opt))
    at_boundary = sigma_hat < 1e-4 * _SIGMA_MAX or sigma_hat > (1.0 - 1e-4) * _SIGMA_MAX

    # Finite-difference Jacobian in natural parameters.
    n_res = r_opt.size
    jac = np.empty((n_res, 2))
    h_eta = max(1e-6, 1e-6 * eta_hat)
    h_sigma = max(1e-7, 1e-6 * sigma_hat)
    jac[:, 0] = (
        residuals(min(eta_hat + h_eta, 1.0), sigma_hat, data.var_minus, data.var_plus, weights)
        - residuals(max(eta_hat - h_eta, 0.0), sigma_hat, data.var_minus, data.var_plus, weights)
    ) / (2.0 * h_eta)
    jac[:, 1] = (
        residuals(eta_hat, sigma_hat + h_sigma, data.var_minus, data.var_plus, weights)
        - residuals(eta_hat, max(sigma_hat - h_sigma, 0.0), data.var_minus, data.var_plus, weights)
    ) / (2.0 * h_sigma)
    dof = max(n_res - 2, 1)
    s2 = float(r_opt @ r_opt) / dof
    try:
        cov = s2 * np.linalg.inv(jac.T @ jac)
        eta_err = float(math.sqrt(max(cov[0, 0], 0.0)))
        sigma_err = float(math.sqrt(max(cov[1, 1], 0.0)))
    except np.linalg.LinAlgError:
        eta_err = float("nan")
        sigma_err = float("nan")

    if n_bootstrap > 0:
        rng = np.random.default_rng(bootstrap_seed)
        n_pts = len(data.points)
        etas, sigmas = [], []
        start = [(eta_hat, max(sigma_hat, 1e-3))]
        for _ in range(n_bootstrap):
            idx = rng.integers(0, n_pts, n_pts)
            try:
                boot = SqueezingDataset(points=tuple(data.points[i] for i in idx))
            except ValueError:
                continue
            nonlocal_eps = boot.epsilons
            if np.unique(nonlocal_eps).size < 3:
                continue
            sub, _ = _fit_once(boot, omega_norm, mode, start)
            if sub is not None:
                etas.append(sub[0])
                sigmas.append(sub[1])
        if len(etas) >= 10:
            eta_err = max(eta_err, float(np.std(etas)))
            sigma_err = max(sigma_err, float(np.std(sigmas)))

    return FitResult(
        eta_hat=eta_hat,
        sigma_hat=sigma_hat,
        eta_err=eta_err,
        sigma_err=sigma_err,
        residual_norm=residual_norm,
        converged=converged,
        at_boundary=at_boundary,
    )


def _fit_once(data: SqueezingDataset, omega_norm: float, mode: str, starts):
    """Single-start refit used by the bootstrap; returns (eta, sigma) or None."""
    eps = data.epsilons
    unc = data.uncertainties
    use_weights = np.all(unc > 0)

    def obj(u):
        eta, sigma = _to_natural(u)
        m_vm, m_vp = _model_variances(eps, eta, sigma, omega_norm, mode)
        if use_weights:
            r = np.concatenate(
                [
                    (m_vm - data.var_minus) / (unc * data.var_minus),
                    (m_vp - data.var_plus) / (unc * data.var_plus),
                ]
            )
        else:
            r = np.concatenate(
                [
                    np.log(m_vm) - np.log(data.var_minus),
                    np.log(m_vp) - np.log(data.var_plus),
                ]
            )
        return float(r @ r)

    best = None
    for eta0, sigma0 in starts:
        res = minimize(
            obj,
            _to_unbounded(eta0, sigma0),
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 1000},
        )
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        return None, False
    return _to_natural(best.x), bool(best.success)
