"""Classical dynamics of the seeded nondegenerate parametric oscillator.

Steady-state coherent-lock output fields are computed three ways: an exact
2x2 complex linear solve (the default), a closed-form expression (with a
"corrected" and a "paper-literal" denominator variant), and long-time RK4
integration of the equations of motion. The three routes are mutually
checking oracles.

With detunings Delta_s = -Delta_i = Delta and complex coupling
G = epsilon*gamma*exp(i*phi_p), the steady state solves

    (gamma - i*Delta) alpha_s - G alpha_i^* = sqrt(2 gamma_in) alpha_CL e^{i phi_seed}
    (gamma - i*Delta) alpha_i^* - G^* alpha_s = 0

and the output fields follow from A = sqrt(2 gamma_out) * alpha.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import (
    AboveThresholdError,
    CavityParams,
    NumericalError,
    PhysicsDomainError,
    PumpParams,
    SeedParams,
)

CLOSED_FORM_VARIANTS = ("corrected", "paper-literal")

# Amplitude-explosion heuristic: |alpha| beyond this multiple of the input
# scale flags an above-threshold run.
_EXPLOSION_FACTOR = 1e6


@dataclass(frozen=True)
class LockFieldState:
    """Output amplitudes of the two coherent locking fields."""

    a_cls: complex
    a_cli: complex

    @property
    def phi_cls(self) -> float:
        return cmath.phase(self.a_cls)

    @property
    def phi_cli(self) -> float:
        return cmath.phase(self.a_cli)


@dataclass(frozen=True)
class Trajectory:
    """Time-sampled intracavity amplitudes."""

    times: np.ndarray
    alpha_s: np.ndarray
    alpha_i: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.alpha_s) == len(self.alpha_i)):
            raise ValueError("trajectory arrays must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")


def _coupling(cavity: CavityParams, pump: PumpParams) -> complex:
    return pump.epsilon * cavity.gamma_total * cmath.exp(1j * pump.phi_p)


def _drive(cavity: CavityParams, seed: SeedParams) -> complex:
    return math.sqrt(2.0 * cavity.gamma_in) * seed.alpha_cl * cmath.exp(1j * seed.seed_phase)


def _require_below_threshold(pump: PumpParams) -> None:
    if pump.epsilon >= 1.0:
        raise AboveThresholdError(
            f"epsilon = {pump.epsilon} >= 1: no below-threshold steady state"
        )


def parametric_gain(epsilon: float) -> float:
    """Amplitude gain 1/(1 - epsilon) of the below-threshold amplifier."""
    if not 0.0 <= epsilon < 1.0:
        raise PhysicsDomainError(f"epsilon = {epsilon} outside [0, 1)")
    return 1.0 / (1.0 - epsilon)


def steady_state_linear_solve(
    cavity: CavityParams, pump: PumpParams, seed: SeedParams
) -> LockFieldState:
    """Exact steady state from the 2x2 complex linear system in (alpha_s, alpha_i^*)."""
    _require_below_threshold(pump)
    gamma = cavity.gamma_total
    delta = cavity.delta
    g = _coupling(cavity, pump)
    m = np.array(
        [[gamma - 1j * delta, -g], [-np.conj(g), gamma - 1j * delta]],
        dtype=np.complex128,
    )
    rhs = np.array([_drive(cavity, seed), 0.0], dtype=np.complex128)
    try:
        sol = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular steady-state system: {exc}") from exc
    alpha_s = sol[0]
    alpha_i = np.conj(sol[1])
    out = math.sqrt(2.0 * cavity.gamma_out)
    return LockFieldState(a_cls=complex(out * alpha_s), a_cli=complex(out * alpha_i))


def steady_state_closed_form(
    cavity: CavityParams,
    pump: PumpParams,
    seed: SeedParams,
    variant: str = "corrected",
) -> LockFieldState:
    """Closed-form output amplitudes.

    The "corrected" variant uses (1 + dn^2) in both epsilon^2 sub-terms of
    the signal-field denominator and matches the linear solve exactly. The
    "paper-literal" variant keeps (1 + dn) in the second sub-term and
    (1 - i*dn) in the idler expression, exactly as printed; it deviates at
    nonzero detuning and is retained for documentation only.
    """
    if variant not in CLOSED_FORM_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {CLOSED_FORM_VARIANTS}")
    _require_below_threshold(pump)
    gamma = cavity.gamma_total
    dn = cavity.delta_norm
    eps = pump.epsilon
    prefactor = (
        2.0
        * math.sqrt(cavity.gamma_in * cavity.gamma_out)
        / gamma
        * seed.alpha_cl
        * cmath.exp(1j * seed.seed_phase)
    )
    first = eps**2 / (1.0 + dn**2)
    if variant == "corrected":
        second = eps**2 / (1.0 + dn**2)
        idler_denom = 1.0 + 1j * dn
    else:
        second = eps**2 / (1.0 + dn)
        idler_denom = 1.0 - 1j * dn
    denom = (1.0 - first) - 1j * dn * (1.0 + second)
    if denom == 0:
        raise NumericalError("vanishing closed-form denominator")
    a_cls = prefactor / denom
    a_cli = eps * cmath.exp(1j * pump.phi_p) / idler_denom * np.conj(a_cls)
    return LockFieldState(a_cls=complex(a_cls), a_cli=complex(a_cli))


def drift_eigenvalues(cavity: CavityParams, pump: PumpParams) -> np.ndarray:
    """Eigenvalues of the (alpha_s, alpha_i^*) drift matrix.

    A positive real part signals exponential growth (above threshold).
    """
    gamma = cavity.gamma_total
    delta = cavity.delta
    g = _coupling(cavity, pump)
    m = np.array(
        [[-(gamma - 1j * delta), g], [np.conj(g), -(gamma - 1j * delta)]],
        dtype=np.complex128,
    )
    return np.linalg.eigvals(m)


def integrate_dynamics(
    cavity: CavityParams,
    pump: PumpParams,
    seed: SeedParams,
    t_end: float,
    dt: float,
    initial: tuple[complex, complex] = (0.0 + 0j, 0.0 + 0j),
) -> Trajectory:
    """Fixed-step RK4 integration of the classical equations of motion.

    Raises AboveThresholdError if the amplitudes explode (pump at or above
    threshold); the message then reports the unstable drift eigenvalue.
    """
    gamma = cavity.gamma_total
    if dt > 0.1 / gamma:
        raise ValueError(f"dt = {dt} exceeds the stability margin 0.1/gamma = {0.1 / gamma}")
    if t_end < dt:
        raise ValueError("t_end must be at least one step")
    n_steps = int(round(t_end / dt))
    a_s0, a_i0 = complex(initial[0]), complex(initial[1])
    drive = _drive(cavity, seed)
    scale = max(1.0, abs(drive) / gamma, abs(a_s0), abs(a_i0))
    alpha_s, alpha_i, diverged = kernels.cavity_rk4(
        a_s0,
        a_i0,
        _coupling(cavity, pump),
        gamma,
        cavity.delta,
        drive,
        dt,
        n_steps,
        _EXPLOSION_FACTOR * scale,
    )
    if diverged >= 0:
        lam = drift_eigenvalues(cavity, pump)
        rate = float(np.max(lam.real))
        raise AboveThresholdError(
            f"trajectory diverged at t = {diverged * dt:.3e} s "
            f"(largest drift eigenvalue real part {rate:.3e} 1/s)"
        )
    times = np.arange(n_steps + 1) * dt
    return Trajectory(times=times, alpha_s=alpha_s, alpha_i=alpha_i)


def output_fields(cavity: CavityParams, trajectory: Trajectory) -> LockFieldState:
    """Lock-field state from the final sample of a trajectory."""
    out = math.sqrt(2.0 * cavity.gamma_out)
    return LockFieldState(
        a_cls=complex(out * trajectory.alpha_s[-1]),
        a_cli=complex(out * trajectory.alpha_i[-1]),
    )


def detuning_phase_offset(delta_norm: float) -> float:
    """Constant phase-sum offset arg(1/(1 + i*dn)) introduced by detuning.

    At nonzero detuning phi_CLs + phi_CLi - phi_p equals this constant,
    which drops out of the relative phase condition.
    """
    return cmath.phase(1.0 / (1.0 + 1j * delta_norm))
