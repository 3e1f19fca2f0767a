"""Independent time-domain check of the closed-form probe response.

The fluctuation equations are driven explicitly in the time domain,

    dx/dt = M x + (A e^{-i w t}, A e^{+i w t}, 0, 0, 0, 0),

with x = (da, da*, db1, db1*, db2, db2*) started from zero, integrated
through the transient with an adaptive embedded Runge-Kutta scheme, and
demodulated over the final drive periods to pull out the sideband
amplitudes.  Nothing here reuses the frequency-domain algebra: agreement
with the closed-form result validates both routes.

The conjugate variables are integrated as independent unknowns rather than
derived from their partners, so the conjugate-pair symmetry of the
trajectories doubles as a transcription check of the coupled equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InstabilityError, TransientError
from .linear_response import transmission
from .params import SystemParams
from .stability import build_stability_matrix, classify
from .steady_state import SteadyState, solve_steady_state

#: Demodulation window length, in drive periods.
DEMOD_PERIODS = 20

#: Samples per drive period inside the demodulation window.
SAMPLES_PER_PERIOD = 64

#: Demodulated amplitudes must agree between window halves to this
#: relative level, else the transient is declared undecayed.
TRANSIENT_TOL = 1e-6

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168,
    -355 / 33,
    46732 / 5247,
    49 / 176,
    -5103 / 18656,
)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# b - b_hat (5th minus embedded 4th order weights, k7 = FSAL stage)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


@njit(cache=True)
def _rhs(t, y, m, amp, omega, out):
    for i in range(6):
        acc = 0.0 + 0.0j
        for j in range(6):
            acc += m[i, j] * y[j]
        out[i] = acc
    out[0] += amp * (math.cos(omega * t) - 1j * math.sin(omega * t))
    out[1] += amp * (math.cos(omega * t) + 1j * math.sin(omega * t))


@njit(cache=True)
def _integrate_sampled(m, amp, omega, t_samples, rtol, atol, max_step):
    """Adaptive Dormand-Prince 5(4) from t=0, recording y at t_samples.

    Returns (samples, accepted steps, rejected steps); a negative step
    count signals failure (step size underflow).
    """
    n_samp = t_samples.shape[0]
    samples = np.zeros((n_samp, 6), dtype=np.complex128)
    y = np.zeros(6, dtype=np.complex128)
    k1 = np.zeros(6, dtype=np.complex128)
    k2 = np.zeros(6, dtype=np.complex128)
    k3 = np.zeros(6, dtype=np.complex128)
    k4 = np.zeros(6, dtype=np.complex128)
    k5 = np.zeros(6, dtype=np.complex128)
    k6 = np.zeros(6, dtype=np.complex128)
    k7 = np.zeros(6, dtype=np.complex128)
    y_stage = np.zeros(6, dtype=np.complex128)
    y_new = np.zeros(6, dtype=np.complex128)

    t = 0.0
    t_end = t_samples[n_samp - 1]
    h = min(max_step, 1e-3 * (2.0 * math.pi / omega))
    h_min = 1e-18 * t_end
    _rhs(t, y, m, amp, omega, k1)
    accepted = 0
    rejected = 0
    next_sample = 0

    while next_sample < n_samp:
        # land exactly on the next sample time
        target = t_samples[next_sample]
        if t >= target:
            samples[next_sample] = y
            next_sample += 1
            continue
        if t + h > target:
            h_try = target - t
        else:
            h_try = h
        if h_try < h_min:
            return samples, -accepted, rejected

        for i in range(6):
            y_stage[i] = y[i] + h_try * _A21 * k1[i]
        _rhs(t + _C2 * h_try, y_stage, m, amp, omega, k2)
        for i in range(6):
            y_stage[i] = y[i] + h_try * (_A31 * k1[i] + _A32 * k2[i])
        _rhs(t + _C3 * h_try, y_stage, m, amp, omega, k3)
        for i in range(6):
            y_stage[i] = y[i] + h_try * (
                _A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]
            )
        _rhs(t + _C4 * h_try, y_stage, m, amp, omega, k4)
        for i in range(6):
            y_stage[i] = y[i] + h_try * (
                _A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i]
            )
        _rhs(t + _C5 * h_try, y_stage, m, amp, omega, k5)
        for i in range(6):
            y_stage[i] = y[i] + h_try * (
                _A61 * k1[i]
                + _A62 * k2[i]
                + _A63 * k3[i]
                + _A64 * k4[i]
                + _A65 * k5[i]
            )
        _rhs(t + h_try, y_stage, m, amp, omega, k6)
        for i in range(6):
            y_new[i] = y[i] + h_try * (
                _B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i]
                + _B6 * k6[i]
            )
        _rhs(t + h_try, y_new, m, amp, omega, k7)

        err_norm = 0.0
        for i in range(6):
            err_i = h_try * (
                _E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                + _E6 * k6[i] + _E7 * k7[i]
            )
            scale = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            ratio = abs(err_i) / scale
            err_norm += ratio * ratio
        err_norm = math.sqrt(err_norm / 6.0)

        if err_norm <= 1.0:
            t += h_try
            for i in range(6):
                y[i] = y_new[i]
                k1[i] = k7[i]
            accepted += 1
            if t >= target:
                samples[next_sample] = y
                next_sample += 1
        else:
            rejected += 1

        if err_norm == 0.0:
            factor = 5.0
        else:
            factor = 0.9 * err_norm ** (-0.2)
            if factor > 5.0:
                factor = 5.0
            elif factor < 0.2:
                factor = 0.2
        h = min(h_try * factor, max_step)

    return samples, accepted, rejected


@dataclass(frozen=True)
class DemodResult:
    """Sideband amplitudes demodulated from the driven trajectory."""

    a1_minus: complex
    a1_plus: complex
    b1_minus: complex
    c1_minus: complex
    transient_decay: float
    harmonic_ratio: float
    horizon: float
    steps: int


def sampled_trajectory(
    params: SystemParams,
    state: SteadyState,
    omega: float,
    horizon: float = None,
    dt: float = None,
    rtol: float = 1e-10,
    demod_periods: int = DEMOD_PERIODS,
):
    """Integrate the driven fluctuations and sample the demodulation window.

    Returns ``(t_samples, samples, steps)`` where ``samples[k]`` is the
    six-component state at ``t_samples[k]``, covering the final
    ``demod_periods`` drive periods of the horizon.

    Raises
    ------
    InstabilityError
        If the operating point is unstable (the trajectory would grow).
    """
    if omega <= 0.0:
        raise ValueError(f"probe offset omega must be > 0, got {omega}")
    m = build_stability_matrix(params, state)
    report = classify(m)
    if not report.stable:
        raise InstabilityError(
            "refusing time integration at an unstable operating point "
            f"(max Re(eigenvalue) = {report.margin:.6e} rad/s)",
            margin=report.margin,
        )
    min_horizon = 20.0 / abs(report.margin)
    if horizon is None:
        horizon = min_horizon
    elif horizon < min_horizon:
        raise ValueError(
            f"horizon {horizon:.3e} s below the transient floor "
            f"20/|margin| = {min_horizon:.3e} s"
        )
    period = 2.0 * math.pi / omega
    if dt is None:
        dt = period / 16.0

    eps_p = params.drives().eps_p
    amp = math.sqrt(params.eta * params.kappa) * eps_p

    n_samp = demod_periods * SAMPLES_PER_PERIOD
    t_start = max(horizon - demod_periods * period, 0.0)
    t_samples = t_start + np.arange(1, n_samp + 1) * (
        period / SAMPLES_PER_PERIOD
    )

    # scale for absolute tolerance: the driven cavity response amplitude
    y_scale = max(amp / (params.kappa / 2.0), 1e-30)
    samples, accepted, rejected = _integrate_sampled(
        m, amp, omega, t_samples, rtol, 1e-2 * rtol * y_scale, dt
    )
    if accepted < 0:
        raise TransientError(
            "adaptive integrator step size underflowed", decay=math.inf
        )
    return t_samples, samples, accepted + rejected, horizon


def integrate_linearized(
    params: SystemParams,
    state: SteadyState,
    omega: float,
    horizon: float = None,
    dt: float = None,
    rtol: float = 1e-10,
    transient_tol: float = TRANSIENT_TOL,
    demod_periods: int = DEMOD_PERIODS,
) -> DemodResult:
    """Drive the fluctuation system at offset ``omega`` and demodulate.

    ``horizon`` defaults to 20 / |stability margin| and may only be raised
    above that floor; the final ``demod_periods`` drive periods of the run
    are sampled uniformly (SAMPLES_PER_PERIOD per period) and projected on
    e^{+-i w t}.  ``dt`` caps the adaptive step (default: period / 16).

    Raises
    ------
    InstabilityError
        If the operating point is unstable (the trajectory would grow).
    TransientError
        If the two halves of the demodulation window disagree beyond
        ``transient_tol``, i.e. the transient had not died out.
    """
    t_samples, samples, steps, horizon = sampled_trajectory(
        params, state, omega, horizon=horizon, dt=dt, rtol=rtol,
        demod_periods=demod_periods,
    )
    n_samp = t_samples.size
    phase = np.exp(1j * omega * t_samples)

    def demod(series, against):
        return complex(np.mean(series * against))

    da = samples[:, 0]
    a1_minus = demod(da, phase)
    a1_plus = demod(da, np.conj(phase))
    b1_minus = demod(samples[:, 2], phase)
    c1_minus = demod(samples[:, 4], phase)

    half = n_samp // 2
    first = complex(np.mean(da[:half] * phase[:half]))
    second = complex(np.mean(da[half:] * phase[half:]))
    denom = max(abs(a1_minus), 1e-300)
    transient_decay = abs(second - first) / denom
    harmonic_ratio = abs(demod(da, phase * phase)) / denom

    if transient_decay > transient_tol:
        raise TransientError(
            f"demodulation halves differ by {transient_decay:.3e} relative "
            f"(> {transient_tol:.1e}); transient not decayed at horizon "
            f"{horizon:.3e} s",
            decay=transient_decay,
        )
    return DemodResult(
        a1_minus=a1_minus,
        a1_plus=a1_plus,
        b1_minus=b1_minus,
        c1_minus=c1_minus,
        transient_decay=transient_decay,
        harmonic_ratio=harmonic_ratio,
        horizon=horizon,
        steps=steps,
    )


def oracle_compare(params: SystemParams, omega_grid, **kwargs) -> float:
    """Max relative deviation of the upconverted amplitude, formula versus
    time domain, over the given probe offsets."""
    state, _ = solve_steady_state(params)
    worst = 0.0
    for omega in np.asarray(omega_grid, dtype=float):
        closed = transmission(params, state, omega).a1_minus
        measured = integrate_linearized(params, state, omega, **kwargs).a1_minus
        worst = max(worst, abs(closed - measured) / abs(closed))
    return worst
