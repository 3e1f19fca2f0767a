"""Closed-form linear probe response of the loop-coupled system.

With the pump steady state as the working point, a weak probe at offset
``omega`` (probe minus pump frequency) drives first-order sidebands.  The
upconverted sideband amplitude follows in closed form from three kernels:

* ``xi``  - inverse cavity susceptibility at the probe offset, including
  the static radiation-pressure shift of the resonance;
* ``lam`` - back-action kernel of the hybridized mechanical pair, i.e. the
  force response the two coupled resonators feed back onto the cavity
  (four terms: each coupling route at each of the two sideband poles);
* ``gam`` - feedback correction from the counter-rotating sideband,
  built from the mirrored kernel ``conj(xi(-omega))``.

The probe transmission is ``t_p = 1 - eta*kappa / (xi - n*lam*(1-gam))``
with ``n`` the intracavity photon number, and the group delay is the
derivative of its unwrapped phase with respect to probe frequency.

All kernel functions accept a scalar or ndarray ``omega`` and evaluate
elementwise; ``lam`` and ``gam`` are genuine functions of ``omega`` and are
recomputed per grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PoleError, StencilError
from .params import SystemParams, fingerprint
from .steady_state import SteadyState, solve_steady_state

#: Default group-delay stencil half-step, as a fraction of omega_m.
GROUP_DELAY_STEP_FRACTION = 1e-6

#: Denominators at or below this magnitude raise PoleError.
_POLE_FLOOR = 1e-300


@dataclass(frozen=True)
class SidebandFactors:
    """Single-resonator sideband denominators and their pair products.

    ``alpha1_minus`` etc. are evaluated at the mirrored mechanical pole
    (omega_m -> -omega_m); ``f1``/``f2`` are the coupled-pair determinants
    at the lower/upper sideband.
    """

    alpha1_plus: complex
    alpha1_minus: complex
    alpha2_plus: complex
    alpha2_minus: complex
    f1: complex
    f2: complex


@dataclass(frozen=True)
class ProbeResponse:
    """Full probe response at one offset ``omega``.

    ``psi`` is the transmission phase (unwrapped along the grid when the
    response was produced by :func:`spectrum`); ``tau_g`` is None until a
    delay evaluation fills it.
    """

    omega: float
    xi: complex
    lam: complex
    gam: complex
    a1_minus: complex
    t_p: complex
    psi: float
    tau_g: Optional[float] = None

    @property
    def abs_t(self) -> float:
        return abs(self.t_p)


def coupling_shift(params: SystemParams, state: SteadyState) -> float:
    """Static radiation-pressure shift 2Re(g1* b1) + 2Re(g2* b2) [rad/s]."""
    s = (params.g1.conjugate() * state.b1_bar).real
    s += (params.g2.conjugate() * state.b2_bar).real
    return 2.0 * s


def alpha_f_terms(params: SystemParams, omega) -> SidebandFactors:
    """Sideband denominators at probe offset ``omega`` (scalar or array)."""
    iw = 1j * np.asarray(omega, dtype=float)
    iwm = 1j * params.omega_m
    h1, h2 = params.gamma1 / 2.0, params.gamma2 / 2.0
    a1p = -iw - iwm + h1
    a1m = -iw + iwm + h1
    a2p = -iw - iwm + h2
    a2m = -iw + iwm + h2
    mu2 = params.mu_mag**2
    return SidebandFactors(
        alpha1_plus=_maybe_scalar(a1p),
        alpha1_minus=_maybe_scalar(a1m),
        alpha2_plus=_maybe_scalar(a2p),
        alpha2_minus=_maybe_scalar(a2m),
        f1=_maybe_scalar(a1m * a2m + mu2),
        f2=_maybe_scalar(a1p * a2p + mu2),
    )


def _maybe_scalar(x):
    return complex(x) if np.ndim(x) == 0 else x


def _check_pole(values, omega, which):
    mags = np.abs(np.asarray(values))
    if not np.any(mags <= _POLE_FLOOR):
        return
    w = np.asarray(omega, dtype=float)
    if w.ndim == 0:
        bad = float(w)
    else:
        bad = float(w.reshape(-1)[int(np.argmin(mags.reshape(-1)))])
    raise PoleError(
        f"{which} vanishes at probe offset omega = {bad:.9e} rad/s",
        omega=bad,
        which=which,
    )


def lambda_of(params: SystemParams, omega):
    """Mechanical back-action kernel (four coupling routes, two poles)."""
    af = alpha_f_terms(params, omega)
    _check_pole(af.f1, omega, "f1")
    _check_pole(af.f2, omega, "f2")
    g1, g2, mu = params.g1, params.g2, params.mu
    g1c, g2c, muc = g1.conjugate(), g2.conjugate(), mu.conjugate()
    lam = 1j * g1 * (-1j * g1c * af.alpha2_plus - muc * g2c) / af.f2
    lam += 1j * g1c * (1j * g1 * af.alpha2_minus - mu * g2) / af.f1
    lam += 1j * g2 * (-1j * g2c * af.alpha1_plus - mu * g1c) / af.f2
    lam += 1j * g2c * (1j * g2 * af.alpha1_minus - muc * g1) / af.f1
    return _maybe_scalar(lam)


def xi_of(params: SystemParams, state: SteadyState, omega):
    """Inverse cavity susceptibility at ``omega``, shift included."""
    w = np.asarray(omega, dtype=float)
    val = (
        1j * params.delta
        + params.kappa / 2.0
        - 1j * w
        - 1j * coupling_shift(params, state)
    )
    return _maybe_scalar(val)


def xi_mirror_of(params: SystemParams, state: SteadyState, omega):
    """Mirrored kernel conj(xi(-omega)) entering the feedback factor."""
    w = np.asarray(omega, dtype=float)
    return _maybe_scalar(np.conj(xi_of(params, state, -w)))


def gamma_of(params: SystemParams, state: SteadyState, omega):
    """Counter-rotating feedback factor gam = n*lam / (conj(xi(-w)) + lam*n)."""
    lam = lambda_of(params, omega)
    n = state.n_cav
    den = xi_mirror_of(params, state, omega) + lam * n
    _check_pole(den, omega, "feedback denominator")
    return _maybe_scalar(n * lam / den)


def _response_arrays(params: SystemParams, state: SteadyState, omegas):
    """Vectorized kernels and transmission over ``omegas`` (1-D array)."""
    w = np.asarray(omegas, dtype=float)
    lam = np.asarray(lambda_of(params, w))
    xi = np.asarray(xi_of(params, state, w))
    n = state.n_cav
    gden = np.asarray(xi_mirror_of(params, state, w)) + lam * n
    _check_pole(gden, w, "feedback denominator")
    gam = n * lam / gden
    den = xi - n * lam * (1.0 - gam)
    _check_pole(den, w, "response denominator")
    ek = params.eta * params.kappa
    eps_p = params.drives().eps_p
    a1_minus = math.sqrt(ek) * eps_p / den
    t_p = 1.0 - ek / den
    return {"xi": xi, "lam": lam, "gam": gam, "a1_minus": a1_minus, "t_p": t_p}


def transmission(
    params: SystemParams, state: SteadyState, omega: float
) -> ProbeResponse:
    """Probe response at one offset (no group delay).

    ``state`` must solve the pump steady state for ``params``; the
    denominator identity a1_minus * (xi - n*lam*(1-gam)) = sqrt(eta*kappa)
    * eps_p then holds to rounding.
    """
    arr = _response_arrays(params, state, np.asarray([float(omega)]))
    t_p = complex(arr["t_p"][0])
    return ProbeResponse(
        omega=float(omega),
        xi=complex(arr["xi"][0]),
        lam=complex(arr["lam"][0]),
        gam=complex(arr["gam"][0]),
        a1_minus=complex(arr["a1_minus"][0]),
        t_p=t_p,
        psi=math.atan2(t_p.imag, t_p.real),
    )


def group_delay(
    params: SystemParams,
    state: SteadyState,
    omega: float,
    step: Optional[float] = None,
) -> float:
    """Group delay tau_g = d(arg t_p)/d(omega_p) by central difference [s].

    The probe offset and the probe frequency differ by the fixed pump
    frequency, so the derivative is taken directly in ``omega``.  The
    three-point phase is unwrapped before differencing; a residual jump
    larger than pi across the stencil raises :class:`StencilError`.
    """
    if step is None:
        step = GROUP_DELAY_STEP_FRACTION * params.omega_m
    if step <= 0.0:
        raise ValueError(f"step must be > 0, got {step}")
    w = np.asarray([omega - step, omega, omega + step], dtype=float)
    t_p = _response_arrays(params, state, w)["t_p"]
    psi = np.unwrap(np.angle(t_p))
    if abs(psi[2] - psi[0]) > math.pi:
        raise StencilError(
            f"phase changes by {psi[2] - psi[0]:+.3f} rad across the stencil "
            f"at omega = {omega:.6e}; reduce step (= {step:.3e})"
        )
    return float((psi[2] - psi[0]) / (2.0 * step))


class Spectrum:
    """Probe response sampled on a strictly increasing offset grid.

    The grid is canonicalized to ascending order on construction, the
    transmission phase is unwrapped once along the full grid, and the group
    delay is the central-difference derivative of that unwrapped phase
    (None for singleton grids).
    """

    def __init__(self, params: SystemParams, omegas, arrays):
        self.params = params
        self.params_fingerprint = fingerprint(params)
        self.omegas = omegas
        self.t_p = arrays["t_p"]
        self.a1_minus = arrays["a1_minus"]
        self.xi = arrays["xi"]
        self.lam = arrays["lam"]
        self.gam = arrays["gam"]
        self.psi = np.unwrap(np.angle(self.t_p))
        if self.omegas.size >= 2:
            self.tau_g = np.gradient(self.psi, self.omegas)
        else:
            self.tau_g = None
        self._responses = None

    @property
    def abs_t(self):
        return np.abs(self.t_p)

    @property
    def abs_t_sq(self):
        return np.abs(self.t_p) ** 2

    @property
    def responses(self):
        """One :class:`ProbeResponse` per grid point (built on demand)."""
        if self._responses is None:
            tau = self.tau_g if self.tau_g is not None else [None] * self.omegas.size
            self._responses = [
                ProbeResponse(
                    omega=float(self.omegas[i]),
                    xi=complex(self.xi[i]),
                    lam=complex(self.lam[i]),
                    gam=complex(self.gam[i]),
                    a1_minus=complex(self.a1_minus[i]),
                    t_p=complex(self.t_p[i]),
                    psi=float(self.psi[i]),
                    tau_g=None if tau[i] is None else float(tau[i]),
                )
                for i in range(self.omegas.size)
            ]
        return self._responses

    def __len__(self):
        return int(self.omegas.size)


def spectrum(params: SystemParams, grid) -> Spectrum:
    """Evaluate the probe response over a monotone offset grid.

    The pump steady state is solved once and shared by every grid point.
    A descending grid is accepted and canonicalized to ascending order, so
    a grid and its reverse produce identical spectra.
    """
    w = np.asarray(grid, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("grid must be a non-empty 1-D array")
    if w.size >= 2:
        steps = np.diff(w)
        if np.all(steps < 0.0):
            w = w[::-1].copy()
        elif not np.all(steps > 0.0):
            raise ValueError("grid must be strictly monotone")
    state, _ = solve_steady_state(params)
    return spectrum_with_state(params, state, w)


def spectrum_with_state(
    params: SystemParams, state: SteadyState, omegas
) -> Spectrum:
    """Like :func:`spectrum` but reusing an already-solved steady state."""
    w = np.ascontiguousarray(np.asarray(omegas, dtype=float))
    return Spectrum(params, w, _response_arrays(params, state, w))
