"""Nonlinear steady state of the pumped system (probe off).

The mechanical mean fields are linear in the intracavity photon number
``n = |a_bar|**2``, so the radiation-pressure shift of the cavity resonance
is ``c * n`` with a real coefficient ``c``.  The pump balance then closes
into a real cubic in ``n``,

    n * ((delta - c*n)**2 + (kappa/2)**2) = eta * kappa * eps_l**2,

which is solved exactly (bracketed root finding on its monotone segments)
instead of iterating the coupled complex fixed point; that stays robust
arbitrarily close to bistability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import InfeasibleSteadyStateError, SingularMechanicsError
from .params import SystemParams

#: Mechanical denominators smaller than this (times omega_m**2) are treated
#: as singular rather than producing huge fields.
_SINGULARITY_FLOOR = 1e-12


@dataclass(frozen=True)
class SteadyState:
    """Mean fields of cavity and mechanical modes under the pump alone."""

    a_bar: complex
    b1_bar: complex
    b2_bar: complex

    @property
    def n_cav(self) -> float:
        """Mean intracavity photon number |a_bar|**2."""
        return abs(self.a_bar) ** 2


@dataclass(frozen=True)
class SteadyStateDiagnostics:
    """Root bookkeeping of the photon-number cubic."""

    cubic_roots: tuple
    selected_index: int
    multistable: bool


def mechanical_denominator(params: SystemParams) -> complex:
    """Coupled-pair denominator (i w_m + g1/2)(i w_m + g2/2) + |mu|^2.

    Raises
    ------
    SingularMechanicsError
        If its magnitude is below 1e-12 * omega_m**2.
    """
    wm = params.omega_m
    den = (1j * wm + params.gamma1 / 2.0) * (1j * wm + params.gamma2 / 2.0)
    den = den + params.mu_mag**2
    if abs(den) < _SINGULARITY_FLOOR * wm * wm:
        raise SingularMechanicsError(
            f"mechanical denominator magnitude {abs(den):.3e} below "
            f"{_SINGULARITY_FLOOR:.0e} * omega_m**2"
        )
    return den


def mech_fields_per_photon(params: SystemParams) -> tuple[complex, complex]:
    """Mechanical mean fields per intracavity photon, (b1/n, b2/n)."""
    den = mechanical_denominator(params)
    g1, g2, mu = params.g1, params.g2, params.mu
    beta2 = 1j * params.omega_m + params.gamma2 / 2.0
    b1_per_n = (1j * g1 * beta2 - mu * g2) / den
    b2_per_n = (1j * g2 + 1j * mu.conjugate() * b1_per_n) / beta2
    return b1_per_n, b2_per_n


def effective_shift_coefficient(params: SystemParams) -> float:
    """Radiation-pressure shift per photon: the real number ``c`` with
    2*Re(g1* b1) + 2*Re(g2* b2) = c * n for every photon number n."""
    b1_per_n, b2_per_n = mech_fields_per_photon(params)
    c = 2.0 * (params.g1.conjugate() * b1_per_n).real
    c += 2.0 * (params.g2.conjugate() * b2_per_n).real
    return c


def _cubic_real_roots(c: float, delta: float, kappa: float, rhs: float,
                      n_upper: float) -> list[float]:
    """Real roots of n*((delta - c*n)^2 + (kappa/2)^2) - rhs on [0, n_upper].

    The polynomial p(n) = c^2 n^3 - 2 c delta n^2 + (delta^2 + kappa^2/4) n
    - rhs is split at its critical points into monotone segments; each
    segment with a sign change is bisected with Brent's method.
    """
    k2 = delta * delta + 0.25 * kappa * kappa

    def p(n):
        lorentz = (delta - c * n) ** 2 + 0.25 * kappa * kappa
        return n * lorentz - rhs

    if c == 0.0:
        return [rhs / k2] if k2 > 0.0 else []

    # critical points of the cubic: 3 c^2 n^2 - 4 c delta n + k2 = 0
    edges = [0.0]
    disc = 4.0 * delta * delta - 3.0 * k2  # (4 c delta)^2 - 4*3c^2*k2, / (2c)^2
    if disc > 0.0:
        root_d = math.sqrt(disc)
        for s in (-1.0, 1.0):
            n_crit = (2.0 * delta + s * root_d) / (3.0 * c)
            if 0.0 < n_crit < n_upper:
                edges.append(n_crit)
    edges.append(n_upper)
    edges = sorted(set(edges))

    roots = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        plo, phi_ = p(lo), p(hi)
        if plo == 0.0:
            roots.append(lo)
            continue
        if plo * phi_ < 0.0:
            roots.append(brentq(p, lo, hi, xtol=1e-300, rtol=8.9e-16))
    if p(n_upper) == 0.0:
        roots.append(n_upper)
    # deduplicate (a root exactly at a segment edge appears twice)
    uniq: list[float] = []
    for r in sorted(roots):
        if not uniq or abs(r - uniq[-1]) > 1e-12 * max(1.0, abs(r)):
            uniq.append(r)
    return uniq


def solve_steady_state(
    params: SystemParams,
) -> tuple[SteadyState, SteadyStateDiagnostics]:
    """Solve the pump-only steady state exactly.

    Returns the mean fields reconstructed from the smallest positive photon
    number root (continuation from the low-power branch) plus diagnostics
    listing every real candidate root.  Three positive roots set the
    ``multistable`` flag.

    Raises
    ------
    InfeasibleSteadyStateError
        If no nonnegative real root exists.
    SingularMechanicsError
        If the mechanical denominator vanishes.
    """
    eps_l = params.drives().eps_l
    b1_per_n, b2_per_n = mech_fields_per_photon(params)

    if eps_l == 0.0:
        state = SteadyState(a_bar=0j, b1_bar=0j, b2_bar=0j)
        return state, SteadyStateDiagnostics((0.0,), 0, False)

    c = effective_shift_coefficient(params)
    rhs = params.eta * params.kappa * eps_l**2
    n_upper = (
        4.0 * params.eta * eps_l**2 / params.kappa
        * (1.0 + 4.0 * params.delta**2 / params.kappa**2)
    )
    roots = _cubic_real_roots(c, params.delta, params.kappa, rhs, n_upper)
    positive = [r for r in roots if r > 0.0]
    if not positive:
        raise InfeasibleSteadyStateError(
            f"photon-number cubic has no positive real root in [0, {n_upper:.3e}]"
        )

    n = min(positive)
    selected = roots.index(n)
    a_bar = (
        math.sqrt(params.eta * params.kappa)
        * eps_l
        / (1j * (params.delta - c * n) + params.kappa / 2.0)
    )
    state = SteadyState(
        a_bar=a_bar, b1_bar=b1_per_n * n, b2_bar=b2_per_n * n
    )
    diag = SteadyStateDiagnostics(
        cubic_roots=tuple(roots),
        selected_index=selected,
        multistable=len(positive) >= 3,
    )
    return state, diag


def steady_residual(params: SystemParams, state: SteadyState) -> float:
    """Max modulus of the three pump-only time derivatives at ``state``.

    Zero (to rounding) exactly at a steady state; equals
    sqrt(eta*kappa)*eps_l for the zero state under drive.
    """
    eps_l = params.drives().eps_l
    g1, g2, mu = params.g1, params.g2, params.mu
    a, b1, b2 = state.a_bar, state.b1_bar, state.b2_bar
    shift = (g1 * b1.conjugate() + g1.conjugate() * b1).real
    shift += (g2 * b2.conjugate() + g2.conjugate() * b2).real
    da = (
        (-1j * params.delta - params.kappa / 2.0 + 1j * shift) * a
        + math.sqrt(params.eta * params.kappa) * eps_l
    )
    n = abs(a) ** 2
    db1 = (
        (-1j * params.omega_m - params.gamma1 / 2.0) * b1
        + 1j * mu * b2
        + 1j * g1 * n
    )
    db2 = (
        (-1j * params.omega_m - params.gamma2 / 2.0) * b2
        + 1j * mu.conjugate() * b1
        + 1j * g2 * n
    )
    return max(abs(da), abs(db1), abs(db2))
