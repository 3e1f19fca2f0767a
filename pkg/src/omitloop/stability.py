"""Dynamical stability, mechanical root loci and the exceptional point.

The fluctuations around the pump steady state obey a linear system
``d x/dt = M x + drive`` in the basis (da, da*, db1, db1*, db2, db2*).  The
operating point is stable when every eigenvalue of the 6x6 matrix ``M``
has a negative real part.

Because the gain resonator (gamma2 < 0) feeds energy into the loop, large
regions of the coupling space are unstable; :func:`stability_map` charts
them.  The two eigenvalues that descend from the mechanical pair near
+omega_m hybridize into supermodes whose loci over the coupling phase
reveal the broken/unbroken symmetry phases, and whose coalescence on the
resonator-coupling axis marks the exceptional point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, InstabilityError, TrackSelectionError
from .params import SystemParams
from .steady_state import SteadyState, solve_steady_state
from .errors import PhysicsError

#: Imaginary-part window (in units of omega_m) that isolates the upper
#: mechanical sector; configurable on the relevant operations.
MECH_WINDOW = (0.9, 1.1)

# Cell status codes used by stability maps.
CELL_STABLE = 1
CELL_UNSTABLE = 0
CELL_FAILED = -1


@dataclass(frozen=True)
class StabilityReport:
    """Eigenvalues of the fluctuation matrix and the verdict."""

    eigenvalues: np.ndarray
    stable: bool
    margin: float


@dataclass(frozen=True)
class RootLocus:
    """Two continuity-linked eigenvalue tracks over a phase sweep."""

    phi2_grid: np.ndarray
    tracks: np.ndarray  # shape (2, len(phi2_grid)), complex
    labels: tuple


@dataclass(frozen=True)
class EPResult:
    """Minimum-gap point of the tracked eigenvalue pair on the |mu| axis."""

    mu_ep: float
    gap_at_ep: float
    bracket: tuple


def build_stability_matrix(params: SystemParams, state: SteadyState) -> np.ndarray:
    """6x6 fluctuation matrix at the given steady state.

    Basis order (da, da*, db1, db1*, db2, db2*).  Rows for the conjugate
    variables are the complex conjugates of their partners, which makes the
    eigenvalue multiset closed under conjugation and the trace equal to
    -kappa - gamma1 - gamma2.
    """
    g1, g2, mu = params.g1, params.g2, params.mu
    a = state.a_bar
    ac = a.conjugate()
    shift = 2.0 * (
        (g1.conjugate() * state.b1_bar).real + (g2.conjugate() * state.b2_bar).real
    )
    m11 = -1j * params.delta - params.kappa / 2.0 + 1j * shift
    iwm = 1j * params.omega_m
    h1, h2 = params.gamma1 / 2.0, params.gamma2 / 2.0

    m = np.array(
        [
            [m11, 0.0, 1j * a * g1.conjugate(), 1j * a * g1,
             1j * a * g2.conjugate(), 1j * a * g2],
            [0.0, m11.conjugate(), -1j * ac * g1.conjugate(), -1j * ac * g1,
             -1j * ac * g2.conjugate(), -1j * ac * g2],
            [1j * ac * g1, 1j * a * g1, -iwm - h1, 0.0, 1j * mu, 0.0],
            [-1j * ac * g1.conjugate(), -1j * a * g1.conjugate(), 0.0,
             iwm - h1, 0.0, -1j * mu.conjugate()],
            [1j * ac * g2, 1j * a * g2, 1j * mu.conjugate(), 0.0, -iwm - h2, 0.0],
            [-1j * ac * g2.conjugate(), -1j * a * g2.conjugate(), 0.0,
             -1j * mu, 0.0, iwm - h2],
        ],
        dtype=complex,
    )
    return m


def classify(matrix: np.ndarray) -> StabilityReport:
    """Eigensolve the fluctuation matrix and report the stability margin."""
    eigenvalues = np.linalg.eigvals(np.asarray(matrix, dtype=complex))
    margin = float(np.max(eigenvalues.real))
    return StabilityReport(
        eigenvalues=eigenvalues, stable=bool(margin < 0.0), margin=margin
    )


def classify_params(params: SystemParams) -> StabilityReport:
    """Steady state + matrix + classification in one call."""
    state, _ = solve_steady_state(params)
    return classify(build_stability_matrix(params, state))


def assert_stable(params: SystemParams, where: str = "") -> StabilityReport:
    """Raise :class:`InstabilityError` unless the operating point is stable."""
    report = classify_params(params)
    if not report.stable:
        suffix = f" at {where}" if where else ""
        raise InstabilityError(
            f"operating point unstable{suffix}: max Re(eigenvalue) = "
            f"{report.margin:.6e} rad/s",
            margin=report.margin,
            where=where or None,
        )
    return report


def stability_map(params: SystemParams, g2_mag_grid, phi2_grid, mu,
                  threads: int = 1):
    """Chart stability over the |g2| x phi2 plane at fixed |mu|.

    Returns an integer status matrix of shape (len(g2_mag_grid),
    len(phi2_grid)) with entries CELL_STABLE / CELL_UNSTABLE / CELL_FAILED;
    failed cells (no steady state, singular mechanics) are marked
    distinctly rather than reported unstable.  A list of (i, j, message)
    triples describes the failures.

    Cells are independent; ``threads`` > 1 evaluates rows concurrently
    with results assembled in grid order regardless of scheduling.
    """
    g2_grid = np.asarray(g2_mag_grid, dtype=float)
    p2_grid = np.asarray(phi2_grid, dtype=float)
    _require_monotone(g2_grid, "g2_mag_grid")
    _require_monotone(p2_grid, "phi2_grid")

    def cell(g2_mag, phi2):
        p = params.replace(g2_mag=g2_mag, g2_phase=phi2, mu_mag=mu)
        try:
            report = classify_params(p)
        except PhysicsError as exc:
            return CELL_FAILED, math.nan, str(exc)
        return (
            CELL_STABLE if report.stable else CELL_UNSTABLE,
            report.margin,
            None,
        )

    def row(g2_mag):
        return [cell(g2_mag, phi2) for phi2 in p2_grid]

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, g2_grid))
    else:
        rows = [row(g) for g in g2_grid]

    status = np.empty((g2_grid.size, p2_grid.size), dtype=np.int8)
    margins = np.full((g2_grid.size, p2_grid.size), np.nan)
    failures = []
    for i, row_cells in enumerate(rows):
        for j, (st, margin, err) in enumerate(row_cells):
            status[i, j] = st
            margins[i, j] = margin
            if err is not None:
                failures.append((i, j, err))
    return status, margins, failures


def _require_monotone(grid, name):
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    if grid.size >= 2 and not (
        np.all(np.diff(grid) > 0.0) or np.all(np.diff(grid) < 0.0)
    ):
        raise ValueError(f"{name} must be strictly monotone")


def upper_mechanical_pair(
    params: SystemParams,
    state: SteadyState = None,
    window: tuple = MECH_WINDOW,
) -> np.ndarray:
    """The two upper-sector mechanical eigenvalues, as a length-2 array.

    Candidates are the eigenvalues with imaginary part inside ``window``
    (in units of omega_m).  At the default red detuning the upper cavity
    root also falls in this frequency window, but it is far more damped
    (Re ~ -kappa/2 versus the mechanical scale ~ gamma), so when more than
    two candidates appear the most damped ones are discarded.
    """
    if state is None:
        state, _ = solve_steady_state(params)
    eigenvalues = np.linalg.eigvals(build_stability_matrix(params, state))
    lo, hi = window[0] * params.omega_m, window[1] * params.omega_m
    candidates = eigenvalues[(eigenvalues.imag > lo) & (eigenvalues.imag < hi)]
    if candidates.size < 2:
        raise TrackSelectionError(
            f"found {candidates.size} eigenvalue(s) with Im in "
            f"({window[0]}, {window[1]}) * omega_m, need 2",
            eigenvalues=eigenvalues,
        )
    order = np.argsort(candidates.real)[::-1]
    return candidates[order[:2]]


def _pair_step(prev: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Order ``new`` to continue ``prev`` (exhaustive 2-track assignment)."""
    direct = abs(new[0] - prev[0]) + abs(new[1] - prev[1])
    swapped = abs(new[1] - prev[0]) + abs(new[0] - prev[1])
    return new if direct <= swapped else new[::-1]


def mechanical_root_loci(
    params: SystemParams, phi2_grid, window: tuple = MECH_WINDOW
) -> RootLocus:
    """Track the two upper mechanical eigenvalues over a phi2 sweep.

    The steady state is re-solved at every phase.  Tracks are linked step
    to step by the distance-minimizing assignment; at the first point they
    are ordered by descending imaginary part.
    """
    p2_grid = np.asarray(phi2_grid, dtype=float)
    _require_monotone(p2_grid, "phi2_grid")
    tracks = np.empty((2, p2_grid.size), dtype=complex)
    for k, phi2 in enumerate(p2_grid):
        pair = upper_mechanical_pair(params.replace(g2_phase=phi2), window=window)
        if k == 0:
            pair = pair[np.argsort(pair.imag)[::-1]]
        else:
            pair = _pair_step(tracks[:, k - 1], pair)
        tracks[:, k] = pair
    return RootLocus(
        phi2_grid=p2_grid, tracks=tracks, labels=("track_high", "track_low")
    )


def eigenvalue_gap(params: SystemParams, mu_mag: float,
                   window: tuple = MECH_WINDOW) -> float:
    """Separation of the tracked pair at the given coupling magnitude."""
    pair = upper_mechanical_pair(params.replace(mu_mag=mu_mag), window=window)
    return abs(pair[0] - pair[1])


def locate_ep(
    params: SystemParams,
    mu_bracket: tuple,
    window: tuple = MECH_WINDOW,
    tol_scale: float = 1e-8,
) -> EPResult:
    """Find the coupling magnitude that minimizes the eigenvalue gap.

    Golden-section minimization of the tracked-pair separation over |mu| in
    ``mu_bracket`` (absolute rad/s), with absolute tolerance ``tol_scale *
    (gamma1 - gamma2)``.  The gap has a square-root cusp at the coalescence
    point, which golden section handles without derivatives.

    Raises
    ------
    BracketError
        If the minimum sits at a bracket endpoint (no interior minimum).
    """
    lo, hi = float(mu_bracket[0]), float(mu_bracket[1])
    if not 0.0 <= lo < hi:
        raise ValueError(f"need 0 <= lo < hi, got bracket ({lo}, {hi})")
    span = params.gamma_span
    xatol = tol_scale * abs(span) if span != 0.0 else tol_scale * (hi - lo)

    def gap(mu_mag):
        return eigenvalue_gap(params, mu_mag, window=window)

    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = gap(x1), gap(x2)
    while (b - a) > xatol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = gap(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = gap(x2)
    mu_ep = 0.5 * (a + b)
    gap_ep = gap(mu_ep)
    edge = max(xatol, 1e-12 * (hi - lo))
    if min(mu_ep - lo, hi - mu_ep) <= 2.0 * edge or (
        gap_ep >= gap(lo) or gap_ep >= gap(hi)
    ):
        raise BracketError(
            f"no interior gap minimum in |mu| bracket ({lo:.6e}, {hi:.6e}); "
            f"minimum found at {mu_ep:.6e} with gap {gap_ep:.6e}"
        )
    return EPResult(mu_ep=mu_ep, gap_at_ep=gap_ep, bracket=(lo, hi))
