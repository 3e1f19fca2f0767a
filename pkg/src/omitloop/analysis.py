"""Figures of merit of the transparency windows: peaks, bandwidths, products.

The probe spectrum splits at the mechanical frequency into a lower band
(omega < omega_m) and an upper band (omega > omega_m) hosting one
transparency window each when the resonator pair is frequency-split
("split" mode).  Below the splitting threshold the window is analyzed as a
single band ("single" mode).  Per band this module extracts the refined
peak, its half width at half maximum, and the peak*width product, and
sweeps them against the coupling phase; a 2-D transmission map over probe
offset and resonator coupling completes the picture.

Conventions (documented, configurable where noted): the "gain" of a band
is its peak |t_p| (not squared, no baseline subtraction); the HWHM is half
the distance between the two half-maximum crossings, each found by linear
interpolation inside the band only; when just one crossing exists the
single-sided width is returned with a truncation flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BandBoundaryError, BandwidthUndefinedError, PhysicsError
from .linear_response import Spectrum, spectrum_with_state
from .params import SystemParams
from .stability import assert_stable
from .steady_state import solve_steady_state

BANDS = ("lower", "upper", "full")

#: Default probe-offset grid for sweeps, in units of omega_m.
DEFAULT_WINDOW = (0.98, 1.02)
DEFAULT_POINTS = 2001


@dataclass(frozen=True)
class BandMetrics:
    """Peak, bandwidth and their product for one band of one spectrum.

    ``product`` is None when no product is defined (negative delay peak:
    ``advance`` set; no interior peak: ``found`` cleared).
    """

    band: str
    peak_omega: float
    peak_value: float
    hwhm: float
    product: Optional[float]
    truncated: bool = False
    advance: bool = False
    found: bool = True


@dataclass(frozen=True)
class SweepTable:
    """Per-band metrics and band-summed products along one sweep axis."""

    axis_name: str
    axis_values: np.ndarray
    rows: tuple  # tuple over axis values of tuples of BandMetrics
    totals: np.ndarray

    def band_series(self, band: str, attr: str) -> np.ndarray:
        """Extract one attribute of one band along the axis."""
        out = []
        for row in self.rows:
            match = [m for m in row if m.band == band]
            if not match:
                out.append(math.nan)
                continue
            v = getattr(match[0], attr)
            out.append(math.nan if v is None else v)
        return np.asarray(out, dtype=float)


def _band_limits(spec: Spectrum, band: str):
    wm = spec.params.omega_m
    w = spec.omegas
    if band == "lower":
        return float(w[0]), wm
    if band == "upper":
        return wm, float(w[-1])
    if band == "full":
        return float(w[0]), float(w[-1])
    raise ValueError(f"band must be one of {BANDS}, got {band!r}")


def _band_values(spec: Spectrum, quantity: str) -> np.ndarray:
    if quantity == "abs_t":
        return spec.abs_t
    if quantity == "tau_g":
        if spec.tau_g is None:
            raise ValueError("spectrum grid too short for group delay")
        return spec.tau_g
    raise ValueError(f"quantity must be 'abs_t' or 'tau_g', got {quantity!r}")


def _refine_quadratic(w, v, k):
    """Vertex of the parabola through points k-1, k, k+1 (grid fallback)."""
    x1, x2, x3 = w[k - 1], w[k], w[k + 1]
    y1, y2, y3 = v[k - 1], v[k], v[k + 1]
    det = (x1 - x2) * (x1 - x3) * (x2 - x3)
    a = (x3 * (y2 - y1) + x2 * (y1 - y3) + x1 * (y3 - y2)) / det
    if a >= 0.0:
        return float(w[k]), float(v[k])
    b = (x3 * x3 * (y1 - y2) + x2 * x2 * (y3 - y1) + x1 * x1 * (y2 - y3)) / det
    xv = -b / (2.0 * a)
    cc = y2 - a * x2 * x2 - b * x2
    return float(xv), float(a * xv * xv + b * xv + cc)


def find_band_peak(
    spec: Spectrum, band: str, quantity: str = "abs_t"
) -> tuple[float, float]:
    """Locate the band maximum, refined by quadratic interpolation.

    Raises
    ------
    BandBoundaryError
        If the grid maximum sits on the band edge (no interior peak, or
        the grid window is too narrow).
    """
    lo, hi = _band_limits(spec, band)
    w = spec.omegas
    v = _band_values(spec, quantity)
    idx = np.where((w > lo if band != "lower" else w >= lo)
                   & (w < hi if band != "upper" else w <= hi))[0]
    # exclude omega == omega_m from both split bands
    if band == "lower":
        idx = idx[w[idx] < spec.params.omega_m]
    elif band == "upper":
        idx = idx[w[idx] > spec.params.omega_m]
    if idx.size < 50:
        raise ValueError(
            f"{band} band holds {idx.size} grid points, need at least 50"
        )
    k = idx[int(np.argmax(v[idx]))]
    if k == idx[0] or k == idx[-1]:
        raise BandBoundaryError(
            f"maximum of {quantity} in {band} band sits on the grid edge "
            f"(omega/omega_m = {w[k] / spec.params.omega_m:.6f})"
        )
    return _refine_quadratic(w, v, k)


def hwhm(
    spec: Spectrum,
    peak: tuple[float, float],
    band: str,
    quantity: str = "abs_t",
) -> tuple[float, bool]:
    """Half width at half maximum of a located band peak.

    Both half-maximum crossings are searched inside the band, walking
    outward from the peak, with linear interpolation between the bracketing
    grid points; the width is (omega_hi - omega_lo)/2.  If only one
    crossing lies inside the band the single-sided distance to the peak is
    returned with the truncation flag set.

    Returns (width, truncated).

    Raises
    ------
    BandwidthUndefinedError
        If the peak value is not positive or no crossing exists.
    """
    peak_omega, peak_value = peak
    if not peak_value > 0.0:
        raise BandwidthUndefinedError(
            f"peak value {peak_value!r} admits no half-maximum level"
        )
    half = peak_value / 2.0
    lo, hi = _band_limits(spec, band)
    w = spec.omegas
    v = _band_values(spec, quantity)
    idx = np.where((w >= lo) & (w <= hi))[0]
    k = idx[int(np.argmin(np.abs(w[idx] - peak_omega)))]

    lo_x = hi_x = None
    i = k
    while i > idx[0]:
        if v[i] >= half and v[i - 1] < half:
            lo_x = w[i - 1] + (w[i] - w[i - 1]) * (half - v[i - 1]) / (
                v[i] - v[i - 1]
            )
            break
        i -= 1
    i = k
    while i < idx[-1]:
        if v[i] >= half and v[i + 1] < half:
            hi_x = w[i] + (w[i + 1] - w[i]) * (half - v[i]) / (v[i + 1] - v[i])
            break
        i += 1

    if lo_x is not None and hi_x is not None:
        return float((hi_x - lo_x) / 2.0), False
    if lo_x is not None:
        return float(peak_omega - lo_x), True
    if hi_x is not None:
        return float(hi_x - peak_omega), True
    raise BandwidthUndefinedError(
        f"no half-maximum crossing of {quantity} inside the {band} band "
        f"around omega = {peak_omega:.6e}"
    )


def band_metrics(
    spec: Spectrum, band: str, quantity: str = "abs_t"
) -> BandMetrics:
    """Peak + HWHM + product for one band, flagging the degenerate cases.

    Unlike the standalone :func:`find_band_peak` / :func:`hwhm` operations,
    which raise, this assembler reports a band without an interior peak
    (``found`` cleared), with a negative delay peak (``advance`` set) or
    without a half-maximum crossing (``hwhm`` NaN) as a flagged row with
    ``product`` None, so sweeps can keep going.
    """
    try:
        peak_omega, peak_value = find_band_peak(spec, band, quantity)
    except BandBoundaryError:
        return BandMetrics(
            band, math.nan, math.nan, math.nan, None, found=False
        )
    if quantity == "tau_g" and peak_value <= 0.0:
        return BandMetrics(
            band, peak_omega, peak_value, math.nan, None, advance=True
        )
    try:
        width, truncated = hwhm(spec, (peak_omega, peak_value), band, quantity)
    except BandwidthUndefinedError:
        return BandMetrics(band, peak_omega, peak_value, math.nan, None)
    return BandMetrics(
        band, peak_omega, peak_value, width, peak_value * width,
        truncated=truncated,
    )


def default_omega_grid(params: SystemParams) -> np.ndarray:
    lo, hi = DEFAULT_WINDOW
    return np.linspace(lo, hi, DEFAULT_POINTS) * params.omega_m


def _phase_sweep(params, phi2_grid, quantity, bands, omega_grid):
    grid = np.asarray(phi2_grid, dtype=float)
    if omega_grid is None:
        omega_grid = default_omega_grid(params)
    band_names = ("lower", "upper") if bands == "split" else ("full",)
    rows = []
    totals = np.empty(grid.size)
    for k, phi2 in enumerate(grid):
        p = params.replace(g2_phase=phi2)
        assert_stable(p, where=f"phi2 = {phi2:.6f} rad")
        state, _ = solve_steady_state(p)
        spec = spectrum_with_state(p, state, omega_grid)
        try:
            row = tuple(band_metrics(spec, b, quantity) for b in band_names)
        except PhysicsError as exc:
            raise type(exc)(f"{exc} (at phi2 = {phi2:.6f} rad)") from exc
        rows.append(row)
        products = [m.product for m in row if m.product is not None]
        totals[k] = sum(products) if products else math.nan
    return SweepTable(
        axis_name="phi2", axis_values=grid, rows=tuple(rows), totals=totals
    )


def gain_bandwidth_sweep(
    params: SystemParams,
    phi2_grid,
    bands: str = "split",
    omega_grid=None,
) -> SweepTable:
    """Transmission peak, HWHM and their product per band over phi2.

    ``bands`` is "split" (window pair split at omega_m, the frequency-split
    regime) or "single" (one undivided band, the overdamped-split regime).
    Every sweep point is stability-checked first; an unstable point raises
    :class:`InstabilityError` naming the offending phase.
    """
    if bands not in ("split", "single"):
        raise ValueError(f"bands must be 'split' or 'single', got {bands!r}")
    return _phase_sweep(params, phi2_grid, "abs_t", bands, omega_grid)


def delay_bandwidth_sweep(
    params: SystemParams,
    phi2_grid,
    bands: str = "split",
    omega_grid=None,
) -> SweepTable:
    """Same band logic applied to the group-delay curve tau_g(omega).

    A band whose delay peak is negative (pulse advance) is reported with
    the ``advance`` flag and contributes no product to the totals.
    """
    if bands not in ("split", "single"):
        raise ValueError(f"bands must be 'split' or 'single', got {bands!r}")
    return _phase_sweep(params, phi2_grid, "tau_g", bands, omega_grid)


@dataclass(frozen=True)
class TransmissionMap:
    """|t_p| over the probe-offset x resonator-coupling plane."""

    omega_grid: np.ndarray
    mu_grid: np.ndarray
    values: np.ndarray  # shape (len(mu_grid), len(omega_grid))
    phi2: float
    errors: tuple  # (row index, message) pairs for failed rows
    omega_m: float
    gamma_span: float

    @property
    def omega_over_omega_m(self):
        return self.omega_grid / self.omega_m

    @property
    def mu_over_gamma_span(self):
        return self.mu_grid / self.gamma_span


def map2d(
    params: SystemParams, omega_grid, mu_grid, phi2: float,
    threads: int = 1,
) -> TransmissionMap:
    """Transmission magnitude map; steady state re-solved per mu row.

    Rows where the steady state or the response fails are filled with NaN
    and recorded in ``errors`` instead of aborting the map.  Rows are
    independent; ``threads`` > 1 evaluates them concurrently with results
    assembled in grid order.
    """
    w = np.asarray(omega_grid, dtype=float)
    mus = np.asarray(mu_grid, dtype=float)
    for name, g in (("omega_grid", w), ("mu_grid", mus)):
        if g.ndim != 1 or g.size == 0 or not np.all(np.diff(g) > 0.0):
            raise ValueError(f"{name} must be non-empty, strictly increasing")

    def row(mu_mag):
        p = params.replace(mu_mag=mu_mag, g2_phase=phi2)
        try:
            state, _ = solve_steady_state(p)
            return spectrum_with_state(p, state, w).abs_t, None
        except PhysicsError as exc:
            return None, str(exc)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(row, mus))
    else:
        results = [row(m) for m in mus]

    values = np.full((mus.size, w.size), np.nan)
    errors = []
    for i, (vals, err) in enumerate(results):
        if err is not None:
            errors.append((i, err))
        else:
            values[i] = vals
    return TransmissionMap(
        omega_grid=w,
        mu_grid=mus,
        values=values,
        phi2=float(phi2),
        errors=tuple(errors),
        omega_m=params.omega_m,
        gamma_span=params.gamma_span,
    )
