"""Acceptance suite: one test per release criterion, spec tolerances pinned.

Each test prints one `[ACCEPTANCE nn] PASS/FAIL ...` line (run pytest with
-s to see them all).  Criteria 6, 9 and 10 are currently red: the model,
validated end to end against the independent time-domain oracle, lands
near but outside those pins.  The measured values are printed and the
analysis lives in the project notes; the pins are kept as stated rather
than loosened to force green.
"""

import math

import numpy as np
import pytest

from omitloop import (
    build_stability_matrix,
    classify,
    classify_params,
    band_metrics,
    default_params,
    delay_bandwidth_sweep,
    gain_bandwidth_sweep,
    integrate_linearized,
    locate_ep,
    solve_steady_state,
    spectrum,
    spectrum_with_state,
    transmission,
)

PHI_HALF = math.pi / 2.0


def criterion(num, title, ok, detail=""):
    line = f"[ACCEPTANCE {num:02d}] {'PASS' if ok else 'FAIL'} {title}"
    if detail:
        line += f" | {detail}"
    print(line)
    assert ok, line


def interior_extrema(values):
    v = np.asarray(values)
    inner = v[1:-1]
    maxima = np.where((inner > v[:-2]) & (inner > v[2:]))[0] + 1
    minima = np.where((inner < v[:-2]) & (inner < v[2:]))[0] + 1
    return maxima, minima


@pytest.fixture(scope="module")
def window(base):
    return np.linspace(0.98, 1.02, 2001) * base.omega_m


@pytest.fixture(scope="module")
def phi2_grid_32():
    return np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)


@pytest.fixture(scope="module")
def broken_gain_sweep(base, phi2_grid_32, window):
    p = default_params().replace(mu_mag=0.2 * base.gamma_span)
    return gain_bandwidth_sweep(p, phi2_grid_32, bands="single",
                                omega_grid=window)


def test_01_critical_coupling_null(base):
    p = base.replace(g1_mag=0.0, g2_mag=0.0)
    state, _ = solve_steady_state(p)
    value = abs(transmission(p, state, p.omega_m).t_p)
    criterion(1, "critical-coupling transmission null", value <= 1e-12,
              f"|t_p(omega_m)| = {value:.3e}")


def test_02_decoupled_exceptional_point(base):
    p = base.replace(g1_mag=0.0, g2_mag=0.0)
    span = p.gamma_span
    result = locate_ep(p, (0.1 * span, 0.4 * span))
    value = result.mu_ep / span
    criterion(2, "decoupled pair coalescence at quarter span",
              abs(value - 0.25) <= 1e-6,
              f"mu_EP/span = {value:.9f}, gap/span = "
              f"{result.gap_at_ep / span:.2e}")


def test_03_coupled_exceptional_point_bracket(base):
    # the tracked pair touches on the quarter-phase line of the loop
    p = base.replace(g2_phase=PHI_HALF)
    span = p.gamma_span
    result = locate_ep(p, (0.15 * span, 0.35 * span))
    value = result.mu_ep / span
    criterion(3, "coupled coalescence inside reported window",
              0.20 < value < 0.28, f"mu_EP/span = {value:.6f}")


def test_04_stability_trajectory(base):
    bad = []
    for frac in (0.2, 0.5):
        p_mu = base.replace(mu_mag=frac * base.gamma_span)
        for phi2 in np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False):
            if not classify_params(p_mu.replace(g2_phase=phi2)).stable:
                bad.append((frac, phi2))
    weak = base.replace(
        g2_mag=0.05 * base.g1_mag, g2_phase=0.0,
        mu_mag=0.2 * base.gamma_span,
    )
    weak_unstable = not classify_params(weak).stable
    criterion(4, "chosen coupling row stable, weak-coupling point unstable",
              not bad and weak_unstable,
              f"unstable trajectory points: {len(bad)}, "
              f"|g2|=0.05 g1 unstable: {weak_unstable}")


def test_05_single_to_double_window(base, window):
    p = base.replace(g2_phase=PHI_HALF)
    results = {}
    for frac in (0.2, 0.5):
        spec = spectrum(p.replace(mu_mag=frac * base.gamma_span), window)
        maxima, _ = interior_extrema(spec.abs_t)
        results[frac] = (maxima, spec)
    n_below = results[0.2][0].size
    n_above = results[0.5][0].size
    ok = n_below == 1 and n_above == 2
    detail = f"interior maxima: {n_below} below, {n_above} above splitting"
    if n_above == 2:
        maxima, spec = results[0.5]
        w_lo, w_hi = spec.omegas[maxima]
        midpoint_offset = abs(0.5 * (w_lo + w_hi) - base.omega_m)
        separation = w_hi - w_lo
        ok = ok and midpoint_offset <= 0.01 * separation
        detail += (f"; midpoint offset = "
                   f"{midpoint_offset / separation:.3%} of separation")
    criterion(5, "single/double window across the coalescence", ok, detail)


def test_06_phase_steering(base, window):
    at0 = spectrum(base.replace(g2_phase=0.0), window)
    atpi = spectrum(base.replace(g2_phase=math.pi), window)
    up0 = band_metrics(at0, "upper").peak_value
    lo0 = band_metrics(at0, "lower").peak_value
    uppi = band_metrics(atpi, "upper").peak_value
    lopi = band_metrics(atpi, "lower").peak_value
    flip = up0 > lo0 and lopi > uppi
    rel = abs(up0 - lopi) / max(up0, lopi)
    criterion(6, "steering swaps the dominant window at equal height",
              flip and rel <= 0.02,
              f"upper(0) = {up0:.5f}, lower(pi) = {lopi:.5f}, "
              f"rel diff = {rel:.3%} (pin 2%), dominance flip: {flip}")


def test_07_mirror_phases(base, window):
    up = spectrum(base.replace(g2_phase=PHI_HALF), window)
    dn = spectrum(base.replace(g2_phase=3.0 * PHI_HALF), window)
    worst = float(np.max(np.abs(up.abs_t - dn.abs_t) / up.abs_t))
    criterion(7, "quarter-phase mirror spectra identical",
              worst <= 1e-6, f"max rel diff = {worst:.2e}")


def test_08_gauge_invariance(base, window):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(3):
        phi2, phimu = rng.uniform(0.0, 2.0 * math.pi, size=2)
        loop = phi2 + phimu
        ref = spectrum(base.replace(g2_phase=loop, mu_phase=0.0), window)
        alt = spectrum(base.replace(g2_phase=phi2, mu_phase=phimu), window)
        worst = max(worst, float(np.max(
            np.abs(alt.t_p - ref.t_p) / np.abs(ref.t_p)
        )))
    criterion(8, "only the loop phase is observable",
              worst <= 1e-10, f"max rel diff = {worst:.2e}")


def test_09_gain_bandwidth_products(base, phi2_grid_32, window,
                                    broken_gain_sweep):
    unbroken = gain_bandwidth_sweep(base, phi2_grid_32, bands="split",
                                    omega_grid=window)
    s_u = (unbroken.totals.max() - unbroken.totals.min())
    s_u /= unbroken.totals.mean()
    s_b = (broken_gain_sweep.totals.max() - broken_gain_sweep.totals.min())
    s_b /= broken_gain_sweep.totals.mean()
    criterion(9, "product constant above splitting, variable below",
              s_u < 0.05 and s_b > 0.20,
              f"frequency-split spread = {s_u:.3%} (pin < 5%), "
              f"overdamped-split spread = {s_b:.3%} (pin > 20%)")


def test_10_broken_phase_bandwidth_tunability(broken_gain_sweep):
    widths = broken_gain_sweep.band_series("full", "hwhm")
    ratio = float(np.nanmax(widths) / np.nanmin(widths))
    criterion(10, "overdamped-split bandwidth tunability",
              1.3 <= ratio <= 1.8,
              f"max/min HWHM = {ratio:.3f} (pin [1.3, 1.8])")


def test_11_slow_light(base, phi2_grid_32, window):
    p = default_params().replace(pump_power=10e-6)
    transmitting_ok = True
    details = []
    for phi2, dominant in ((0.0, "upper"), (math.pi, "lower")):
        state, _ = solve_steady_state(p.replace(g2_phase=phi2))
        spec = spectrum_with_state(p.replace(g2_phase=phi2), state, window)
        m = band_metrics(spec, dominant, "tau_g")
        transmitting_ok &= m.found and not m.advance and m.peak_value > 0.0
        details.append(f"peak tau_g({dominant}, phi2={phi2:.2f}) = "
                       f"{m.peak_value * 1e9:.1f} ns")
    table = delay_bandwidth_sweep(p, phi2_grid_32, bands="split",
                                  omega_grid=window)
    spread = (np.nanmax(table.totals) - np.nanmin(table.totals))
    spread /= np.nanmean(table.totals)
    criterion(11, "slow light with constant delay-bandwidth product",
              transmitting_ok and spread < 0.10,
              "; ".join(details) + f"; total spread = {spread:.3%}"
              " (pin < 10%)")


def test_12_oracle_equivalence(base):
    rng = np.random.default_rng(42)
    span = base.gamma_span
    worst = 0.0
    found = 0
    while found < 10:
        phi2 = rng.uniform(0.0, 2.0 * math.pi)
        mu_frac = rng.uniform(0.15, 0.6)
        p = base.replace(g2_phase=phi2, mu_mag=mu_frac * span)
        if not classify_params(p).stable:
            continue
        found += 1
        state, _ = solve_steady_state(p)
        for w in rng.uniform(0.98, 1.02, size=5) * p.omega_m:
            closed = transmission(p, state, w).a1_minus
            measured = integrate_linearized(p, state, w).a1_minus
            worst = max(worst, abs(closed - measured) / abs(closed))
    criterion(12, "closed form matches time-domain integration",
              worst <= 1e-4,
              f"max rel deviation over 10 points x 5 offsets = {worst:.2e}")


def test_13_structural_eigenvalue_checks(base):
    rng = np.random.default_rng(7)
    span = base.gamma_span
    worst_conj = 0.0
    worst_trace = 0.0
    found = 0
    while found < 100:
        p = base.replace(
            g2_phase=rng.uniform(0.0, 2.0 * math.pi),
            mu_mag=rng.uniform(0.1, 0.7) * span,
            g2_mag=rng.uniform(0.5, 3.0) * base.g1_mag,
        )
        state, _ = solve_steady_state(p)
        report = classify(build_stability_matrix(p, state))
        if not report.stable:
            continue
        found += 1
        eigs = list(report.eigenvalues)
        pool = [e.conjugate() for e in eigs]
        for e in eigs:
            j = int(np.argmin([abs(e - q) for q in pool]))
            worst_conj = max(worst_conj, abs(e - pool[j]))
            pool.pop(j)
        trace_err = abs(
            np.sum(report.eigenvalues) - (-p.kappa - p.gamma1 - p.gamma2)
        )
        worst_trace = max(worst_trace, trace_err)
    wm = base.omega_m
    criterion(13, "conjugation closure and trace identity",
              worst_conj <= 1e-8 * wm and worst_trace <= 1e-10 * wm,
              f"conjugation {worst_conj / wm:.2e} omega_m (pin 1e-8), "
              f"trace {worst_trace / wm:.2e} omega_m (pin 1e-10)")


def test_14_zero_pump_control(base, window):
    ok = True
    details = []
    for frac in (0.2, 0.5):
        p = base.replace(mu_mag=frac * base.gamma_span, pump_power=0.0)
        spec = spectrum(p, window)
        maxima, minima = interior_extrema(spec.abs_t)
        dip_ok = (maxima.size == 0 and minima.size == 1)
        if dip_ok:
            w_dip = spec.omegas[minima[0]]
            dip_ok = abs(w_dip - base.omega_m) <= 1e-4 * base.omega_m
            details.append(
                f"mu/span={frac}: dip at omega/omega_m = "
                f"{w_dip / base.omega_m:.6f}"
            )
        else:
            details.append(
                f"mu/span={frac}: {maxima.size} maxima, "
                f"{minima.size} minima"
            )
        ok &= dip_ok
    criterion(14, "zero pump leaves one absorption dip", ok,
              "; ".join(details))


def test_15_population_steering(base):
    phi2_grid = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    series = {"photon": [], "resonator1": [], "resonator2": []}
    for phi2 in phi2_grid:
        state, _ = solve_steady_state(base.replace(g2_phase=phi2))
        series["photon"].append(state.n_cav)
        series["resonator1"].append(abs(state.b1_bar) ** 2)
        series["resonator2"].append(abs(state.b2_bar) ** 2)
    variations = {
        name: (max(v) - min(v)) / np.mean(v) for name, v in series.items()
    }
    ok = all(v < 0.15 for v in variations.values())
    criterion(15, "populations barely move while the phase steers", ok,
              ", ".join(f"{k}: {v:.2%}" for k, v in variations.items()))
