"""Probe transmission across the single/double transparency transition.

Sweeps the probe around the mechanical resonance for four values of the
coupling phase phi2, once below and once above the supermode splitting
threshold, with the zero-pump absorption dip overlaid as a control.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from omitloop import default_params, spectrum

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p = default_params()
w = np.linspace(0.98, 1.02, 2001) * p.omega_m
x = w / p.omega_m
phases = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]

fig, axes = plt.subplots(2, 4, figsize=(14, 6), sharex=True, sharey="row")
for row, mu_frac in enumerate((0.2, 0.5)):
    mu = mu_frac * p.gamma_span
    dark = spectrum(p.replace(mu_mag=mu, pump_power=0.0), w)
    for col, phi2 in enumerate(phases):
        ax = axes[row, col]
        sp = spectrum(p.replace(mu_mag=mu, g2_phase=phi2), w)
        ax.plot(x, sp.abs_t, "C0", lw=1.2)
        ax.plot(x, dark.abs_t, "r--", lw=0.8, label="pump off")
        if row == 0:
            ax.set_title(f"$\\phi_2 = {phi2 / np.pi:.2g}\\pi$")
        if col == 0:
            ax.set_ylabel(
                f"$|t_p|$,  $\\mu = {mu_frac}(\\gamma_1-\\gamma_2)$"
            )
        ax.set_xlabel("$\\omega/\\omega_m$")
axes[0, 0].legend(loc="upper left", fontsize=8)
fig.suptitle("Steering the transparency windows with the coupling phase")
fig.tight_layout()
fig.savefig(OUT / "probe_spectra.png", dpi=160)
print(f"wrote {OUT / 'probe_spectra.png'}")
print("below splitting: one window that shifts with phi2;")
print("above splitting: two windows whose weights trade places.")
