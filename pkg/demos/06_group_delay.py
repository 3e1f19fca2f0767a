"""Slow light in the transparency windows and its bandwidth trade-off.

Runs at the reduced pump power used for the delay studies.  The
transmitting window carries a positive group delay of a few hundred
nanoseconds that follows the phase steering, and the band-summed
delay-bandwidth product stays nearly constant.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from omitloop import default_params, delay_bandwidth_sweep, spectrum

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p = default_params().replace(pump_power=10e-6)
w = np.linspace(0.98, 1.02, 2001) * p.omega_m

fig, axes = plt.subplots(1, 2, figsize=(11, 4))
for phi2, color in ((0.0, "C0"), (np.pi, "C3")):
    sp = spectrum(p.replace(g2_phase=phi2), w)
    axes[0].plot(w / p.omega_m, sp.tau_g * 1e6, color,
                 label=f"$\\phi_2 = {phi2 / np.pi:.0f}\\pi$")
    print(f"phi2 = {phi2 / np.pi:.0f} pi: "
          f"peak delay {np.max(sp.tau_g) * 1e9:.0f} ns")
axes[0].axhline(0.0, color="k", lw=0.5)
axes[0].set_xlabel("$\\omega/\\omega_m$")
axes[0].set_ylabel("$\\tau_g$ [$\\mu$s]")
axes[0].legend()
axes[0].set_title("group delay (positive: slow light)")

phi2_grid = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
table = delay_bandwidth_sweep(p, phi2_grid, bands="split")
x = phi2_grid / np.pi
for band, color in (("lower", "r"), ("upper", "b")):
    axes[1].plot(x, table.band_series(band, "product"), color, label=band)
axes[1].plot(x, table.totals, "k", lw=2, label="sum")
axes[1].set_xlabel("$\\phi_2/\\pi$")
axes[1].set_ylabel("delay-bandwidth product")
axes[1].legend(fontsize=8)
axes[1].set_title("delay-bandwidth trade-off")
spread = (np.nanmax(table.totals) - np.nanmin(table.totals))
spread /= np.nanmean(table.totals)
print(f"total delay-bandwidth spread over phi2: {spread:.2%}")

fig.tight_layout()
fig.savefig(OUT / "group_delay.png", dpi=160)
print(f"wrote {OUT / 'group_delay.png'}")
