"""Window gain, bandwidth and their product against the coupling phase.

Above the splitting the two windows trade gain for bandwidth as phi2 turns
and the band-summed product stays roughly level; below the splitting the
single window's product swings much harder.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from omitloop import default_params, gain_bandwidth_sweep

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p = default_params()
span = p.gamma_span
phi2_grid = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)

split = gain_bandwidth_sweep(p, phi2_grid, bands="split")
single = gain_bandwidth_sweep(
    p.replace(mu_mag=0.2 * span), phi2_grid, bands="single"
)

fig, axes = plt.subplots(3, 2, figsize=(10, 8), sharex=True)
x = phi2_grid / np.pi
for col, (table, bands, label) in enumerate((
    (split, ("lower", "upper"), "above splitting (two windows)"),
    (single, ("full",), "below splitting (one window)"),
)):
    colors = {"lower": "r", "upper": "b", "full": "C0"}
    for band in bands:
        c = colors[band]
        axes[0, col].plot(x, table.band_series(band, "peak_value"), c,
                          label=band)
        axes[1, col].plot(x, table.band_series(band, "hwhm") / span, c)
        axes[2, col].plot(x, table.band_series(band, "product") / span, c)
    axes[2, col].plot(x, table.totals / span, "k", lw=2, label="sum")
    axes[0, col].set_title(label)
    axes[0, col].legend(fontsize=8)
    axes[2, col].set_xlabel("$\\phi_2/\\pi$")
    spread = (table.totals.max() - table.totals.min()) / table.totals.mean()
    print(f"{label}: total product spread = {spread:.2%}")
axes[0, 0].set_ylabel("peak $|t_p|$")
axes[1, 0].set_ylabel("HWHM$/(\\gamma_1-\\gamma_2)$")
axes[2, 0].set_ylabel("product$/(\\gamma_1-\\gamma_2)$")
fig.tight_layout()
fig.savefig(OUT / "gain_bandwidth.png", dpi=160)
print(f"wrote {OUT / 'gain_bandwidth.png'}")
