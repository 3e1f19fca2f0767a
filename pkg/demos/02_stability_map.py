"""Stability chart of the loop over coupling magnitude and phase.

The gain resonator destabilizes the loop unless it is damped through the
cavity (|g2|) or through its lossy partner (|mu|).  The |g2| = 2 g1 row
used throughout the other demos is stable at every phase for both
coupling strengths.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from omitloop import default_params, stability_map

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p = default_params()
g2_grid = np.linspace(0.05, 4.0, 90) * p.g1_mag
phi2_grid = np.linspace(0.0, 2.0 * np.pi, 91)

fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
for ax, mu_frac in zip(axes, (0.2, 0.5)):
    status, margins, failures = stability_map(
        p, g2_grid, phi2_grid, mu_frac * p.gamma_span, threads=4
    )
    assert not failures
    ax.pcolormesh(
        phi2_grid / np.pi,
        g2_grid / p.g1_mag,
        status,
        cmap="cool_r",
        shading="nearest",
        vmin=0,
        vmax=1,
    )
    ax.axhline(2.0, color="k", ls="--", lw=1)
    ax.set_title(f"$\\mu = {mu_frac}(\\gamma_1-\\gamma_2)$")
    ax.set_xlabel("$\\phi_2/\\pi$")
    unstable = int(np.sum(status == 0))
    print(f"mu/span = {mu_frac}: {unstable} unstable cells of {status.size}")
axes[0].set_ylabel("$|g_2|/g_1$")
fig.suptitle("Stable (magenta) and unstable (cyan) regions; dashed: |g2| = 2 g1")
fig.tight_layout()
fig.savefig(OUT / "stability_map.png", dpi=160)
print(f"wrote {OUT / 'stability_map.png'}")
