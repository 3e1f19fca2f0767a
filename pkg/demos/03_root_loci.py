"""Supermode root loci through the exceptional point.

Tracks the two upper mechanical eigenvalues over phi2 in [0, pi] for
coupling magnitudes below, near and above the coalescence, then refines
the coalescence point itself on the quarter-phase line.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from omitloop import default_params, locate_ep, mechanical_root_loci

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p = default_params()
span = p.gamma_span
phi2_grid = np.linspace(0.0, np.pi, 181)

ep = locate_ep(p.replace(g2_phase=np.pi / 2), (0.15 * span, 0.35 * span))
print(f"coalescence at |mu| = {ep.mu_ep / span:.4f} (gamma1 - gamma2), "
      f"residual gap {ep.gap_at_ep / span:.3e}")

fig, axes = plt.subplots(1, 4, figsize=(14, 3.6), sharey=True)
for ax, mu_frac in zip(axes, (0.2, ep.mu_ep / span, 0.28, 0.5)):
    locus = mechanical_root_loci(
        p.replace(mu_mag=mu_frac * span), phi2_grid
    )
    for track, color in zip(locus.tracks, ("C0", "C3")):
        ax.scatter(
            track.real / span,
            (track.imag - p.omega_m) / span,
            c=phi2_grid,
            cmap="viridis" if color == "C0" else "autumn",
            s=4,
        )
    ax.set_title(f"$\\mu = {mu_frac:.3f}(\\gamma_1-\\gamma_2)$")
    ax.set_xlabel("Re$\\,\\lambda/(\\gamma_1-\\gamma_2)$")
axes[0].set_ylabel("(Im$\\,\\lambda-\\omega_m)/(\\gamma_1-\\gamma_2)$")
fig.suptitle("Upper mechanical eigenvalue loci over $\\phi_2\\in[0,\\pi]$ "
             "(color: phase)")
fig.tight_layout()
fig.savefig(OUT / "root_loci.png", dpi=160)
print(f"wrote {OUT / 'root_loci.png'}")
print("below: damping ranks fixed, frequencies cross;")
print("above: frequency gap fixed, damping ranks swap.")
