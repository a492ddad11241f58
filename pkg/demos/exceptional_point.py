# %% [markdown]
# # Two real zeros merging into an exceptional point
#
# Below the exceptional point G- has two real zeros in the window; at g*
# they merge into a double zero (G = dG/dE = 0); above it they have moved
# off the real axis.

# %%
import numpy as np

from _common import pyplot, save_csv, save_figure
from ptrabi import ModelParams, evaluate_G, locate_ep, scan_real_zeros
from ptrabi.gfunction import evaluate_G_grid

delta = 2.5
ep = locate_ep(delta, (0.60, 0.66))
print(ep)

# %%
E = np.linspace(0.0, 1.2, 1201)
couplings = [ep.g_star - 0.02, ep.g_star, ep.g_star + 0.02]
columns = []
for g in couplings:
    grid = evaluate_G_grid(ModelParams(delta, g), E, order=0)
    columns.append(np.where(grid["converged"] & ~grid["pole"], grid["minus"].real, np.nan))
    zs = [z.E for z in scan_real_zeros(ModelParams(delta, g), 0.0, 1.2) if z.parity == -1]
    print(f"g = {g:.6f}: real zeros of G- in [0, 1.2]: {np.round(zs, 6)}")
save_csv("ep_curves.csv", ["E"] + [f"re_Gm_g{g:.6f}" for g in couplings], zip(E, *columns))

# %%
v = evaluate_G(ModelParams(delta, ep.g_star), ep.E_star, order=2)
print("at the exceptional point: |G| =", abs(v.value(-1)), " |dG/dE| =", abs(v.derivative(-1)),
      " |d2G/dE2| =", abs(v.derivative(-1, 2)))

# %%
plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for g, col in zip(couplings, columns):
        ax.plot(E, col, label=f"g = {g:.4f}")
    ax.axhline(0, color="k", lw=0.5)
    ax.plot([ep.E_star], [0], "ko")
    ax.set_ylim(-0.05, 0.05)
    ax.set_xlabel("E")
    ax.set_ylabel("G-(E)")
    ax.legend()
    save_figure(fig, "exceptional_point.png")
