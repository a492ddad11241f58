# %% [markdown]
# # Telling crossings from coalescences
#
# The fidelity susceptibility is large and positive where two levels cross
# (the sorted state swaps to an orthogonal one), large and negative where
# two levels coalesce.  The c-product <L|R> stays near one away from both,
# vanishes at the coalescence and jumps at the crossing.

# %%
import numpy as np

from _common import pyplot, save_csv, save_figure
from ptrabi import FockSpace, fs_scan, locate_degenerate, locate_ep

delta = 2.5
grid = np.round(np.arange(0.05, 0.70, 0.001), 6)
levels = [1, 3, 5]

# %%
scan = fs_scan(delta, grid, levels, FockSpace(120))
rows = [(p.g, p.branch_id, p.chi.real, p.chi.imag, abs(p.c_product), p.flag)
        for level in levels for p in scan[level]]
save_csv("fidelity.csv", ["g", "level", "re_chi", "im_chi", "abs_c", "flag"], rows)

# %%
marks = {"crossing": [locate_degenerate(delta, n).g_n for n in (1, 2)]}
marks["coalescence"] = [locate_ep(delta, w).g_star for w in ((0.60, 0.66), (0.43, 0.46), (0.34, 0.38))]
print(marks)
for level in levels:
    chi = np.array([p.chi.real for p in scan[level]])
    print(f"level {level}: max Re chi {np.nanmax(chi):.3e} at g = {grid[np.nanargmax(chi)]:.3f}, "
          f"min Re chi {np.nanmin(chi):.3e} at g = {grid[np.nanargmin(chi)]:.3f}")

# %%
plt = pyplot()
if plt is not None:
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(11, 4), sharex=True)
    for level in levels:
        chi = np.array([p.chi.real for p in scan[level]])
        ax0.plot(grid, np.sign(chi) * np.log10(1 + np.abs(chi)), label=f"level {level}")
        ax1.plot(grid, [abs(p.c_product) for p in scan[level]], label=f"level {level}")
    for g in marks["crossing"]:
        ax0.axvline(g, color="g", ls=":", lw=0.8)
    for g in marks["coalescence"]:
        ax0.axvline(g, color="r", ls=":", lw=0.8)
    ax0.set_ylabel("sign(Re chi) log10(1 + |Re chi|)")
    ax1.set_ylabel("|<L|R>|")
    for ax in (ax0, ax1):
        ax.set_xlabel("g")
        ax.legend()
    save_figure(fig, "fidelity.png")
