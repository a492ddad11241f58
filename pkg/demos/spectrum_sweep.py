# %% [markdown]
# # Spectrum against the coupling
#
# The lowest levels at delta = 2.5 for 0 <= g <= 1.  Pairs of real levels
# meet and turn into complex conjugate pairs (exceptional points); levels
# of opposite parity cross on the pole lines E = n + g^2 without mixing.

# %%
import numpy as np

from _common import pyplot, save_csv, save_figure
from ptrabi import FockSpace, locate_degenerate, trace_spectrum

delta, levels = 2.5, 10
grid = np.linspace(0.0, 1.0, 201)

# %%
trace = trace_spectrum(delta, grid, FockSpace(120), levels=levels, audit=False)
rows = [(r.g, v.real, v.imag, p, b, src)
        for r in trace.records
        for v, p, b, src in zip(r.values, r.parity, r.branch_id, r.provenance)]
save_csv("spectrum.csv", ["g", "re_E", "im_E", "parity", "branch_id", "provenance"], rows)

# %%
for c in trace.coalescences + trace.crossings:
    print(f"{c.kind:>9}: g in [{c.g_lo:.3f}, {c.g_hi:.3f}], E ~ {c.energy:.4f}, levels {c.level_pair}")

d1 = locate_degenerate(delta, 1)
print(f"first crossing on pole line 1: g = {d1.g_n}, E = {d1.E_n}")

# %%
plt = pyplot()
if plt is not None:
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(11, 4), sharex=True)
    data = np.array([(g, re, im) for g, re, im, *_ in rows])
    ax0.plot(data[:, 0], data[:, 1], ".", ms=1.5)
    for n in range(6):
        ax0.plot(grid, n + grid**2, "k:", lw=0.6)
    ax0.set_ylim(-1.5, 5)
    ax0.set_xlabel("g")
    ax0.set_ylabel("Re E")
    ax1.plot(data[:, 0], data[:, 2], ".", ms=1.5)
    ax1.set_xlabel("g")
    ax1.set_ylabel("Im E")
    save_figure(fig, "spectrum.png")
