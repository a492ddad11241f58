# %% [markdown]
# # The G-function and where its zeros sit
#
# Both G-functions at delta = 0.5, g = 0.25 along the real energy axis, and
# ln|G|^2 over a patch of the complex plane.  Real zeros are the real
# eigenvalues; the dips off the axis are complex conjugate pairs.

# %%
import numpy as np

from _common import pyplot, save_csv, save_figure
from ptrabi import FockSpace, ModelParams, diagonalize, scan_real_zeros
from ptrabi.gfunction import evaluate_G_grid

params = ModelParams(0.5, 0.25)

# %%
E = np.linspace(-1.0, 5.0, 3001)
grid = evaluate_G_grid(params, E, order=0)
gp = np.where(grid["converged"] & ~grid["pole"], grid["plus"].real, np.nan)
gm = np.where(grid["converged"] & ~grid["pole"], grid["minus"].real, np.nan)
save_csv("g_curves.csv", ["E", "re_Gp", "re_Gm"], zip(E, gp, gm))

zeros = scan_real_zeros(params, -1.0, 5.0)
for z in zeros:
    print(f"real zero E = {z.E:.12f}  parity {z.parity:+d}")

# %%
# every real zero is an eigenvalue of the truncated matrix
es = diagonalize(params, FockSpace(120))
print("max distance to a matrix eigenvalue:", max(np.min(np.abs(es.values - z.E)) for z in zeros))

# %%
re, im = np.meshgrid(np.linspace(-1.0, 5.0, 301), np.linspace(-2.0, 2.0, 201))
cplx = evaluate_G_grid(params, re + 1j * im, order=0)
log_p = np.log(np.abs(cplx["plus"]) ** 2)
log_m = np.log(np.abs(cplx["minus"]) ** 2)
save_csv("g_heatmap.csv", ["re_E", "im_E", "ln_abs2_Gp", "ln_abs2_Gm"],
         zip(re.ravel(), im.ravel(), log_p.ravel(), log_m.ravel()))

# %%
plt = pyplot()
if plt is not None:
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(11, 4))
    ax0.plot(E, np.clip(gp, -3, 3), label="G+")
    ax0.plot(E, np.clip(gm, -3, 3), label="G-")
    ax0.axhline(0, color="k", lw=0.5)
    ax0.set_xlabel("E")
    ax0.legend()
    mesh = ax1.pcolormesh(re, im, np.minimum(log_p, log_m), shading="auto", cmap="viridis")
    complex_vals = es.values[(np.abs(es.values.imag) > 1e-9) & (es.values.real < 5)]
    ax1.plot(complex_vals.real, complex_vals.imag, "r+", label="matrix eigenvalues")
    ax1.set_xlabel("Re E")
    ax1.set_ylabel("Im E")
    ax1.legend(loc="lower right")
    fig.colorbar(mesh, ax=ax1, label="ln |G|^2 (smaller of the two)")
    save_figure(fig, "g_function.png")
