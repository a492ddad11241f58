"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected by the ``verdict`` fixture and printed in the
terminal summary (see conftest.py), so ``pytest tests/test_acceptance.py``
ends with a compact table whatever ``-v``/``-s`` settings are in use.
"""

import csv
import io
import time

import numpy as np
import pytest

from ptrabi.cli import main
from ptrabi.diagnostics import c_product, fs_scan
from ptrabi.errors import NoConvergenceError
from ptrabi.gfunction import compute_recursion, evaluate_G
from ptrabi.model import FockSpace, ModelParams, build_hamiltonian, build_parity, check_pt_symmetry
from ptrabi.oracle import diagonalize
from ptrabi.solver import assemble_spectrum, find_complex_zero, locate_ep, scan_real_zeros, seed_complex_grid

DELTA = 2.5
G_DEGENERATE, E_DEGENERATE = 0.375, 1.140625
G_TARGET, G_TARGET_TOL = 0.6324, 5e-4
SPACE = FockSpace(120)


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_degeneracy_closed_form(tmp_path, verdict):
    out = tmp_path / "deg.csv"
    t0 = time.perf_counter()
    code = main(["degenerate", "--delta", str(DELTA), "--n", "1", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    row = read_csv(out)[0]
    dg = abs(float(row["g_star"]) - G_DEGENERATE)
    dE = abs(float(row["E_star"]) - E_DEGENERATE)

    absent = tmp_path / "none.csv"
    code_absent = main(["degenerate", "--delta", "1.99", "--n", "1", "--out", str(absent)])
    none_row = read_csv(absent)[0]
    not_found = none_row["found"] == "0" and code_absent == 0

    ok = code == 0 and dg < 1e-9 and dE < 1e-9 and not_found and elapsed < 1.0
    verdict(1, ok, f"|dg|={dg:.1e} |dE|={dE:.1e} (<1e-9), delta=1.99 not found={not_found}, "
                   f"{elapsed:.2f}s (<1s)")
    assert ok


def test_ep_location(verdict):
    t0 = time.perf_counter()
    ep = locate_ep(DELTA, (0.60, 0.66), space=SPACE)
    elapsed = time.perf_counter() - t0
    res_G, res_dG = ep.residuals
    near = abs(ep.g_star - G_TARGET) < G_TARGET_TOL
    ok = near and res_G < 1e-10 and res_dG < 1e-10 and ep.second_derivative > 1e-6 and elapsed < 30
    verdict(2, ok, f"g*={ep.g_star:.7f} vs {G_TARGET} (tol {G_TARGET_TOL}, off by "
                   f"{abs(ep.g_star - G_TARGET):.2e}), |G|={res_G:.1e} |G_E|={res_dG:.1e} (<1e-10), "
                   f"|G_EE|={ep.second_derivative:.2e} (>1e-6), {elapsed:.1f}s (<30s)")
    assert ok


def g_zeros(params, e_abs=20.0):
    """Every real and complex zero of both G-functions with |E| < e_abs, found without the oracle."""
    zeros = [(complex(z.E), z.parity) for z in scan_real_zeros(params, -e_abs, e_abs)]
    for seed, parity in seed_complex_grid(params, (-3, e_abs + 0.5), (1e-3, 8), n_re=120, n_im=40):
        try:
            z = find_complex_zero(params, seed, parity)
        except NoConvergenceError:
            continue
        if z.real or abs(z.E) >= e_abs:
            continue
        for E in (z.E, z.partner):
            if not any(p == parity and abs(E - e) < 1e-8 for e, p in zeros):
                zeros.append((E, parity))
    return zeros


def test_g_zeros_match_oracle(verdict):
    t0 = time.perf_counter()
    parts = []
    ok = True
    for delta, g in ((0.5, 0.25), (2.5, 0.7)):
        zeros = g_zeros(ModelParams(delta, g))
        es = diagonalize(ModelParams(delta, g), SPACE)
        worst, wrong_parity = 0.0, 0
        for E, parity in zeros:
            k = int(np.argmin(np.abs(es.values - E)))
            worst = max(worst, abs(es.values[k] - E))
            wrong_parity += int(es.parity[k] != parity)
        ok &= bool(zeros) and worst < 1e-8 and wrong_parity == 0
        parts.append(f"({delta},{g}): {len(zeros)} zeros, max err {worst:.1e}, parity mismatches {wrong_parity}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    verdict(3, ok, "; ".join(parts) + f" (<1e-8), {elapsed:.1f}s (<60s)")
    assert ok


def test_exact_limits(verdict):
    delta = 0.7
    es = diagonalize(ModelParams(delta, 0.0), SPACE, audit=False)
    n = np.arange(SPACE.cutoff + 1)
    expected = np.sort(np.concatenate([n - delta / 2, n + delta / 2]))
    err_g0 = float(np.max(np.abs(np.sort(es.values.real) - expected)) + np.max(np.abs(es.values.imag)))

    es0 = diagonalize(ModelParams(0.0, 0.5), SPACE, audit=False)
    low = np.sort(es0.values.real)[:20]
    doubled = np.repeat(np.arange(10) + 0.25, 2)
    err_d0 = float(np.max(np.abs(low - doubled)) + np.max(np.abs(es0.values.imag[np.argsort(es0.values.real)[:20]])))

    ok = err_g0 < 1e-12 and err_d0 < 1e-10
    verdict(4, ok, f"g=0 max err {err_g0:.1e} (<1e-12), delta=0 lowest 20 max err {err_d0:.1e} (<1e-10)")
    assert ok


def closure_defect(values):
    """Largest distance from a conjugated eigenvalue to the spectrum."""
    values = np.asarray(values, dtype=complex)
    if len(values) == 0:
        return 0.0
    return float(max(np.min(np.abs(values - v.conjugate())) for v in values))


def test_symmetry_suite(verdict):
    rng = np.random.default_rng(20261018)
    params = ModelParams(DELTA, 0.7)
    conj_res = 0.0
    for E in rng.uniform(-2, 10, 100) + 1j * rng.uniform(-3, 3, 100):
        a, b = evaluate_G(params, E, order=0), evaluate_G(params, E.conjugate(), order=0)
        for parity in (1, -1):
            conj_res = max(conj_res, abs(a.value(parity).conjugate() - b.value(parity)) / max(1.0, a.scale))

    closure = 0.0
    for g in (0.2, 0.375, 0.5, 0.7, 1.2):
        es = diagonalize(ModelParams(DELTA, g), SPACE, audit=False)
        closure = max(closure, closure_defect(es.values))
    for point in assemble_spectrum(DELTA, [0.0, 0.3, 0.7, 1.0], levels=10, space=SPACE):
        closure = max(closure, closure_defect(point.values))

    comm = pt = 0.0
    pi = build_parity(SPACE)
    for delta, g in ((DELTA, 0.7), (0.5, 0.25), (1.0, 1.5)):
        h = build_hamiltonian(ModelParams(delta, g), SPACE)
        comm = max(comm, float(np.linalg.norm(h @ pi - pi @ h)))
        pt = max(pt, check_pt_symmetry(h))

    ok = conj_res < 1e-12 and closure < 1e-10 and comm < 1e-12 and pt < 1e-12
    verdict(5, ok, f"G conj {conj_res:.1e} (<1e-12), closure {closure:.1e} (<1e-10), "
                   f"[H,Pi] {comm:.1e} (<1e-12), PT {pt:.1e} (<1e-12)")
    assert ok


@pytest.fixture(scope="module")
def susceptibility_scans():
    grid = np.round(0.30 + 0.001 * np.arange(200), 6)
    t0 = time.perf_counter()
    g_star = locate_ep(DELTA, (0.43, 0.46), space=SPACE).g_star
    scans = {cutoff: fs_scan(DELTA, grid, [2, 3], FockSpace(cutoff)) for cutoff in (60, 120)}
    return grid, g_star, scans, time.perf_counter() - t0


def test_susceptibility_dichotomy(susceptibility_scans, verdict):
    grid, g_star, scans, elapsed = susceptibility_scans
    step = grid[1] - grid[0]
    peaks, dips = {}, {}
    ok = elapsed < 300
    for cutoff, out in scans.items():
        chi_cross = np.array([p.chi.real for p in out[2]])
        k = int(np.nanargmax(chi_cross))
        peaks[cutoff] = chi_cross[k]
        ok &= chi_cross[k] > 1e4 and abs(grid[k] - G_DEGENERATE) <= 2 * step + 1e-12
        chi_ep = np.array([p.chi.real for p in out[3]])
        k = int(np.nanargmin(chi_ep))
        dips[cutoff] = chi_ep[k]
        ok &= chi_ep[k] < -1e4 and abs(grid[k] - g_star) <= 2 * step + 1e-12
    grows = peaks[120] > peaks[60] and abs(dips[120]) > abs(dips[60])
    ok &= grows
    verdict(6, ok, f"peak {peaks[60]:.6e} -> {peaks[120]:.6e} (>1e4), dip {dips[60]:.6e} -> {dips[120]:.6e} "
                   f"(<-1e4) at g*={g_star:.6f}, both grow 60->120: {grows}, {elapsed:.0f}s (<300s)")
    assert ok


def test_c_product_self_orthogonality(verdict):
    g_star = locate_ep(DELTA, (0.60, 0.66), space=SPACE).g_star
    # grid step 1e-3: the grid point nearest the located coalescence
    nearest = round(g_star, 3)
    at_ep = abs(c_product(DELTA, 1, nearest, SPACE))
    weak = min(abs(c_product(DELTA, level, 0.05, SPACE)) for level in range(4))
    grid = np.round(np.arange(0.36, 0.39, 0.001), 6)
    mags = np.array([abs(p.c_product) for p in fs_scan(DELTA, grid, [2], SPACE)[2]])
    jumps = np.abs(np.diff(mags))
    k = int(np.argmax(jumps))
    jump_at_crossing = grid[k] <= G_DEGENERATE <= grid[k + 1]
    ok = at_ep < 0.05 and weak > 0.99 and jumps[k] > 0.1 and jump_at_crossing
    verdict(7, ok, f"|c| at g={nearest:.3f} (g*={g_star:.6f}) = {at_ep:.3e} (<0.05), "
                   f"min |c| of lowest 4 at g=0.05 = {weak:.6f} (>0.99), sorted-scan jump {jumps[k]:.3f} (>0.1) "
                   f"between g={grid[k]:.3f} and {grid[k + 1]:.3f}")
    assert ok


def test_derivative_correctness(verdict):
    rng = np.random.default_rng(7)
    worst_G = worst_rec = 0.0
    taken = 0
    while taken < 50:
        delta, g = rng.uniform(0.2, 3.0), rng.uniform(0.1, 1.2)
        E = complex(rng.uniform(-1.5, 6.0), rng.uniform(-1.0, 1.0))
        if min(abs(n + g * g - E) for n in range(12)) < 0.05:
            continue
        taken += 1
        params = ModelParams(delta, g)
        h = 1e-5 * (1 + abs(E))
        v = evaluate_G(params, E, order=1)
        up, dn = evaluate_G(params, E + h, order=0), evaluate_G(params, E - h, order=0)
        for parity in (1, -1):
            fd = (up.value(parity) - dn.value(parity)) / (2 * h)
            d = v.derivative(parity)
            worst_G = max(worst_G, abs(d - fd) / abs(d))
        t = compute_recursion(params, E, 25, order=1)
        tu, td = compute_recursion(params, E + h, 25), compute_recursion(params, E - h, 25)
        for exact, a, b in ((t.de, tu.e, td.e), (t.df, tu.f, td.f)):
            fd = (a - b) / (2 * h)
            worst_rec = max(worst_rec, float(np.max(np.abs(exact - fd)) / np.max(np.abs(exact))))
    ok = worst_G < 1e-6 and worst_rec < 1e-6
    verdict(8, ok, f"dG/dE rel err {worst_G:.1e}, recursion tables rel err {worst_rec:.1e} over 50 points (<1e-6)")
    assert ok


@pytest.mark.slow
def test_spectrum_determinism(tmp_path, verdict):
    paths = [tmp_path / "run1.csv", tmp_path / "run2.csv"]
    codes = []
    t0 = time.perf_counter()
    for path in paths:
        codes.append(main(["spectrum", "--delta", str(DELTA), "--g-min", "0", "--g-max", "1",
                           "--steps", "400", "--jobs", "8", "--out", str(path)]))
    elapsed = time.perf_counter() - t0
    a, b = (p.read_bytes() for p in paths)
    ok = a == b and len(a) > 0
    verdict(9, ok, f"{len(a)} bytes, identical={a == b}, exit codes {codes}, {elapsed:.0f}s for two runs")
    assert ok
