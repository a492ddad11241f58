"""Spectra and spectral intersections from the zeros of the G-functions.

* real eigenvalues: sign changes of the real-valued G between pole lines;
* complex eigenvalues: damped Newton on the complex G with its analytic
  derivative (conjugate partners come for free);
* exceptional points: simultaneous zeros of G and dG/dE in the (E, g) plane;
* doubly degenerate points: zeros in g of f_n evaluated on pole line n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.optimize import brentq

from ptrabi._parallel import ordered_map
from ptrabi.errors import (
    ConfigurationError,
    NoConvergenceError,
    NoDegeneracyError,
    NoExceptionalPointError,
    PoleProximityError,
    PTRabiError,
    RefinementError,
    SeriesConvergenceError,
)
from ptrabi.gfunction import (
    N_MAX,
    POLE_GUARD,
    TOL_SERIES,
    evaluate_G,
    evaluate_G_grid,
    evaluate_G_precise,
    f_n_on_pole,
)
from ptrabi.model import FockSpace, ModelParams, decoupled_spectrum
from ptrabi.oracle import SpectrumRecord, diagonalize, lowest_levels, spectral_order

ZERO_TOL = 1e-12
BRACKET_TOL = 1e-12
EP_TOL = 1e-10
STEP_TOL = 1e-13
EP_WINDOW = 1e-4
EP_STEP_G = 1e-7
SAMPLES = 200
# relative margin for skipping a |G| minimum that cannot reach zero
HIDDEN_MARGIN = 0.25
DEGENERACY_SNAP = 1e-9
# samples are kept this far from a pole line, in units of the pole guard
POLE_MARGIN = 10.0


@dataclass(frozen=True)
class RealZero:
    E: float
    parity: int
    bracket: tuple[float, float]
    residual: float


@dataclass(frozen=True)
class ComplexZeroPair:
    """Zero of G with Im E > 0; its conjugate is a zero of the same G."""

    E: complex
    parity: int
    residual: float
    iterations: int
    # set when Newton landed on the real axis
    real: bool = False

    @property
    def partner(self) -> complex:
        return self.E.conjugate()


@dataclass(frozen=True)
class ExceptionalPoint:
    g_star: float
    E_star: float
    parity: int
    level_pair: tuple[int, int]
    residuals: tuple[float, float]
    second_derivative: float
    interval: int


@dataclass(frozen=True)
class DegeneratePoint:
    n: int
    g_n: float
    E_n: float
    f_n_residual: float


def _g(params, E, order, tol=TOL_SERIES, n_max=N_MAX):
    v = evaluate_G(params, E, tol=tol, n_max=n_max, order=order)
    if not v.converged:
        raise SeriesConvergenceError(
            f"G-series did not converge at E={E!r}, g={params.g} (tail {v.tail_estimate:.2e})", v
        )
    return v


def _poles_between(g, lo, hi):
    g2 = g * g
    first = max(0, math.ceil(lo - g2))
    out = []
    n = first
    while n + g2 <= hi:
        out.append(n)
        n += 1
    return out


def _interval_samples(a, b, a_pole, b_pole, samples):
    margin = POLE_MARGIN * POLE_GUARD
    lo = a + margin if a_pole else a
    hi = b - margin if b_pole else b
    if hi <= lo:
        return np.array([])
    pts = [np.linspace(lo, hi, samples)]
    offsets = 10.0 ** -np.arange(2, 8)
    if a_pole:
        pts.append(a + offsets)
    if b_pole:
        pts.append(b - offsets)
    xs = np.unique(np.concatenate(pts))
    return xs[(xs >= lo) & (xs <= hi)]


def _bisect(fun, a, b, fa, tol=BRACKET_TOL):
    while b - a > tol * max(1.0, abs(a)):
        m = 0.5 * (a + b)
        fm = fun(m)
        if fm == 0:
            return m, m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return a, b


def _refine_real(params, parity, a, b, tol, n_max):
    value = lambda x: _g(params, x, 0, tol, n_max).value(parity).real
    fa = value(a)
    lo, hi = _bisect(value, a, b, fa)
    E = 0.5 * (lo + hi)
    v = _g(params, E, 1, tol, n_max)
    best = abs(v.value(parity))
    # a Newton step or two squeezes the last digits out of the bracket
    for _ in range(2):
        d = v.derivative(parity).real
        if d == 0:
            break
        cand = E - v.value(parity).real / d
        if not (a < cand < b):
            break
        w = _g(params, cand, 1, tol, n_max)
        if abs(w.value(parity)) >= best:
            break
        E, v, best = cand, w, abs(w.value(parity))
    polished = _polish(params, complex(E), parity, v).real
    if polished != E and a <= polished <= b:
        E = polished
        best = abs(_g(params, E, 0, tol, n_max).value(parity))
    return RealZero(E=float(E), parity=parity, bracket=(float(a), float(b)), residual=float(best))


def _parabola_min(xs, vals, i):
    x0, x1, x2 = xs[i - 1], xs[i], xs[i + 1]
    y0, y1, y2 = vals[i - 1], vals[i], vals[i + 1]
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    curv = (d12 - d01) / (x2 - x0)
    if curv == 0:
        return y1
    slope = d01 + curv * (x1 - x0)
    return y1 - slope * slope / (4 * curv)


def _hidden_pair(params, parity, xs, vals, ders, i, tol, n_max):
    """Split a sample triple around a |G| minimum into two brackets if G dips through zero."""
    lo, hi = xs[i - 1], xs[i + 1]
    dlo, dhi = ders[i - 1], ders[i + 1]
    if dlo == 0 or dhi == 0 or (dlo > 0) == (dhi > 0):
        return []
    # a parabola through the samples is accurate to O(h^3); skip clear misses
    pred = _parabola_min(xs, vals, i)
    if (pred > 0) == (vals[i] > 0) and abs(pred) > HIDDEN_MARGIN * abs(vals[i]):
        return []
    side = vals[i] > 0
    a, b = lo, hi
    while b - a > BRACKET_TOL * max(1.0, abs(a)):
        m = 0.5 * (a + b)
        v = _g(params, m, 1, tol, n_max)
        gm = v.value(parity).real
        if gm == 0 or (gm > 0) != side:
            return [(lo, m), (m, hi)]
        if (v.derivative(parity).real > 0) == (dlo > 0):
            a = m
        else:
            b = m
    return []


def scan_real_zeros(
    params: ModelParams,
    E_min: float,
    E_max: float,
    samples: int = SAMPLES,
    tol: float = TOL_SERIES,
    n_max: int = N_MAX,
) -> list[RealZero]:
    """All real zeros of G_+ and G_- in ``[E_min, E_max]``, sorted by energy.

    The window is cut at every pole line.  Each piece is sampled on a uniform
    grid plus points packed geometrically toward the poles; sign changes give
    brackets, and local minima of |G| whose derivative changes sign are
    checked for a closely spaced pair of zeros hiding between two samples.
    Brackets are bisected to width 1e-12 and polished by Newton.

    An empty list is a valid answer (all eigenvalues in the window complex).
    """
    if not (math.isfinite(E_min) and math.isfinite(E_max)) or E_max < E_min:
        raise ConfigurationError(f"bad energy window [{E_min}, {E_max}]")
    g = params.g
    near = lambda x: [n + g * g for n in _poles_between(g, x - 2 * POLE_GUARD, x + 2 * POLE_GUARD)]
    lo_hit, hi_hit = near(E_min), near(E_max)
    cuts = [(lo_hit[0], True) if lo_hit else (E_min, False)]
    for n in _poles_between(g, E_min + 2 * POLE_GUARD, E_max - 2 * POLE_GUARD):
        cuts.append((n + g * g, True))
    cuts.append((hi_hit[0], True) if hi_hit else (E_max, False))

    zeros = []
    for (a, a_pole), (b, b_pole) in zip(cuts[:-1], cuts[1:]):
        xs = _interval_samples(a, b, a_pole, b_pole, samples)
        if len(xs) < 2:
            continue
        grid = evaluate_G_grid(params, xs, tol=tol, n_max=n_max, order=1)
        if not np.all(grid["converged"]):
            bad = xs[~grid["converged"]][0]
            raise SeriesConvergenceError(f"G-series did not converge at E={bad}, g={g}")
        for parity, key in ((1, "plus"), (-1, "minus")):
            vals = grid[key].real
            ders = grid["d" + key].real
            brackets = []
            for i in range(len(xs) - 1):
                if vals[i] == 0:
                    brackets.append((xs[i], xs[i]))
                elif vals[i] * vals[i + 1] < 0:
                    brackets.append((xs[i], xs[i + 1]))
            mags = np.abs(vals)
            for i in range(1, len(xs) - 1):
                same_side = vals[i - 1] * vals[i] > 0 and vals[i] * vals[i + 1] > 0
                if same_side and mags[i] <= mags[i - 1] and mags[i] <= mags[i + 1]:
                    brackets.extend(_hidden_pair(params, parity, xs, vals, ders, i, tol, n_max))
            for lo, hi in brackets:
                if lo == hi:
                    v = _g(params, lo, 0, tol, n_max)
                    zeros.append(RealZero(float(lo), parity, (lo, hi), abs(v.value(parity))))
                else:
                    zeros.append(_refine_real(params, parity, lo, hi, tol, n_max))
    zeros.sort(key=lambda z: (z.E, -z.parity))
    return zeros


def find_complex_zero(
    params: ModelParams,
    seed: complex,
    parity: int,
    max_iter: int = 100,
    tol: float = ZERO_TOL,
    series_tol: float = TOL_SERIES,
) -> ComplexZeroPair:
    """Damped Newton iteration for a zero of G_parity starting from ``seed``.

    Iteration stops once the Newton step is below ``STEP_TOL * (1 + |E|)``
    or |G| reaches the rounding floor of the sum; the result must then also
    satisfy ``|G| < tol * max(1, scale)``, ``scale`` being the largest term
    in the series.  |G| alone is not enough: dG/dE shrinks quickly with
    energy, so a tiny |G| can sit far from the zero.  The
    representative with ``Im E >= 0`` is returned.

    Raises
    ------
    NoConvergenceError
        After ``max_iter`` iterations, on stagnation above the tolerance,
        or when an iterate runs into a pole line.  ``trace`` lists iterates.
    """
    E = complex(seed)
    trace = [E]
    try:
        v = _g(params, E, 1, series_tol)
        for _ in range(max_iter):
            G = v.value(parity)
            dG = v.derivative(parity)
            # rounding floor of the partial sums; no iterate can do better
            if abs(G) <= 8 * np.finfo(float).eps * max(1.0, v.scale):
                break
            if dG == 0:
                raise NoConvergenceError("vanishing derivative", trace)
            step = G / dG
            lam = 1.0
            while True:
                cand = E - lam * step
                w = _g(params, cand, 1, series_tol)
                if abs(w.value(parity)) < abs(G) or lam < 1e-6:
                    break
                lam *= 0.5
            E, v = cand, w
            trace.append(E)
            if abs(lam * step) < STEP_TOL * (1 + abs(E)):
                break
        else:
            raise NoConvergenceError(f"no convergence after {max_iter} iterations", trace)
        if abs(v.value(parity)) >= tol * max(1.0, v.scale):
            raise NoConvergenceError(f"Newton stagnated at |G|={abs(v.value(parity)):.3g}", trace)
    except PoleProximityError as exc:
        raise NoConvergenceError(f"iterate entered a pole guard: {exc}", trace) from exc
    polished = _polish(params, E, parity, v)
    if polished != E:
        E, v = polished, _g(params, polished, 1, series_tol)
    residual = abs(v.value(parity))
    if E.imag < 0:
        E = E.conjugate()
    return ComplexZeroPair(E=E, parity=parity, residual=float(residual),
                           iterations=len(trace) - 1, real=abs(E.imag) < 1e-10)


def _polish(params, E, parity, v, max_iter=8):
    """Extra Newton steps in extended precision when rounding in G limits the zero."""
    eps = np.finfo(float).eps
    if eps * v.scale <= STEP_TOL * (1 + abs(E)) * abs(v.derivative(parity)):
        return E
    for _ in range(max_iter):
        w = evaluate_G_precise(params, E)
        if not w.converged or w.derivative(parity) == 0:
            break
        step = w.value(parity) / w.derivative(parity)
        E = E - step
        if abs(step) < 4 * eps * (1 + abs(E)):
            break
    return E


def seed_complex_grid(params: ModelParams, re_range, im_range, n_re: int = 60, n_im: int = 30):
    """Seeds for complex zeros without an oracle.

    G is sampled on a rectangular grid in the upper half plane; every cell
    whose four corners show sign changes of both Re G and Im G yields its
    centre as a seed.  Returns a list of ``(seed, parity)``.
    """
    re = np.linspace(*re_range, n_re + 1)
    im = np.linspace(*im_range, n_im + 1)
    E = re[None, :] + 1j * im[:, None]
    grid = evaluate_G_grid(params, E, order=0)
    seeds = []
    for parity, key in ((1, "plus"), (-1, "minus")):
        G = grid[key]
        for i in range(n_im):
            for j in range(n_re):
                corners = np.array([G[i, j], G[i, j + 1], G[i + 1, j], G[i + 1, j + 1]])
                if not np.all(np.isfinite(corners)):
                    continue
                sr = np.sign(corners.real)
                si = np.sign(corners.imag)
                if sr.min() < sr.max() and si.min() < si.max():
                    seeds.append((complex(0.5 * (re[j] + re[j + 1]), 0.5 * (im[i] + im[i + 1])), parity))
    return seeds


def _dedupe(zeros, tol=1e-8):
    out = []
    for z in zeros:
        if not any(z.parity == o.parity and abs(z.E - o.E) < tol * (1 + abs(z.E)) for o in out):
            out.append(z)
    return out


def _interval_window(g, m, e_floor):
    lo = e_floor if m == 0 else m - 1 + g * g
    return lo, m + g * g


def _real_zeros(params, window, parity, samples):
    return [z.E for z in scan_real_zeros(params, *window, samples=samples) if z.parity == parity]


def _strip_of(g, E):
    return max(0, math.ceil(E - g * g))


def locate_ep(
    delta: float,
    window: tuple[float, float],
    parity: int | None = None,
    interval: int | None = None,
    samples: int = SAMPLES,
    space: FockSpace | None = None,
    max_intervals: int = 12,
) -> ExceptionalPoint:
    """Refine the exceptional point inside a coupling window.

    Stage one bisects on ``g`` with the number of real zeros of one parity
    inside one inter-pole interval as the predicate (a pair of zeros is
    created or destroyed at the EP) until the window is narrower than 1e-4.
    Stage two runs Newton on ``(G, dG/dE) = 0`` in the ``(E, g)`` plane, with
    the E-derivatives analytic and the g-derivatives from central
    differences.

    Zeros are counted over all energies up to pole line ``max_intervals``,
    or only inside strip ``interval`` when given (strip ``m`` lies between
    pole lines ``m - 1`` and ``m``; strip 0 is everything below the first
    pole).  A zero crossing a pole line leaves the total unchanged, so only
    pair creation or annihilation moves the predicate.  When ``parity`` is
    omitted the first parity whose count changes by two is used.

    Raises
    ------
    NoExceptionalPointError
        The real-zero count of no parity changes by two across the window.
    RefinementError
        Newton stagnated; ``bracket`` holds the stage-one window.
    """
    g_lo, g_hi = map(float, window)
    if not 0 < g_lo < g_hi:
        raise ConfigurationError(f"bad coupling window {window}")
    e_floor = -abs(delta) / 2 - 1 - 4 * g_hi * g_hi
    if interval is not None:
        e_window = lambda g: _interval_window(g, interval, e_floor)
    else:
        e_window = lambda g: (e_floor, max_intervals + g * g)
    count = lambda g, p: len(_real_zeros(ModelParams(delta, g), e_window(g), p, samples))

    choice = None
    for p in ((parity,) if parity is not None else (1, -1)):
        a, b = count(g_lo, p), count(g_hi, p)
        if abs(a - b) == 2:
            choice = (p, a, b)
            break
    if choice is None:
        raise NoExceptionalPointError(
            f"no pair of real zeros is created or destroyed between g={g_lo} and g={g_hi}"
        )
    parity, count_lo, count_hi = choice

    lo, hi = g_lo, g_hi
    while hi - lo > EP_WINDOW:
        mid = 0.5 * (lo + hi)
        if count(mid, parity) == count_lo:
            lo = mid
        else:
            hi = mid
    pair_side = lo if count_lo > count_hi else hi
    zs = _real_zeros(ModelParams(delta, pair_side), e_window(pair_side), parity, samples)
    if len(zs) < 2:
        raise RefinementError("lost the zero pair after bisection", bracket=(lo, hi))
    k = int(np.argmin(np.diff(zs)))
    pair = zs[k], zs[k + 1]

    E, g = 0.5 * (pair[0] + pair[1]), pair_side
    trace = [(E, g)]

    def system(E, g):
        v = _g(ModelParams(delta, g), E, 2)
        return v.value(parity).real, v.derivative(parity).real, v.derivative(parity, 2).real

    def g_partials(E, g):
        h = EP_STEP_G
        vp = _g(ModelParams(delta, g + h), E, 1)
        vm = _g(ModelParams(delta, g - h), E, 1)
        return ((vp.value(parity) - vm.value(parity)).real / (2 * h),
                (vp.derivative(parity) - vm.derivative(parity)).real / (2 * h))

    try:
        G, GE, GEE = system(E, g)
        for _ in range(60):
            if abs(G) < EP_TOL and abs(GE) < EP_TOL:
                break
            Gg, GEg = g_partials(E, g)
            jac = np.array([[GE, Gg], [GEE, GEg]])
            try:
                dE, dg = np.linalg.solve(jac, [-G, -GE])
            except np.linalg.LinAlgError as exc:
                raise RefinementError("singular Jacobian", bracket=(lo, hi), trace=trace) from exc
            lam = 1.0
            norm0 = math.hypot(G, GE)
            while True:
                cand = (E + lam * dE, g + lam * dg)
                if cand[1] > 0:
                    out = system(*cand)
                    if math.hypot(out[0], out[1]) < norm0 or lam < 1e-4:
                        break
                lam *= 0.5
                if lam < 1e-6:
                    raise RefinementError("line search failed", bracket=(lo, hi), trace=trace)
            (E, g), (G, GE, GEE) = cand, out
            trace.append((E, g))
        else:
            raise RefinementError("Newton did not converge", bracket=(lo, hi), trace=trace)
    except (PoleProximityError, SeriesConvergenceError) as exc:
        raise RefinementError(str(exc), bracket=(lo, hi), trace=trace) from exc

    level_pair = _ep_level_pair(delta, g, E, parity, pair_side < g, space or FockSpace())
    return ExceptionalPoint(
        g_star=float(g),
        E_star=float(E),
        parity=parity,
        level_pair=level_pair,
        residuals=(abs(G), abs(GE)),
        second_derivative=abs(GEE),
        interval=_strip_of(g, E),
    )


def _ep_level_pair(delta, g_star, E_star, parity, below, space):
    """Sorted-spectrum indices of the two levels meeting at the EP, read just on the real side."""
    g_side = g_star - 1e-5 if below else g_star + 1e-5
    es = diagonalize(ModelParams(delta, g_side), space, audit=False)
    cand = np.flatnonzero(es.parity == parity)
    dist = np.abs(es.values[cand] - E_star)
    pick = np.sort(cand[np.argsort(dist, kind="stable")[:2]])
    return int(pick[0]), int(pick[1])


def _f_on_pole(delta, n, g):
    return f_n_on_pole(ModelParams(delta, g), n)


def degenerate_points(delta: float, n: int, g_range=(1e-3, 3.0), samples: int = 3000):
    """Every doubly degenerate point on pole line ``n`` with ``g`` inside ``g_range``."""
    if n < 1:
        raise ConfigurationError(f"pole index must be >= 1, got {n}")
    gs = np.linspace(g_range[0], g_range[1], samples)
    fs = np.array([_f_on_pole(delta, n, g) for g in gs])
    out = []
    for i in range(len(gs) - 1):
        if fs[i] == 0:
            root = gs[i]
        elif fs[i] * fs[i + 1] < 0:
            root = brentq(lambda g: _f_on_pole(delta, n, g), gs[i], gs[i + 1],
                          xtol=BRACKET_TOL * 0.1, rtol=4 * np.finfo(float).eps, maxiter=200)
        else:
            continue
        out.append(DegeneratePoint(n=n, g_n=float(root), E_n=float(n + root * root),
                                   f_n_residual=abs(_f_on_pole(delta, n, root))))
    return out


def locate_degenerate(delta: float, n: int, g_range=(1e-3, 3.0)) -> DegeneratePoint:
    """Smallest-coupling doubly degenerate point on pole line ``n``.

    Raises
    ------
    NoDegeneracyError
        f_n never changes sign on the line inside ``g_range`` (for ``n = 1``
        this is the case whenever ``delta < 2``).
    """
    found = degenerate_points(delta, n, g_range)
    if not found:
        raise NoDegeneracyError(f"no degenerate point on pole line {n} for g in {g_range}")
    return found[0]


@dataclass
class AssembledPoint(SpectrumRecord):
    failures: list[str] = field(default_factory=list)


def default_window(delta, g, levels):
    return -abs(delta) / 2 - 1 - 4 * g * g, 0.5 * levels + 1.5 + g * g


def _assemble_point(g, delta, e_window, levels, space_cutoff, seed, degeneracies=()):
    failures = []
    if g == 0:
        vals, par = decoupled_spectrum(delta, levels)
        return AssembledPoint(g=0.0, values=vals.astype(complex), parity=par,
                              branch_id=np.full(len(vals), -1), provenance=["closed-form"] * len(vals))
    params = ModelParams(delta, g)
    seeds = []
    if seed == "oracle":
        es = diagonalize(params, FockSpace(space_cutoff), audit=False)
        keep = lowest_levels(es.values, levels)
        ref = es.values[keep]
        window = e_window or (ref.real.min() - 0.5, ref.real.max() + 0.5)
        seeds = [(v, int(p)) for v, p in zip(ref, es.parity[keep]) if v.imag > 1e-6]
    elif seed == "grid":
        window = e_window or default_window(delta, g, levels)
        seeds = seed_complex_grid(params, window, (1e-3, 0.5 * levels + 2))
    else:
        raise ConfigurationError(f"unknown seed source {seed!r}")

    values, parity = [], []
    try:
        for z in scan_real_zeros(params, *window):
            values.append(complex(z.E))
            parity.append(z.parity)
    except PTRabiError as exc:
        failures.append(f"real scan: {exc}")
    found = []
    for s, p in seeds:
        try:
            z = find_complex_zero(params, s, p)
        except PTRabiError as exc:
            failures.append(f"complex seed {s!r}: {exc}")
            continue
        if not z.real:
            found.append(z)
    for z in _dedupe(found):
        values += [z.E.conjugate(), z.E]
        parity += [z.parity, z.parity]
    provenance = ["G-zero"] * len(values)
    # both members of a degenerate pair sit on a pole line, invisible to G
    for d in degeneracies:
        if abs(g - d.g_n) < DEGENERACY_SNAP and window[0] <= d.E_n <= window[1]:
            values += [complex(d.E_n)] * 2
            parity += [1, -1]
            provenance += ["injected-degeneracy"] * 2
    values = np.array(values, complex)
    parity = np.array(parity, int)
    order = spectral_order(values, parity)
    values, parity = values[order], parity[order]
    provenance = [provenance[i] for i in order]
    keep = lowest_levels(values, levels)
    return AssembledPoint(g=float(g), values=values[keep], parity=parity[keep],
                          branch_id=np.full(len(keep), -1), provenance=[provenance[i] for i in keep],
                          failures=failures)


def assemble_spectrum(
    delta: float,
    g_grid,
    e_window: tuple[float, float] | None = None,
    levels: int = 8,
    space: FockSpace | None = None,
    seed: str = "oracle",
    jobs: int = 1,
) -> list[AssembledPoint]:
    """G-function spectrum along a coupling grid.

    At each ``g`` the real zeros of both G-functions in the energy window are
    collected, and complex zeros are found by Newton from seeds: the oracle's
    complex eigenvalues (``seed="oracle"``) or sign-structure cells of G
    (``seed="grid"``).  ``g = 0`` uses the decoupled closed form.  Grid
    points within 1e-9 of a doubly degenerate coupling get the degenerate
    pair injected on the pole line, since G has a pole there.  Failures
    at a grid point are recorded on that point and do not stop the sweep.
    """
    grid = np.asarray(g_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0 or np.any(np.diff(grid) <= 0) or np.any(grid < 0):
        raise ConfigurationError("g grid must be non-negative and strictly increasing")
    degeneracies = []
    top = (e_window[1] if e_window else 0.5 * levels + 2) + grid[-1] ** 2
    if grid[-1] > 0:
        for n in range(1, int(top) + 1):
            degeneracies += degenerate_points(delta, n, (max(grid[0], 1e-3), grid[-1] + 1e-9), samples=400)
    work = partial(_assemble_point, delta=delta, e_window=e_window, levels=levels,
                   space_cutoff=(space or FockSpace()).cutoff, seed=seed, degeneracies=tuple(degeneracies))
    return ordered_map(work, grid.tolist(), jobs)
