"""Coefficient recursion and the parity-resolved G-functions.

For a trial energy ``E`` the coefficients of the similarity-transformed
eigenstate obey, with ``c = delta/2`` and ``f_0 = 1``, ``f_{-1} = 0``::

    e_n     = c f_n / (n + g^2 - E)
    f_{n+1} = [-c e_n + (n - 3 g^2 - E) f_n] / (2 g (n + 1)) + f_{n-1} / (n + 1)

and the regular spectrum is the zero set of ``G_pm(E) = sum_n (e_n -+ f_n) g^n``.
``G_+`` belongs to Pi parity +1 and ``G_-`` to Pi parity -1.

Energy derivatives are obtained by differentiating the recursion itself,
so they are as accurate as the G values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from numpy.typing import NDArray

from ptrabi.errors import PoleProximityError, UnsupportedParameterError
from ptrabi.model import ModelParams

TOL_SERIES = 1e-14
N_MAX = 2000
POLE_GUARD = 1e-8
# consecutive small terms required before the series is declared converged
STOP_RUN = 5


@dataclass(frozen=True)
class PoleLine:
    n: int

    def energy(self, g: float) -> float:
        return self.n + g * g


def pole_energy(n: int, params: ModelParams) -> float:
    """Energy ``n + g**2`` of the ``n``-th pole line."""
    if n < 0:
        raise ValueError(f"pole index must be non-negative, got {n}")
    return PoleLine(n).energy(params.g)


def nearest_pole(E: complex, g: float) -> tuple[int, float]:
    """Index of the pole line closest to ``E`` and the distance to it."""
    n = max(0, int(round(E.real - g * g)))
    return n, abs(E - (n + g * g))


@dataclass
class RecursionTable:
    """Coefficients ``e_n``, ``f_n`` for ``n = 0..n_used`` at one trial energy.

    ``de``/``df`` (and ``d2e``/``d2f``) are the first (second) energy
    derivatives when requested, ``None`` otherwise.
    """

    E: complex
    e: NDArray[np.complex128]
    f: NDArray[np.complex128]
    de: NDArray[np.complex128] | None = None
    df: NDArray[np.complex128] | None = None
    d2e: NDArray[np.complex128] | None = None
    d2f: NDArray[np.complex128] | None = None

    @property
    def n_used(self) -> int:
        return len(self.e) - 1


@dataclass(frozen=True)
class GValue:
    g_plus: complex
    g_minus: complex
    dg_plus_dE: complex | None
    dg_minus_dE: complex | None
    d2g_plus_dE2: complex | None
    d2g_minus_dE2: complex | None
    converged: bool
    n_used: int
    tail_estimate: float
    # largest |term| met in the sum; sets the rounding floor of |G|
    scale: float

    def value(self, parity: int) -> complex:
        return self.g_plus if parity > 0 else self.g_minus

    def derivative(self, parity: int, order: int = 1) -> complex:
        if order == 1:
            d = self.dg_plus_dE if parity > 0 else self.dg_minus_dE
        elif order == 2:
            d = self.d2g_plus_dE2 if parity > 0 else self.d2g_minus_dE2
        else:
            raise ValueError("order must be 1 or 2")
        if d is None:
            raise ValueError(f"derivative of order {order} was not computed")
        return d


def _check_g(params):
    if params.g == 0:
        raise UnsupportedParameterError(
            "the recursion divides by 2g; use the decoupled spectrum at g = 0"
        )


def _coefficients(params, E, order):
    """Yield ``(n, e, f, de, df, d2e, d2f)`` for n = 0, 1, 2, ... indefinitely."""
    c = 0.5 * params.delta
    g = params.g
    g2 = g * g
    E = complex(E)
    f_prev, f = 0j, 1 + 0j
    df_prev, df = 0j, 0j
    d2f_prev, d2f = 0j, 0j
    n = 0
    while True:
        d = n + g2 - E
        if abs(d) < POLE_GUARD:
            raise PoleProximityError(n, E, abs(d))
        e = c * f / d
        de = d2e = 0j
        if order >= 1:
            de = c * df / d + c * f / (d * d)
        if order >= 2:
            d2e = c * d2f / d + 2 * c * df / (d * d) + 2 * c * f / (d * d * d)
        yield n, e, f, de, df, d2e, d2f
        a = n - 3 * g2 - E
        denom = 2 * g * (n + 1)
        f_next = (-c * e + a * f) / denom + f_prev / (n + 1)
        if order >= 1:
            df_next = (-c * de + a * df - f) / denom + df_prev / (n + 1)
        if order >= 2:
            d2f_next = (-c * d2e + a * d2f - 2 * df) / denom + d2f_prev / (n + 1)
            d2f_prev, d2f = d2f, d2f_next
        if order >= 1:
            df_prev, df = df, df_next
        f_prev, f = f, f_next
        n += 1


def compute_recursion(params: ModelParams, E: complex, n_max: int, order: int = 0) -> RecursionTable:
    """Tabulate ``e_n``, ``f_n`` for ``n = 0..n_max``.

    Parameters
    ----------
    params : ModelParams
        Requires ``g > 0``.
    E : complex
        Trial energy.  Must stay ``POLE_GUARD`` away from every pole ``n + g**2``
        with ``n <= n_max``.
    n_max : int
        Last index tabulated.
    order : {0, 1, 2}
        Number of energy derivatives to tabulate alongside.

    Raises
    ------
    PoleProximityError
        ``E`` is inside the guard band of a pole.
    UnsupportedParameterError
        ``g == 0``.
    """
    _check_g(params)
    rows = []
    for row in _coefficients(params, E, order):
        rows.append(row[1:])
        if row[0] >= n_max:
            break
    cols = np.array(rows, dtype=complex).T
    return RecursionTable(
        E=complex(E),
        e=cols[0],
        f=cols[1],
        de=cols[2] if order >= 1 else None,
        df=cols[3] if order >= 1 else None,
        d2e=cols[4] if order >= 2 else None,
        d2f=cols[5] if order >= 2 else None,
    )


def evaluate_G(
    params: ModelParams,
    E: complex,
    tol: float = TOL_SERIES,
    n_max: int = N_MAX,
    order: int = 1,
) -> GValue:
    """Sum both G-functions (and ``order`` energy derivatives) at ``E``.

    Summation stops once ``STOP_RUN`` consecutive terms of every tracked sum
    are below ``tol * (1 + |partial sum|)``, and not before ``n`` passes
    ``|E|`` (the coefficients are transient until then).  Hitting ``n_max``,
    or overflow, returns ``converged=False`` instead of raising.
    """
    _check_g(params)
    g = params.g
    E = complex(E)
    n_min = int(abs(E)) + STOP_RUN
    active = 2 * (order + 1)
    sums = [0j] * active
    gn = 1.0
    run = 0
    scale = 0.0
    recent = []
    converged = False
    n = 0
    for n, e, f, de, df, d2e, d2f in _coefficients(params, E, order):
        terms = [(e - f) * gn, (e + f) * gn, (de - df) * gn, (de + df) * gn,
                 (d2e - d2f) * gn, (d2e + d2f) * gn][:active]
        rel = 0.0
        finite = True
        for i, t in enumerate(terms):
            sums[i] += t
            finite = finite and math.isfinite(abs(t))
            rel = max(rel, abs(t) / (1.0 + abs(sums[i])))
        if not finite:
            recent = [math.inf]
            break
        scale = max(scale, abs(terms[0]), abs(terms[1]))
        recent = (recent + [rel])[-STOP_RUN:]
        run = run + 1 if rel < tol else 0
        if run >= STOP_RUN and n >= n_min:
            converged = True
            break
        if n >= n_max:
            break
        gn *= g
    sums += [None] * (6 - active)
    return GValue(
        g_plus=sums[0],
        g_minus=sums[1],
        dg_plus_dE=sums[2],
        dg_minus_dE=sums[3],
        d2g_plus_dE2=sums[4],
        d2g_minus_dE2=sums[5],
        converged=converged,
        n_used=n,
        tail_estimate=max(recent) if recent else math.inf,
        scale=float(scale),
    )


def evaluate_G_precise(params: ModelParams, E: complex, dps: int = 40, n_max: int = N_MAX) -> GValue:
    """:func:`evaluate_G` (first derivative included) in ``dps``-digit arithmetic.

    The sum cancels terms of size ``scale`` down to |G|, so double precision
    limits a zero to about ``eps * scale / |dG/dE|``; this version removes
    that floor for polishing.  Results are rounded back to complex doubles.
    """
    _check_g(params)
    with mpmath.workdps(dps):
        c = mpmath.mpf(params.delta) / 2
        g = mpmath.mpf(params.g)
        g2 = g * g
        E = mpmath.mpc(complex(E))
        tol = mpmath.mpf(10) ** (-(dps - 5))
        n_min = int(abs(complex(E))) + STOP_RUN
        f_prev, f, df_prev, df = mpmath.mpc(0), mpmath.mpc(1), mpmath.mpc(0), mpmath.mpc(0)
        sums = [mpmath.mpc(0)] * 4
        gn = mpmath.mpf(1)
        scale = 0.0
        run = 0
        converged = False
        for n in range(n_max + 1):
            d = n + g2 - E
            if abs(d) < POLE_GUARD:
                raise PoleProximityError(n, complex(E), float(abs(d)))
            e = c * f / d
            de = c * df / d + c * f / (d * d)
            terms = [(e - f) * gn, (e + f) * gn, (de - df) * gn, (de + df) * gn]
            rel = 0
            for i, t in enumerate(terms):
                sums[i] += t
                rel = max(rel, abs(t) / (1 + abs(sums[i])))
            scale = max(scale, float(abs(terms[0])), float(abs(terms[1])))
            run = run + 1 if rel < tol else 0
            if run >= STOP_RUN and n >= n_min:
                converged = True
                break
            a = n - 3 * g2 - E
            denom = 2 * g * (n + 1)
            f_next = (-c * e + a * f) / denom + f_prev / (n + 1)
            df_next = (-c * de + a * df - f) / denom + df_prev / (n + 1)
            f_prev, f, df_prev, df = f, f_next, df, df_next
            gn *= g
        out = [complex(x) for x in sums]
    return GValue(out[0], out[1], out[2], out[3], None, None, converged, n, float(rel), scale)


def evaluate_G_grid(
    params: ModelParams,
    energies,
    tol: float = TOL_SERIES,
    n_max: int = N_MAX,
    order: int = 0,
):
    """Vectorised :func:`evaluate_G` over an array of energies.

    Returns a dict of arrays: ``plus``, ``minus`` (and ``dplus``, ``dminus``
    when ``order >= 1``), a boolean ``converged`` mask and a boolean ``pole``
    mask.  Entries inside a pole guard or not converged are NaN.
    """
    _check_g(params)
    if order > 1:
        raise ValueError("grid evaluation supports order 0 or 1")
    E = np.asarray(energies, dtype=complex)
    shape = E.shape
    E = E.ravel()
    c = 0.5 * params.delta
    g = params.g
    g2 = g * g

    pole = np.zeros(E.shape, bool)
    live = np.ones(E.shape, bool)
    done = np.zeros(E.shape, bool)
    run = np.zeros(E.shape, int)
    n_min = np.abs(E).astype(int) + STOP_RUN

    nsum = 2 * (order + 1)
    sums = np.zeros((nsum,) + E.shape, complex)
    f_prev = np.zeros_like(E)
    f = np.ones_like(E)
    df_prev = np.zeros_like(E)
    df = np.zeros_like(E)
    gn = 1.0
    with np.errstate(all="ignore"):
        for n in range(n_max + 1):
            d = n + g2 - E
            near = np.abs(d) < POLE_GUARD
            pole |= near & live
            live &= ~near
            d = np.where(near, 1.0, d)
            e = c * f / d
            terms = [(e - f) * gn, (e + f) * gn]
            if order:
                de = c * df / d + c * f / (d * d)
                terms += [(de - df) * gn, (de + df) * gn]
            terms = np.array(terms)
            step = live & ~done
            sums[:, step] += terms[:, step]
            mags = np.abs(terms)
            finite = np.all(np.isfinite(mags), axis=0)
            live &= finite | done
            rel = np.max(mags / (1.0 + np.abs(sums)), axis=0)
            run = np.where(rel < tol, run + 1, 0)
            done |= live & (run >= STOP_RUN) & (n >= n_min)
            if np.all(done | ~live):
                break
            a = n - 3 * g2 - E
            denom = 2 * g * (n + 1)
            f_next = (-c * e + a * f) / denom + f_prev / (n + 1)
            if order:
                df_next = (-c * de + a * df - f) / denom + df_prev / (n + 1)
                df_prev, df = df, df_next
            f_prev, f = f, f_next
            gn *= g
    ok = done & live
    sums[:, ~ok] = np.nan
    out = {
        "plus": sums[0].reshape(shape),
        "minus": sums[1].reshape(shape),
        "converged": ok.reshape(shape),
        "pole": pole.reshape(shape),
    }
    if order:
        out["dplus"] = sums[2].reshape(shape)
        out["dminus"] = sums[3].reshape(shape)
    return out


def f_n_on_pole(params: ModelParams, n: int) -> float:
    """``f_n`` with the energy pinned to pole line ``n`` (E = n + g**2).

    ``e_n`` stays finite on the pole only if this vanishes; its real zeros in
    ``g`` are the doubly degenerate points on that line.
    """
    if n < 1:
        raise ValueError(f"pole index must be >= 1, got {n}")
    _check_g(params)
    c = 0.5 * params.delta
    g = params.g
    g2 = g * g
    E = n + g2
    f_prev, f = 0.0, 1.0
    for k in range(n):
        e = c * f / (k + g2 - E)
        f_prev, f = f, (-c * e + (k - 3 * g2 - E) * f) / (2 * g * (k + 1)) + f_prev / (k + 1)
    return f
