"""Biorthogonal diagnostics: generalized fidelity, its susceptibility, c-product.

With right/left eigenvectors R(g), L(g) of one level, the fidelity between
couplings g and g + eps is taken in the normalization-quotient form::

    F = <L(g)|R(g+eps)> <L(g+eps)|R(g)> / (<L(g)|R(g)> <L(g+eps)|R(g+eps)>)

which is unchanged by any rescaling of the four vectors, and
``chi = (1 - F) / eps**2``.  Near a crossing of two opposite-parity levels
followed by sorted index the state swaps, F drops to zero and chi jumps
positive; near a coalescence <L|R> vanishes and chi runs to large negative
values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from ptrabi._parallel import ordered_map
from ptrabi.errors import ConfigurationError, MatchingError, SelfOrthogonalityError
from ptrabi.model import FockSpace, ModelParams
from ptrabi.oracle import EigenPair, Eigensystem, diagonalize

EPS_DEFAULT = 1e-5
SELF_ORTHOGONAL = 1e-12
RICHARDSON_TOL = 0.05
TRACKING = ("sorted", "branch")


@dataclass(frozen=True)
class FidelityScanPoint:
    g: float
    branch_id: int
    fidelity: complex
    chi: complex
    epsilon_used: float
    c_product: complex
    # relative change of Re chi when eps is divided by ten; nan if not audited
    richardson: float = math.nan
    flag: str = ""


def _c(pair: EigenPair) -> complex:
    return complex(np.vdot(pair.left, pair.right))


def fidelity(at_g: EigenPair, at_g_eps: EigenPair) -> complex:
    """Fidelity between the same level at two neighbouring couplings.

    Raises
    ------
    SelfOrthogonalityError
        |<L|R>| of either pair (unit-norm vectors) is below 1e-12.
    """
    c0, c1 = _c(at_g), _c(at_g_eps)
    n0 = math.sqrt(np.vdot(at_g.left, at_g.left).real * np.vdot(at_g.right, at_g.right).real)
    n1 = math.sqrt(np.vdot(at_g_eps.left, at_g_eps.left).real
                   * np.vdot(at_g_eps.right, at_g_eps.right).real)
    if abs(c0) < SELF_ORTHOGONAL * n0 or abs(c1) < SELF_ORTHOGONAL * n1:
        raise SelfOrthogonalityError(
            f"self-orthogonal eigenpair: |<L|R>| = {min(abs(c0) / n0, abs(c1) / n1):.3g}"
        )
    cross = np.vdot(at_g.left, at_g_eps.right) * np.vdot(at_g_eps.left, at_g.right)
    return complex(cross / (c0 * c1))


def _match(es: Eigensystem, ref: EigenPair, tracking: str, level: int) -> EigenPair:
    if tracking == "sorted":
        return es[level]
    same = np.flatnonzero(es.parity == ref.parity)
    if len(same) == 0:
        raise MatchingError(f"no level of parity {ref.parity} to match")
    dist = np.abs(es.values[same] - ref.value)
    order = np.argsort(dist, kind="stable")
    if len(order) > 1 and dist[order[1]] - dist[order[0]] < 1e-12 * (1 + abs(ref.value)):
        raise MatchingError(f"ambiguous match for level at E={ref.value:.6g}")
    return es[int(same[order[0]])]


def _check(level, eps, tracking):
    if eps <= 0 or not math.isfinite(eps):
        raise ConfigurationError(f"eps must be positive, got {eps}")
    if tracking not in TRACKING:
        raise ConfigurationError(f"tracking must be one of {TRACKING}, got {tracking!r}")
    if level < 0:
        raise ConfigurationError(f"level index must be >= 0, got {level}")


def fidelity_at(
    delta: float,
    level: int,
    g: float,
    eps: float = EPS_DEFAULT,
    space: FockSpace | None = None,
    tracking: str = "branch",
) -> complex:
    """Fidelity of sorted level ``level`` between ``g`` and ``g + eps``.

    ``tracking="branch"`` follows the level to ``g + eps`` as the nearest
    eigenvalue of the same parity; ``"sorted"`` keeps the sorted index.
    """
    _check(level, eps, tracking)
    space = space or FockSpace()
    a = diagonalize(ModelParams(delta, g), space, audit=False)
    b = diagonalize(ModelParams(delta, g + eps), space, audit=False)
    return fidelity(a[level], _match(b, a[level], tracking, level))


def fidelity_susceptibility(
    delta: float,
    level: int,
    g: float,
    eps: float = EPS_DEFAULT,
    space: FockSpace | None = None,
    tracking: str = "branch",
) -> complex:
    """``(1 - F) / eps**2`` for sorted level ``level`` at coupling ``g``."""
    return (1 - fidelity_at(delta, level, g, eps, space, tracking)) / eps**2


def richardson_audit(delta, level, g, eps=EPS_DEFAULT, space=None, tracking="branch"):
    """Return ``(chi(eps), chi(eps/10), relative change of Re chi)``."""
    coarse = fidelity_susceptibility(delta, level, g, eps, space, tracking)
    fine = fidelity_susceptibility(delta, level, g, eps / 10, space, tracking)
    return coarse, fine, abs(fine.real - coarse.real) / max(abs(coarse.real), 1e-300)


def c_product(delta: float, level: int, g: float, space: FockSpace | None = None) -> complex:
    """<L|R> of sorted level ``level`` with unit-norm vectors; only its modulus is convention-free."""
    es = diagonalize(ModelParams(delta, g), space or FockSpace(), audit=False)
    return _c(es[level])


def _transport(prev, cur):
    if prev is None:
        return cur
    ov = np.vdot(prev, cur)
    return cur if ov == 0 else cur * (abs(ov) / ov)


class _PhaseTracker:
    """Fixes c-product phases along a scan.

    At the first point L is rotated so <L|R> is real and non-negative; after
    that each vector keeps the phase that makes its overlap with the previous
    point real and positive.
    """

    def __init__(self):
        self.left = self.right = None

    def __call__(self, pair: EigenPair) -> complex:
        right = _transport(self.right, pair.right)
        left = _transport(self.left, pair.left)
        if self.right is None:
            c = np.vdot(left, right)
            if c != 0:
                left = left * (c / abs(c))
        self.left, self.right = left, right
        return complex(np.vdot(left, right))


def _diag(g, delta, cutoff):
    return diagonalize(ModelParams(delta, g), FockSpace(cutoff), audit=False)


def _slim(es: Eigensystem, keep: int) -> Eigensystem:
    k = min(keep, len(es))
    return Eigensystem(es.params, es.space, es.values[:k + 8], es.right[:, :k + 8], es.left[:, :k + 8],
                       es.parity[:k + 8], es.converged[:k + 8], es.ambiguous[:k + 8])


def _diag_slim(g, delta, cutoff, keep):
    return _slim(_diag(g, delta, cutoff), keep)


def fs_scan(
    delta: float,
    g_grid,
    levels,
    space: FockSpace | None = None,
    eps: float | None = None,
    tracking: str = "sorted",
    audit: bool = False,
    jobs: int = 1,
) -> dict[int, list[FidelityScanPoint]]:
    """Fidelity susceptibility and c-product along a coupling grid.

    Parameters
    ----------
    levels : iterable of int
        Sorted level indices at the first grid point (1 = first excited).
    eps : float or None
        ``None`` compares each grid point with the next one, so ``eps`` is
        the local grid step and a crossing between two grid points always
        registers.  A number compares ``g`` with ``g + eps`` at every point.
    tracking : {"sorted", "branch"}
        ``"sorted"`` follows the sorted index; ``"branch"`` follows the
        nearest same-parity level from point to point.
    audit : bool
        With an explicit ``eps``, also evaluate at ``eps / 10`` and store the
        relative change of Re chi.

    Points where the pair is self-orthogonal are kept with NaN fidelity and
    ``flag="self-orthogonal"``.  Returns a dict keyed by the requested level.
    """
    grid = np.asarray(g_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise ConfigurationError("fs scan needs a strictly increasing grid of at least two points")
    levels = [int(k) for k in levels]
    for k in levels:
        _check(k, eps or 1.0, tracking)
    space = space or FockSpace()
    if max(levels) >= space.dim:
        raise ConfigurationError(f"level {max(levels)} does not exist at cutoff {space.cutoff}")
    keep = max(levels) + 1
    work = partial(_diag_slim, delta=delta, cutoff=space.cutoff, keep=keep)

    if eps is None:
        ext = np.append(grid, grid[-1] + (grid[-1] - grid[-2]))
        systems = ordered_map(work, ext.tolist(), jobs)
        base, shifted, fine = systems[:-1], systems[1:], None
        steps = np.diff(ext)
    else:
        base = ordered_map(work, grid.tolist(), jobs)
        shifted = ordered_map(work, (grid + eps).tolist(), jobs)
        fine = ordered_map(work, (grid + eps / 10).tolist(), jobs) if audit else None
        steps = np.full(len(grid), float(eps))

    out = {}
    for level in levels:
        phase = _PhaseTracker()
        points = []
        current = base[0][level]
        for k, g in enumerate(grid):
            if k > 0:
                current = _match(base[k], current, tracking, level)
            c = phase(current)
            flag = ""
            rich = math.nan
            try:
                other = _match(shifted[k], current, tracking, level)
                F = fidelity(current, other)
                chi = (1 - F) / steps[k] ** 2
                if fine is not None:
                    ffine = fidelity(current, _match(fine[k], current, tracking, level))
                    chi_fine = (1 - ffine) / (steps[k] / 10) ** 2
                    rich = abs(chi_fine.real - chi.real) / max(abs(chi.real), 1e-300)
            except SelfOrthogonalityError:
                F = chi = complex(math.nan, math.nan)
                flag = "self-orthogonal"
            except MatchingError:
                F = chi = complex(math.nan, math.nan)
                flag = "unmatched"
            points.append(FidelityScanPoint(
                g=float(g),
                branch_id=level,
                fidelity=F,
                chi=chi,
                epsilon_used=float(steps[k]),
                c_product=c,
                richardson=rich,
                flag=flag,
            ))
        out[level] = points
    return out
