"""Dense diagonalization of the truncated Hamiltonian: the independent reference.

Everything the G-function route produces is checked against this module.
Eigenpairs come with right and left eigenvectors (each of unit Euclidean
norm), a Pi parity label and a cutoff-convergence flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np
import scipy.linalg as sla
from numpy.typing import NDArray
from scipy.optimize import linear_sum_assignment
from scipy.special import gammaln

from ptrabi._parallel import ordered_map
from ptrabi.errors import ConfigurationError, EigensolverError, ReconstructionRangeError
from ptrabi.gfunction import RecursionTable, compute_recursion
from ptrabi.model import (
    SECTORS,
    FockSpace,
    ModelParams,
    build_displacement,
    build_hamiltonian,
    build_parity,
    build_sector_hamiltonian,
    sector_basis,
)

AUDIT_EXTRA = 20
AUDIT_TOL = 1e-10
PARITY_THRESHOLD = 0.99
AMBIGUITY_TOL = 1e-12
# eigenvalues whose real parts agree this closely are ordered by imaginary part
SORT_TOL = 1e-9
REAL_TOL = 1e-6
MAX_OPTIMAL_ASSIGNMENT = 64
REGROWTH = 1e3
DECAY_FLOOR = 1e-6

PROVENANCE = ("oracle", "G-zero", "closed-form", "injected-degeneracy", "ep")


@dataclass(frozen=True)
class EigenPair:
    value: complex
    right: NDArray[np.complex128]
    left: NDArray[np.complex128]
    parity: int
    cutoff_converged: bool
    ambiguous: bool = False

    @property
    def c_product(self) -> complex:
        return complex(np.vdot(self.left, self.right))


@dataclass
class Eigensystem:
    """All eigenpairs at one parameter point, ordered by (Re, Im).

    Columns of ``right``/``left`` are vectors in the bare basis.  Indexing
    returns :class:`EigenPair` objects.
    """

    params: ModelParams
    space: FockSpace
    values: NDArray[np.complex128]
    right: NDArray[np.complex128]
    left: NDArray[np.complex128]
    parity: NDArray[np.int_]
    converged: NDArray[np.bool_]
    ambiguous: NDArray[np.bool_]

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k) -> EigenPair:
        return EigenPair(
            value=complex(self.values[k]),
            right=self.right[:, k],
            left=self.left[:, k],
            parity=int(self.parity[k]),
            cutoff_converged=bool(self.converged[k]),
            ambiguous=bool(self.ambiguous[k]),
        )

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    def c_products(self) -> NDArray[np.complex128]:
        return np.einsum("ij,ij->j", self.left.conj(), self.right)

    def residual(self) -> float:
        """Largest right/left eigen-equation residual over all pairs."""
        h = build_hamiltonian(self.params, self.space)
        r = h @ self.right - self.right * self.values
        l = self.left.conj().T @ h - self.values[:, None] * self.left.conj().T
        return float(max(np.linalg.norm(r, axis=0).max(), np.linalg.norm(l, axis=1).max()))


def spectral_order(values, parity=None, tol: float = SORT_TOL) -> NDArray[np.int_]:
    """Permutation sorting eigenvalues by real part, then imaginary part.

    Real parts closer than ``tol`` are treated as equal so that conjugate
    partners always come out as (-Im, +Im); remaining ties go to the +1
    parity first.
    """
    values = np.asarray(values)
    if parity is None:
        parity = np.zeros(len(values), int)
    order = np.argsort(values.real, kind="stable")
    out = []
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and values.real[order[j]] - values.real[order[j - 1]] < tol * (
            1 + abs(values.real[order[j]])
        ):
            j += 1
        group = order[i:j]
        if len(group) > 1:
            im = values.imag[group]
            im = np.where(np.abs(im) < 1e-12, 0.0, im)
            group = group[np.lexsort((-np.asarray(parity)[group], im))]
        out.extend(group)
        i = j
    return np.array(out, dtype=int)


def parity_label(pair, parity_op: NDArray) -> int:
    """+1 / -1 if the right vector is a Pi eigenvector to within 1 %, else 0 (mixed)."""
    r = pair.right if isinstance(pair, EigenPair) else np.asarray(pair)
    r = r / np.linalg.norm(r)
    x = float(np.vdot(r, parity_op @ r).real)
    if x > PARITY_THRESHOLD:
        return 1
    if x < -PARITY_THRESHOLD:
        return -1
    return 0


def _eig(h):
    try:
        return sla.eig(h, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(str(exc)) from exc


def _gauge(space):
    # diag(i^n): turns the complex symmetric sector block into a real matrix
    return np.array([1, 1j, -1, -1j])[np.arange(space.photon_dim) % 4]


def _real_block(params, space, s):
    d = _gauge(space)
    h = build_sector_hamiltonian(params, space, s)
    return (d.conj()[:, None] * h * d[None, :]).real


def _eigvals(params, space, method):
    if method == "sectors":
        return np.concatenate([sla.eigvals(_real_block(params, space, s)) for s in SECTORS])
    return sla.eigvals(build_hamiltonian(params, space))


def _flag_ambiguous(values, groups):
    out = np.zeros(len(values), bool)
    for grp in np.unique(groups):
        idx = np.flatnonzero(groups == grp)
        v = values[idx]
        dist = np.abs(v[:, None] - v[None, :])
        np.fill_diagonal(dist, np.inf)
        out[idx] = dist.min(axis=1) < AMBIGUITY_TOL if len(idx) > 1 else False
    return out


def diagonalize(
    params: ModelParams,
    space: FockSpace,
    method: str = "sectors",
    audit: bool = True,
) -> Eigensystem:
    """Full eigendecomposition of the truncated non-Hermitian Hamiltonian.

    Parameters
    ----------
    method : {"sectors", "full"}
        ``"sectors"`` diagonalizes the two Pi-invariant blocks separately
        (exact parity, four times cheaper); each block is made real by the
        diagonal similarity ``diag(i^n)``, so complex eigenvalues come in
        exact conjugate pairs.  ``"full"`` works on the whole bare-basis
        matrix.
    audit : bool
        Re-diagonalize at ``cutoff + 20`` and mark each eigenvalue converged if
        it moved less than 1e-10.  With ``audit=False`` every flag is False.

    Left and right vectors come from the same LAPACK decomposition, so each
    left vector is paired with its right vector by construction.  Pairs whose
    eigenvalue has a neighbour (in the same sector) closer than 1e-12 are
    flagged ``ambiguous``; this is expected at coalescence points.
    """
    if method == "sectors":
        u = sector_basis(space)
        m = space.photon_dim
        d = _gauge(space)[:, None]
        vals, rights, lefts, groups = [], [], [], []
        for block, s in enumerate(SECTORS):
            # a real block gives eigenvalues in exact conjugate pairs
            w, vl, vr = _eig(_real_block(params, space, s))
            vl, vr = d * vl, d * vr
            ub = u[:, block * m:(block + 1) * m]
            vals.append(w)
            rights.append(ub @ vr)
            lefts.append(ub @ vl)
            groups.append(np.full(m, s))
        values = np.concatenate(vals)
        right = np.hstack(rights)
        left = np.hstack(lefts)
        groups = np.concatenate(groups)
    elif method == "full":
        values, left, right = _eig(build_hamiltonian(params, space))
        groups = np.zeros(len(values), int)
    else:
        raise ConfigurationError(f"unknown method {method!r}")

    right = right / np.linalg.norm(right, axis=0)
    left = left / np.linalg.norm(left, axis=0)
    pi = build_parity(space)
    x = np.einsum("ij,ij->j", right.conj(), pi @ right).real
    parity = np.where(x > PARITY_THRESHOLD, 1, np.where(x < -PARITY_THRESHOLD, -1, 0))
    ambiguous = _flag_ambiguous(values, groups)

    order = spectral_order(values, parity)
    values, right, left = values[order], right[:, order], left[:, order]
    parity, ambiguous = parity[order], ambiguous[order]

    if audit:
        bigger = _eigvals(params, space.enlarged(AUDIT_EXTRA), method)
        moved = np.abs(values[:, None] - bigger[None, :]).min(axis=1)
        converged = moved < AUDIT_TOL
    else:
        converged = np.zeros(len(values), bool)
    return Eigensystem(params, space, values, right, left, parity, converged, ambiguous)


@dataclass
class SpectrumRecord:
    """Eigenvalues at one coupling, with parity, branch label and provenance per entry."""

    g: float
    values: NDArray[np.complex128]
    parity: NDArray[np.int_]
    branch_id: NDArray[np.int_]
    provenance: list[str]
    converged: NDArray[np.bool_] | None = None


@dataclass(frozen=True)
class Candidate:
    """A grid interval that brackets a coalescence (``kind="ep"``) or a crossing."""

    kind: str
    g_lo: float
    g_hi: float
    energy: float
    parity: tuple[int, int]
    branch_ids: tuple[int, int]
    level_pair: tuple[int, int]
    pole: int | None = None


@dataclass
class Trace:
    records: list[SpectrumRecord]
    coalescences: list[Candidate] = field(default_factory=list)
    crossings: list[Candidate] = field(default_factory=list)
    # (grid index, branch ids) where the assignment was a tie
    ambiguous: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)


def lowest_levels(values, levels):
    """Indices of the lowest ``levels`` entries of an ordered spectrum, not splitting a conjugate pair."""
    k = min(levels, len(values))
    if 0 < k < len(values):
        a, b = values[k - 1], values[k]
        if abs(a.imag) > REAL_TOL and abs(a - b.conjugate()) < 1e-8 * (1 + abs(a)):
            k += 1
    return np.arange(k)


def _trace_point(g, delta, cutoff, levels, audit, method):
    es = diagonalize(ModelParams(delta, g), FockSpace(cutoff), method=method, audit=audit)
    keep = lowest_levels(es.values, levels)
    return es.values[keep], es.parity[keep], es.converged[keep]


def _assign(prev_vals, cur_vals):
    """Match current eigenvalues to previous ones; returns (pairs, tie flag)."""
    cost = np.abs(prev_vals[:, None] - cur_vals[None, :])
    if max(cost.shape) <= MAX_OPTIMAL_ASSIGNMENT:
        rows, cols = linear_sum_assignment(cost)
    else:
        rows, cols, used = [], [], set()
        for flat in np.argsort(cost, axis=None, kind="stable"):
            i, j = divmod(int(flat), cost.shape[1])
            if i in rows or j in used:
                continue
            rows.append(i)
            cols.append(j)
            used.add(j)
        rows, cols = np.array(rows, int), np.array(cols, int)
    tie = False
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            i1, j1, i2, j2 = rows[a], cols[a], rows[b], cols[b]
            swapped = cost[i1, j2] + cost[i2, j1]
            if abs(swapped - (cost[i1, j1] + cost[i2, j2])) < 1e-12 * (1 + swapped):
                tie = True
    return list(zip(rows.tolist(), cols.tolist())), tie


def assign_branches(records: list[SpectrumRecord]) -> list[tuple[int, tuple[int, ...]]]:
    """Give every eigenvalue a branch id that follows it from one grid point to the next.

    Matching is done separately inside each parity class (parity is
    conserved, so levels of opposite parity can cross freely).  Returns the
    grid points at which the matching had a tie, as happens right at a
    coalescence; ids there keep the (Re, Im) ordering.
    """
    next_id = 0
    ties = []
    prev = None
    for k, rec in enumerate(records):
        ids = np.full(len(rec.values), -1, int)
        if prev is not None:
            for p in np.unique(np.concatenate([prev.parity, rec.parity])):
                pi = np.flatnonzero(prev.parity == p)
                ci = np.flatnonzero(rec.parity == p)
                if len(pi) == 0 or len(ci) == 0:
                    continue
                pairs, tie = _assign(prev.values[pi], rec.values[ci])
                for i, j in pairs:
                    ids[ci[j]] = prev.branch_id[pi[i]]
                if tie:
                    ties.append((k, tuple(int(prev.branch_id[i]) for i in pi)))
        for j in np.flatnonzero(ids < 0):
            ids[j] = next_id
            next_id += 1
        if prev is None:
            next_id = len(ids)
        rec.branch_id = ids
        prev = rec
    return ties


def _is_real(v):
    return abs(v.imag) < REAL_TOL


def _find_candidates(records):
    coalescences, crossings = [], []
    for k in range(len(records) - 1):
        a, b = records[k], records[k + 1]
        pos_a = {int(i): n for n, i in enumerate(a.branch_id)}
        pos_b = {int(i): n for n, i in enumerate(b.branch_id)}
        shared = [i for i in pos_a if i in pos_b]
        # real pair <-> conjugate pair transitions inside one parity class
        for x in range(len(shared)):
            for y in range(x + 1, len(shared)):
                i1, i2 = shared[x], shared[y]
                u1, u2 = a.values[pos_a[i1]], a.values[pos_a[i2]]
                w1, w2 = b.values[pos_b[i1]], b.values[pos_b[i2]]
                if a.parity[pos_a[i1]] != a.parity[pos_a[i2]]:
                    continue
                real_a = _is_real(u1) and _is_real(u2)
                real_b = _is_real(w1) and _is_real(w2)
                conj_a = not real_a and abs(u1 - u2.conjugate()) < 1e-8 * (1 + abs(u1))
                conj_b = not real_b and abs(w1 - w2.conjugate()) < 1e-8 * (1 + abs(w1))
                if (real_a and conj_b) or (conj_a and real_b):
                    side = (u1, u2) if real_a else (w1, w2)
                    coalescences.append(Candidate(
                        kind="ep",
                        g_lo=a.g,
                        g_hi=b.g,
                        energy=float(np.mean([side[0].real, side[1].real])),
                        parity=(int(a.parity[pos_a[i1]]),) * 2,
                        branch_ids=tuple(sorted((i1, i2))),
                        level_pair=tuple(sorted((pos_a[i1], pos_a[i2]))),
                    ))
        # adjacent opposite-parity real levels swapping order near a pole line
        for n in range(len(a.values) - 1):
            u1, u2 = a.values[n], a.values[n + 1]
            if not (_is_real(u1) and _is_real(u2)) or a.parity[n] == a.parity[n + 1]:
                continue
            i1, i2 = int(a.branch_id[n]), int(a.branch_id[n + 1])
            if i1 not in pos_b or i2 not in pos_b:
                continue
            w1, w2 = b.values[pos_b[i1]], b.values[pos_b[i2]]
            if not (_is_real(w1) and _is_real(w2)) or w1.real <= w2.real:
                continue
            mid = 0.25 * (u1.real + u2.real + w1.real + w2.real)
            gm = 0.5 * (a.g + b.g)
            pole = int(round(mid - gm * gm))
            if pole < 0 or abs(mid - (pole + gm * gm)) > 0.05:
                continue
            crossings.append(Candidate(
                kind="crossing",
                g_lo=a.g,
                g_hi=b.g,
                energy=mid,
                parity=(int(a.parity[n]), int(a.parity[n + 1])),
                branch_ids=(i1, i2),
                level_pair=(n, n + 1),
                pole=pole,
            ))
    return coalescences, crossings


def trace_spectrum(
    delta: float,
    g_grid,
    space: FockSpace,
    levels: int = 20,
    jobs: int = 1,
    audit: bool = True,
    method: str = "sectors",
) -> Trace:
    """Diagonalize along a coupling grid and follow each level as a branch.

    Only the lowest ``levels`` eigenvalues (by real part) are kept at each
    point.  The result also lists candidate intervals for coalescences
    (two real levels of one parity turning into a conjugate pair, or back)
    and for crossings (opposite-parity levels swapping order on a pole line),
    which the G-function solvers can refine.
    """
    grid = np.asarray(g_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ConfigurationError("g grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("g grid must be strictly increasing")
    work = partial(_trace_point, delta=delta, cutoff=space.cutoff, levels=levels,
                   audit=audit, method=method)
    results = ordered_map(work, grid.tolist(), jobs)
    records = [
        SpectrumRecord(g=float(g), values=v, parity=p, branch_id=np.zeros(len(v), int),
                       provenance=["oracle"] * len(v), converged=c)
        for g, (v, p, c) in zip(grid, results)
    ]
    ties = assign_branches(records)
    coalescences, crossings = _find_candidates(records)
    return Trace(records, coalescences, crossings, ties)


def reconstruct_state(params: ModelParams, table: RecursionTable, space: FockSpace) -> NDArray[np.complex128]:
    """Eigenvector of H rebuilt from the recursion coefficients at a G-function zero.

    The transformed state has components ``i^-n sqrt(n!) e_n`` (qubit up) and
    ``i^-n sqrt(n!) f_n`` (qubit down); it is cut at the first ``n`` where the
    weighted term drops below 1e-14 of the largest one seen, mapped back with
    D(-ig) and normalized to unit length.

    Forward recursion amplifies rounding error along the growing solution, so
    the weighted terms usually bottom out well above 1e-14 and then regrow.
    In that case the cut is placed at the minimum, provided it lies below
    1e-6 of the peak.
    """
    n = np.arange(len(table.e))
    with np.errstate(over="ignore", invalid="ignore"):
        weight = np.exp(0.5 * gammaln(n + 1)) * (-1j) ** n
        up = weight * table.e
        down = weight * table.f
    mag = np.maximum(np.abs(up), np.abs(down))
    stop = None
    peak = 0.0
    low, low_at = math.inf, None
    for k, m in enumerate(mag):
        if not math.isfinite(m):
            break
        peak = max(peak, m)
        if k > 0 and m < 1e-14 * peak:
            stop = k
            break
        if k > 0 and m < low:
            low, low_at = m, k
        elif low_at is not None and m > REGROWTH * low:
            # rounding error on the growing solution has taken over
            if low < DECAY_FLOOR * peak:
                stop = low_at
            break
    if stop is None or stop > space.cutoff:
        raise ReconstructionRangeError(
            f"weighted coefficients at E={table.E!r} do not decay within the available terms"
        )
    psi = np.zeros(space.dim, complex)
    psi[:stop] = up[:stop]
    psi[space.photon_dim:space.photon_dim + stop] = down[:stop]
    state = build_displacement(params, space, sign=-1) @ psi
    return state / np.linalg.norm(state)


def reconstruct_from_energy(params: ModelParams, E: complex, space: FockSpace) -> NDArray[np.complex128]:
    table = compute_recursion(params, E, n_max=space.cutoff)
    return reconstruct_state(params, table, space)
