"""Model parameters and truncated Fock-space matrices.

Basis ordering is fixed for every module: the first ``cutoff + 1`` entries are
the qubit-up states ``|up, n>`` for ``n = 0..cutoff``, followed by the qubit-down
states ``|down, n>`` in the same photon order.  Operators are plain complex
``numpy`` arrays in this bare basis unless a function says otherwise.

Energies are in units of the cavity frequency, which is fixed to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm

from ptrabi.errors import ConfigurationError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

#: Parity sectors, ordered as they appear in :func:`sector_basis`.
SECTORS = (1, -1)


@dataclass(frozen=True)
class ModelParams:
    """One instance of the imaginary-coupling Rabi model.

    ``g`` is the magnitude of the coupling; the Hamiltonian carries ``1j * g``.
    """

    delta: float
    g: float
    omega: float = 1.0

    def __post_init__(self):
        if self.omega != 1.0:
            raise ConfigurationError("omega is fixed to 1; rescale delta and g instead")
        if not (math.isfinite(self.delta) and math.isfinite(self.g)):
            raise ConfigurationError(f"non-finite parameters delta={self.delta}, g={self.g}")
        if self.g < 0:
            raise ConfigurationError(f"g must be non-negative, got {self.g}")

    def with_g(self, g: float) -> ModelParams:
        return ModelParams(self.delta, g)


@dataclass(frozen=True)
class FockSpace:
    """Qubit times a photon space truncated to ``|0>..|cutoff>``."""

    cutoff: int = 120

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ConfigurationError(f"photon cutoff must be an integer >= 1, got {self.cutoff}")

    @property
    def photon_dim(self) -> int:
        return self.cutoff + 1

    @property
    def dim(self) -> int:
        return 2 * (self.cutoff + 1)

    def enlarged(self, extra: int = 20) -> FockSpace:
        return FockSpace(self.cutoff + extra)


def annihilation(space: FockSpace) -> NDArray[np.float64]:
    """Photon annihilation operator ``a`` on the truncated photon space."""
    return np.diag(np.sqrt(np.arange(1, space.photon_dim, dtype=float)), 1)


def number_operator(space: FockSpace) -> NDArray[np.float64]:
    return np.diag(np.arange(space.photon_dim, dtype=float))


def _on_qubit(op2, space):
    return np.kron(op2, np.eye(space.photon_dim))


def _on_photon(op, space):
    return np.kron(np.eye(2), op)


def build_hamiltonian(params: ModelParams, space: FockSpace) -> NDArray[np.complex128]:
    """H = -(delta/2) sigma_x + a^dag a + i g (a + a^dag) sigma_z in the bare basis."""
    a = annihilation(space)
    x = a + a.T
    h = -0.5 * params.delta * _on_qubit(SIGMA_X, space) + _on_photon(number_operator(space), space)
    return h + 1j * params.g * np.kron(SIGMA_Z, x)


def build_transformed_hamiltonian(params: ModelParams, space: FockSpace) -> NDArray[np.complex128]:
    """Similarity-transformed Hamiltonian D(ig) H D(-ig), written out block by block.

    Only used to cross-check spectra; truncation spoils the similarity near the cutoff.
    """
    g = params.g
    a = annihilation(space)
    num = number_operator(space)
    eye = np.eye(space.photon_dim)
    upper = num + g**2 * eye
    lower = num - 2j * g * (a + a.T) - 3 * g**2 * eye
    off = -0.5 * params.delta * eye
    return np.block([[upper, off], [off, lower]]).astype(complex)


def build_parity(space: FockSpace) -> NDArray[np.float64]:
    """Pi = sigma_x (x) exp(i pi a^dag a); real, involutive, diagonal in photon number."""
    signs = np.diag((-1.0) ** np.arange(space.photon_dim))
    return np.kron(SIGMA_X, signs)


def pt_parity(space: FockSpace) -> NDArray[np.float64]:
    """P = sigma_x (x) 1, the parity half of the PT operation."""
    return _on_qubit(SIGMA_X, space)


def check_pt_symmetry(h: NDArray) -> float:
    """Frobenius norm of P conj(H) P - H.

    Time reversal fixes ``a`` and ``a^dag`` and conjugates scalars, so in the
    real Fock basis it acts as entrywise complex conjugation.
    """
    h = np.asarray(h)
    dim = h.shape[0]
    if h.ndim != 2 or h.shape[1] != dim or dim % 2:
        raise ConfigurationError(f"expected a square matrix of even dimension, got {h.shape}")
    p = pt_parity(FockSpace(dim // 2 - 1))
    return float(np.linalg.norm(p @ h.conj() @ p - h))


def build_displacement(params: ModelParams, space: FockSpace, sign: int = 1) -> NDArray[np.complex128]:
    """D(+-ig) = exp[+-ig (a^dag - a)] on both qubit components.

    The exponential is taken of the truncated generator, so entries are only
    trustworthy on photon indices well below the cutoff.
    """
    if sign not in (1, -1):
        raise ConfigurationError(f"sign must be +1 or -1, got {sign}")
    a = annihilation(space)
    d = expm(sign * 1j * params.g * (a.T - a))
    return _on_photon(d, space)


def sector_basis(space: FockSpace) -> NDArray[np.float64]:
    """Orthogonal matrix whose columns are parity-adapted basis vectors.

    Column ``n`` of sector ``s`` is ``(|up, n> + s (-1)^n |down, n>) / sqrt(2)``;
    the ``+1`` sector fills the first ``cutoff + 1`` columns.
    """
    m = space.photon_dim
    n = np.arange(m)
    u = np.zeros((space.dim, space.dim))
    for block, s in enumerate(SECTORS):
        cols = block * m + n
        u[n, cols] = 1.0 / math.sqrt(2.0)
        u[m + n, cols] = s * (-1.0) ** n / math.sqrt(2.0)
    return u


def build_sector_hamiltonian(params: ModelParams, space: FockSpace, parity: int) -> NDArray[np.complex128]:
    """H restricted to the Pi = ``parity`` subspace, in the basis of :func:`sector_basis`.

    The block is complex symmetric and tridiagonal:
    ``n - parity (-1)^n delta/2`` on the diagonal and ``i g sqrt(n)`` beside it.
    """
    if parity not in SECTORS:
        raise ConfigurationError(f"parity must be +1 or -1, got {parity}")
    n = np.arange(space.photon_dim, dtype=float)
    diag = n - parity * (-1.0) ** n * 0.5 * params.delta
    off = 1j * params.g * np.sqrt(n[1:])
    return np.diag(diag.astype(complex)) + np.diag(off, 1) + np.diag(off, -1)


def decoupled_spectrum(delta: float, levels: int) -> tuple[NDArray[np.float64], NDArray[np.int_]]:
    """Exact g = 0 eigenvalues ``n - s (-1)^n delta/2`` and their parities, sorted ascending."""
    m = levels + 1
    n = np.arange(m, dtype=float)
    values, parities = [], []
    for s in SECTORS:
        values.append(n - s * (-1.0) ** n * 0.5 * delta)
        parities.append(np.full(m, s))
    values = np.concatenate(values)
    parities = np.concatenate(parities)
    order = np.lexsort((parities, values))
    return values[order][:levels], parities[order][:levels]
