"""Exact spectrum and spectral intersections of the imaginary-coupling Rabi model.

The G-function route (:mod:`ptrabi.gfunction`, :mod:`ptrabi.solver`) is checked
against dense diagonalization (:mod:`ptrabi.oracle`); :mod:`ptrabi.diagnostics`
tells degeneracies from exceptional points.
"""

from ptrabi.diagnostics import FidelityScanPoint, c_product, fidelity, fidelity_susceptibility, fs_scan
from ptrabi.gfunction import GValue, RecursionTable, compute_recursion, evaluate_G, f_n_on_pole, pole_energy
from ptrabi.model import FockSpace, ModelParams, build_hamiltonian, build_parity, check_pt_symmetry
from ptrabi.oracle import EigenPair, Eigensystem, SpectrumRecord, diagonalize, trace_spectrum
from ptrabi.solver import (
    DegeneratePoint,
    ExceptionalPoint,
    assemble_spectrum,
    find_complex_zero,
    locate_degenerate,
    locate_ep,
    scan_real_zeros,
)

__version__ = "0.1.0"

__all__ = [
    "DegeneratePoint",
    "EigenPair",
    "Eigensystem",
    "ExceptionalPoint",
    "FidelityScanPoint",
    "FockSpace",
    "GValue",
    "ModelParams",
    "RecursionTable",
    "SpectrumRecord",
    "assemble_spectrum",
    "build_hamiltonian",
    "build_parity",
    "c_product",
    "check_pt_symmetry",
    "compute_recursion",
    "diagonalize",
    "evaluate_G",
    "f_n_on_pole",
    "fidelity",
    "fidelity_susceptibility",
    "find_complex_zero",
    "fs_scan",
    "locate_degenerate",
    "locate_ep",
    "pole_energy",
    "scan_real_zeros",
    "trace_spectrum",
]
