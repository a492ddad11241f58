import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptrabi.errors import ConfigurationError
from ptrabi.model import (
    FockSpace,
    ModelParams,
    annihilation,
    build_displacement,
    build_hamiltonian,
    build_parity,
    build_sector_hamiltonian,
    build_transformed_hamiltonian,
    check_pt_symmetry,
    decoupled_spectrum,
    pt_parity,
    sector_basis,
)

deltas = st.floats(0.0, 4.0)
couplings = st.floats(0.0, 1.5)
cutoffs = st.integers(1, 40)


def test_hamiltonian_entries_small_cutoff():
    h = build_hamiltonian(ModelParams(0.5, 0.25), FockSpace(1))
    # basis |up,0>, |up,1>, |down,0>, |down,1>
    expected = np.array(
        [
            [0, 0.25j, -0.25, 0],
            [0.25j, 1, 0, -0.25],
            [-0.25, 0, 0, -0.25j],
            [0, -0.25, -0.25j, 1],
        ]
    )
    np.testing.assert_allclose(h, expected, atol=0)


def test_hamiltonian_is_complex_symmetric_not_hermitian():
    h = build_hamiltonian(ModelParams(1.0, 0.3), FockSpace(10))
    assert np.array_equal(h, h.T)
    assert np.linalg.norm(h - h.conj().T) > 0.1


@given(deltas, couplings, cutoffs)
def test_parity_commutes(delta, g, cutoff):
    space = FockSpace(cutoff)
    h = build_hamiltonian(ModelParams(delta, g), space)
    pi = build_parity(space)
    assert np.linalg.norm(h @ pi - pi @ h) < 1e-12


@given(deltas, couplings, cutoffs)
def test_pt_symmetry(delta, g, cutoff):
    assert check_pt_symmetry(build_hamiltonian(ModelParams(delta, g), FockSpace(cutoff))) < 1e-12


def test_pt_check_detects_broken_symmetry():
    h = build_hamiltonian(ModelParams(1.0, 0.3), FockSpace(5))
    h[0, 0] += 0.1j
    assert check_pt_symmetry(h) > 0.1


def test_parity_is_involution():
    pi = build_parity(FockSpace(7))
    np.testing.assert_array_equal(pi @ pi, np.eye(16))
    p = pt_parity(FockSpace(7))
    np.testing.assert_array_equal(p @ p, np.eye(16))


def test_decoupled_limit():
    h = build_hamiltonian(ModelParams(0.5, 0.0), FockSpace(60))
    w = np.sort(np.linalg.eigvals(h).real)[:20]
    expected = np.sort(np.concatenate([np.arange(30) + 0.25, np.arange(30) - 0.25]))[:20]
    np.testing.assert_allclose(w, expected, atol=1e-12)
    vals, par = decoupled_spectrum(0.5, 6)
    np.testing.assert_allclose(vals, [-0.25, 0.25, 0.75, 1.25, 1.75, 2.25])
    assert par.tolist() == [1, -1, -1, 1, 1, -1]


def test_transformed_hamiltonian_similar_spectrum():
    params = ModelParams(0.5, 0.25)
    a = np.sort_complex(np.linalg.eigvals(build_hamiltonian(params, FockSpace(80))))[:6]
    b = np.linalg.eigvals(build_transformed_hamiltonian(params, FockSpace(80)))
    assert max(np.abs(b - v).min() for v in a) < 1e-8


def test_transformed_hamiltonian_matches_similarity_on_low_block():
    params = ModelParams(1.0, 0.3)
    space = FockSpace(60)
    h = build_hamiltonian(params, space)
    dp = build_displacement(params, space, 1)
    dm = build_displacement(params, space, -1)
    hs = build_transformed_hamiltonian(params, space)
    low = np.r_[0:20, 61:81]
    np.testing.assert_allclose((dp @ h @ dm)[np.ix_(low, low)], hs[np.ix_(low, low)], atol=1e-10)


def test_displacement_inverse_and_real_generator():
    params = ModelParams(1.0, 0.4)
    space = FockSpace(30)
    dp = build_displacement(params, space, 1)
    dm = build_displacement(params, space, -1)
    np.testing.assert_allclose(dp @ dm, np.eye(space.dim), atol=1e-12)
    with pytest.raises(ConfigurationError):
        build_displacement(params, space, 0)


def test_sector_blocks_reproduce_hamiltonian():
    params = ModelParams(2.5, 0.7)
    space = FockSpace(25)
    u = sector_basis(space)
    np.testing.assert_allclose(u.T @ u, np.eye(space.dim), atol=1e-14)
    m = space.photon_dim
    blocks = u.T @ build_hamiltonian(params, space) @ u
    np.testing.assert_allclose(blocks[:m, :m], build_sector_hamiltonian(params, space, 1), atol=1e-13)
    np.testing.assert_allclose(blocks[m:, m:], build_sector_hamiltonian(params, space, -1), atol=1e-13)
    assert np.abs(blocks[:m, m:]).max() < 1e-13


def test_annihilation_lowers():
    a = annihilation(FockSpace(4))
    np.testing.assert_allclose(a @ np.eye(5)[:, 3], np.sqrt(3) * np.eye(5)[:, 2])


@pytest.mark.parametrize(
    "kwargs",
    [dict(delta=1.0, g=-0.1), dict(delta=float("nan"), g=0.1), dict(delta=1.0, g=0.1, omega=2.0)],
)
def test_bad_params(kwargs):
    with pytest.raises(ConfigurationError):
        ModelParams(**kwargs)


@pytest.mark.parametrize("cutoff", [0, -3, 2.5])
def test_bad_cutoff(cutoff):
    with pytest.raises(ConfigurationError):
        FockSpace(cutoff)
