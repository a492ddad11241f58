import csv
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ptrabi.errors import PoleProximityError, UnsupportedParameterError
from ptrabi.gfunction import (
    POLE_GUARD,
    compute_recursion,
    evaluate_G,
    evaluate_G_grid,
    evaluate_G_precise,
    f_n_on_pole,
    nearest_pole,
    pole_energy,
)
from ptrabi.model import ModelParams

params_st = st.builds(ModelParams, delta=st.floats(0.1, 3.0), g=st.floats(0.05, 1.2))
re_st = st.floats(-3.0, 12.0)
im_st = st.floats(0.01, 4.0)


def off_pole(params, E, margin=1e-3):
    _, dist = nearest_pole(E, params.g)
    return dist > margin


def test_recursion_matches_extended_precision(data_dir):
    with open(data_dir / "recursion_mp.csv") as fh:
        rows = list(csv.DictReader(fh))
    ref_e = np.array([float(r["e"]) for r in rows])
    ref_f = np.array([float(r["f"]) for r in rows])
    table = compute_recursion(ModelParams(0.5, 0.25), -0.2, 60)
    assert table.n_used == 60
    np.testing.assert_allclose(table.e.real, ref_e, rtol=1e-12)
    np.testing.assert_allclose(table.f.real, ref_f, rtol=1e-12)


def test_first_recursion_terms():
    table = compute_recursion(ModelParams(0.5, 0.25), -0.2, 2)
    assert table.f[0] == 1
    assert table.e[0] == pytest.approx(0.25 / (0.0625 + 0.2))
    # f_1 = [-c e_0 + (-3g^2 - E) f_0] / (2g)
    assert table.f[1] == pytest.approx((-0.25 * table.e[0] + (-0.1875 + 0.2)) / 0.5)


@given(params_st, re_st, im_st)
def test_conjugate_symmetry(params, re, im):
    E = complex(re, im)
    assume(off_pole(params, E))
    a = evaluate_G(params, E)
    b = evaluate_G(params, E.conjugate())
    assert a.converged and b.converged
    tol = 1e-12 * max(1.0, a.scale)
    assert abs(b.g_plus - a.g_plus.conjugate()) < tol
    assert abs(b.g_minus - a.g_minus.conjugate()) < tol


@given(params_st, re_st)
def test_real_in_real_out(params, E):
    assume(off_pole(params, E))
    v = evaluate_G(params, E)
    assert v.g_plus.imag == 0 and v.g_minus.imag == 0


@given(params_st, re_st, st.floats(-2.0, 2.0))
def test_derivative_matches_finite_difference(params, re, im):
    E = complex(re, im)
    assume(off_pole(params, E, 1e-2))
    h = 1e-6
    v = evaluate_G(params, E, order=2)
    up, dn = evaluate_G(params, E + h, order=1), evaluate_G(params, E - h, order=1)
    for parity in (1, -1):
        fd = (up.value(parity) - dn.value(parity)) / (2 * h)
        d = v.derivative(parity)
        assert abs(d - fd) / (1 + abs(d)) < 1e-6
        fd2 = (up.derivative(parity) - dn.derivative(parity)) / (2 * h)
        d2 = v.derivative(parity, 2)
        assert abs(d2 - fd2) / (1 + abs(d2)) < 1e-5


@given(params_st, re_st, st.floats(-2.0, 2.0))
def test_differentiated_recursion_matches_tables(params, re, im):
    E = complex(re, im)
    assume(off_pole(params, E, 1e-2))
    h = 1e-6
    t = compute_recursion(params, E, 30, order=1)
    up, dn = compute_recursion(params, E + h, 30), compute_recursion(params, E - h, 30)
    for exact, a, b in ((t.de, up.e, dn.e), (t.df, up.f, dn.f)):
        fd = (a - b) / (2 * h)
        assert np.all(np.abs(exact - fd) / (1 + np.abs(exact)) < 1e-6)


def test_pole_divergence():
    params = ModelParams(0.5, 0.25)
    pole = pole_energy(1, params)
    mags = []
    for delta_e in (1e-2, 1e-3, 1e-4):
        v = evaluate_G(params, pole + delta_e)
        mags.append(abs(v.g_plus) * delta_e)
    # |G| ~ C / delta: the products settle to a constant
    assert mags[2] == pytest.approx(mags[1], rel=0.02)
    assert mags[1] == pytest.approx(mags[0], rel=0.2)


def test_pole_guard_raises():
    params = ModelParams(0.5, 0.25)
    with pytest.raises(PoleProximityError) as info:
        evaluate_G(params, pole_energy(2, params) + POLE_GUARD / 2)
    assert info.value.n == 2


def test_zero_coupling_unsupported():
    with pytest.raises(UnsupportedParameterError):
        evaluate_G(ModelParams(0.5, 0.0), 0.3)


def test_negative_pole_index():
    with pytest.raises(ValueError):
        pole_energy(-1, ModelParams(1.0, 0.2))


@given(params_st, re_st, st.floats(-2.0, 2.0))
def test_longer_sum_changes_nothing(params, re, im):
    E = complex(re, im)
    assume(off_pole(params, E))
    v = evaluate_G(params, E, order=0)
    assert v.converged
    n = 2 * v.n_used
    t = compute_recursion(params, E, n)
    gn = params.g ** np.arange(n + 1)
    plus = np.sum((t.e - t.f) * gn)
    assert abs(plus - v.g_plus) < 10 * 1e-14 * max(1.0, v.scale)


def test_zeros_at_oracle_eigenvalues(eig_cache):
    params = ModelParams(0.5, 0.25)
    es = eig_cache(0.5, 0.25)
    for k in range(8):
        v = evaluate_G(params, es.values[k])
        assert abs(v.value(es.parity[k])) < 1e-11 * max(1.0, v.scale)
        assert abs(v.value(-es.parity[k])) > 1e-3


def test_grid_agrees_with_scalar():
    params = ModelParams(2.5, 0.7)
    E = np.array([-1.3, 0.2 + 0.4j, 2.2 - 1.0j, 5.5])
    grid = evaluate_G_grid(params, E, order=1)
    for k, e in enumerate(E):
        v = evaluate_G(params, e)
        assert grid["plus"][k] == pytest.approx(v.g_plus, rel=1e-12, abs=1e-14)
        assert grid["dminus"][k] == pytest.approx(v.dg_minus_dE, rel=1e-12, abs=1e-14)


def test_grid_flags_poles():
    params = ModelParams(0.5, 0.25)
    grid = evaluate_G_grid(params, [pole_energy(0, params), 0.3])
    assert grid["pole"].tolist() == [True, False]
    assert math.isnan(grid["plus"][0].real) and grid["converged"][1]


def test_precise_agrees_with_double():
    params = ModelParams(2.5, 0.7)
    for E in (0.3, 1.7 + 0.8j):
        a, b = evaluate_G(params, E), evaluate_G_precise(params, E)
        assert b.converged
        assert abs(a.g_plus - b.g_plus) < 1e-13 * max(1, a.scale)
        assert abs(a.dg_minus_dE - b.dg_minus_dE) < 1e-12 * max(1, a.scale)


def test_f_on_pole_closed_form():
    # f_1 on pole line 1 equals (delta^2/4 - 1 - 4 g^2) / (2 g)
    for delta, g in ((2.5, 0.3), (1.0, 0.7), (3.0, 0.2)):
        expected = (delta**2 / 4 - 1 - 4 * g * g) / (2 * g)
        assert f_n_on_pole(ModelParams(delta, g), 1) == pytest.approx(expected, rel=1e-13)
    assert f_n_on_pole(ModelParams(2.5, 0.375), 1) == 0.0
    with pytest.raises(ValueError):
        f_n_on_pole(ModelParams(2.5, 0.375), 0)
