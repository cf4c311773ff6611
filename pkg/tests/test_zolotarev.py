import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zoloeig.filter_design import (
    MAX_ORDER,
    gontchar_bracket,
    gontchar_rho,
    partial_fraction_eval,
    partial_fraction_weights,
    rescaled_eval,
    zolotarev_coeffs,
    zolotarev_eval,
)

from oracles import goncar_rho_scipy, grid_extrema, zolo_c_mpmath, zolo_c_scipy, zolo_product


@pytest.mark.parametrize("ell", [0.01, 0.25, 0.5, 0.9])
def test_order_one_coefficient_is_ell(ell):
    co = zolotarev_coeffs(1, ell)
    assert co.c == pytest.approx([ell], rel=1e-13)


@pytest.mark.parametrize("ell", [0.01, 0.25])
def test_order_one_closed_forms(ell):
    co = zolotarev_coeffs(1, ell)
    s = math.sqrt(ell)
    assert co.delta == pytest.approx(((1 - s) / (1 + s)) ** 2, rel=1e-12)
    assert co.big_m == pytest.approx(2.0 / (1.0 / (1.0 + ell) + 1.0 / (2.0 * s)), rel=1e-12)


def test_order_one_quarter():
    co = zolotarev_coeffs(1, 0.25)
    assert co.big_m == pytest.approx(10.0 / 9.0, rel=1e-14)
    assert co.delta == pytest.approx(1.0 / 9.0, rel=1e-13)
    assert co.extrema == pytest.approx([0.25, 0.5, 1.0], rel=1e-14)
    assert zolotarev_eval(co, 0.5) == pytest.approx(10.0 / 9.0, rel=1e-14)
    assert rescaled_eval(co, 0.25) == pytest.approx(0.8, rel=1e-13)


@pytest.mark.parametrize("r, ell", [(2, 0.01), (3, 0.01), (2, 0.25), (3, 0.25), (5, 1e-4)])
def test_coefficients_match_independent_routes(r, ell):
    pytest.importorskip("mpmath")
    co = zolotarev_coeffs(r, ell)
    assert co.c == pytest.approx(zolo_c_mpmath(r, ell), rel=1e-12)
    # double-precision scipy loses digits near the upper end for small ell
    assert co.c == pytest.approx(zolo_c_scipy(r, ell), rel=1e-8)


@pytest.mark.parametrize(
    "r, ell, m_ref, delta_ref",
    [
        # frozen from a 400001-point dense grid with scipy elliptic functions
        (2, 0.01, 1.031495859773383, 0.14752408283191315),
        (3, 0.01, 1.5720389447463505, 0.028559587917457434),
        (2, 0.25, 2.243012354966131, 0.0031056200150542447),
        (3, 0.25, 3.3645428515351443, 8.653544867936589e-05),
    ],
)
def test_normalisation_against_dense_grid(r, ell, m_ref, delta_ref):
    co = zolotarev_coeffs(r, ell)
    assert co.big_m == pytest.approx(m_ref, rel=1e-9)
    assert co.delta == pytest.approx(delta_ref, rel=1e-8)


@given(st.integers(1, 8), st.floats(min_value=1e-8, max_value=0.95))
def test_coefficient_invariants(r, ell):
    co = zolotarev_coeffs(r, ell)
    assert len(co.c) == 2 * r - 1
    assert np.all(co.c > 0) and np.all(np.diff(co.c) > 0)
    # c_j c_{2r-j} = ell^2 and the middle coefficient is ell
    assert co.c * co.c[::-1] == pytest.approx(np.full(2 * r - 1, ell * ell), rel=1e-10)
    assert co.c[r - 1] == pytest.approx(ell, rel=1e-10)
    assert 0 < co.delta < 1
    f = zolotarev_eval(co, co.extrema)
    assert f.min() + f.max() == pytest.approx(2.0, rel=1e-12)
    assert len(co.extrema) == 2 * r + 1


@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("ell", [0.25, 0.01])
def test_equioscillation(r, ell):
    co = zolotarev_coeffs(r, ell)
    # dense grid scan is the oracle for the number and alternation of extrema
    x = np.geomspace(ell, 1.0, 200001)
    err = 1.0 - zolotarev_eval(co, x)
    idx = grid_extrema(err)
    assert len(idx) + 2 == 2 * r + 1
    ext = 1.0 - zolotarev_eval(co, co.extrema)
    assert np.all(np.sign(ext[:-1]) * np.sign(ext[1:]) < 0)
    assert np.abs(ext) == pytest.approx(np.full(2 * r + 1, co.delta), rel=1e-9)
    assert co.extrema[1:-1] == pytest.approx(x[idx], rel=1e-4)


def test_oddness_and_origin():
    co = zolotarev_coeffs(4, 0.003)
    x = np.linspace(-2, 2, 101)
    assert zolotarev_eval(co, 0.0) == 0.0
    assert zolotarev_eval(co, -x) == pytest.approx(-zolotarev_eval(co, x), abs=1e-15)


def test_rescaled_maximum_is_one():
    co = zolotarev_coeffs(3, 0.02)
    x = np.geomspace(0.02, 1, 100001)
    assert rescaled_eval(co, x).max() == pytest.approx(1.0, abs=1e-12)
    assert rescaled_eval(co, 0.02) == pytest.approx((1 - co.delta) / (1 + co.delta), rel=1e-12)


def test_weights_order_one():
    assert partial_fraction_weights(zolotarev_coeffs(1, 0.3)) == pytest.approx([1.0])


def test_weights_order_two_random_points(rng):
    co = zolotarev_coeffs(2, 0.1)
    a = partial_fraction_weights(co)
    x = rng.uniform(-3, 3, 100)
    ref = co.big_m * zolo_product(co.c, x)
    assert partial_fraction_eval(co, a, x) == pytest.approx(ref, rel=1e-11)


def test_weights_order_three_endpoints():
    co = zolotarev_coeffs(3, 0.01)
    a = partial_fraction_weights(co)
    for x in (0.01, 1.0):
        assert partial_fraction_eval(co, a, x) == pytest.approx(zolotarev_eval(co, x), rel=1e-11)


@given(st.integers(1, 8), st.floats(min_value=1e-6, max_value=0.9), st.floats(-5, 5), st.floats(-5, 5))
def test_partial_fractions_complex_points(r, ell, re, im):
    co = zolotarev_coeffs(r, ell)
    a = partial_fraction_weights(co)
    z = complex(re, im)
    if min(abs(z * z + c) for c in co.c_odd) < 1e-3:
        return
    ref = co.big_m * z
    for j, c in enumerate(co.c):
        ref = ref * (z * z + c) if j % 2 else ref / (z * z + c)
    assert abs(partial_fraction_eval(co, a, z) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_shifted_form_of_partial_fractions(rng):
    # x/(x^2 + c) = (1/(x - i sqrt c) + 1/(x + i sqrt c))/2
    co = zolotarev_coeffs(4, 0.05)
    a = partial_fraction_weights(co)
    x = rng.uniform(-2, 2, 50)
    s = np.sqrt(co.c_odd)
    alt = co.big_m * sum(0.5 * aj * (1 / (x - 1j * sj) + 1 / (x + 1j * sj)) for aj, sj in zip(a, s))
    assert np.abs(alt.imag).max() < 1e-13
    assert alt.real == pytest.approx(zolotarev_eval(co, x), rel=1e-10)


@pytest.mark.parametrize("r1, r2", [(2, 2), (3, 3), (2, 4)])
@pytest.mark.parametrize("ell1", [1e-2, 1e-3])
def test_composition_identity(r1, r2, ell1):
    inner = zolotarev_coeffs(r1, ell1)
    ell2 = rescaled_eval(inner, ell1)
    outer = zolotarev_coeffs(r2, ell2)
    big = zolotarev_coeffs(2 * r1 * r2, ell1)
    y = np.geomspace(ell1, 1.0, 5000)
    y = np.concatenate([-y, y])
    comp = zolotarev_eval(outer, rescaled_eval(inner, y))
    assert np.max(np.abs(comp - zolotarev_eval(big, y))) <= 1e-9


def test_domain_errors():
    for bad in (0.0, 1.0, -0.1, 1e-17):
        with pytest.raises(ValueError):
            zolotarev_coeffs(2, bad)
    for r in (0, MAX_ORDER + 1):
        with pytest.raises(ValueError):
            zolotarev_coeffs(r, 0.1)


def test_goncar_rho_matches_scipy():
    assert gontchar_rho(0.25) == pytest.approx(3.4140285902, rel=1e-10)
    for ell in (1e-6, 1e-3, 0.25, 0.8):
        assert gontchar_rho(ell) == pytest.approx(goncar_rho_scipy(ell), rel=1e-11)


def test_goncar_bracket_is_diagnostic_only():
    # for Z_2 at ell = 0.25 the bracket does not contain the exact error 1/9
    _, lo, hi = gontchar_bracket(0.25, 2)
    assert lo == pytest.approx(0.158, abs=1e-3) and hi == pytest.approx(0.188, abs=1e-3)
    assert not lo <= 1 / 9 <= hi


def test_goncar_limits():
    rhos = [gontchar_rho(ell) for ell in (1e-12, 1e-6, 1e-2, 0.5, 0.9)]
    assert rhos[0] > 1.0 and np.all(np.diff(rhos) > 0)
    # huge degrees underflow gracefully
    _, lo, hi = gontchar_bracket(0.5, 10**6)
    assert lo == 0.0 and hi == 0.0
