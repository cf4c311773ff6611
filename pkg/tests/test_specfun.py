import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zoloeig.specfun import (
    agm,
    complete_elliptic_K,
    complete_elliptic_K_complement,
    jacobi_elliptic,
    sncndn,
)

from oracles import quad_K, scipy_sncndn


def test_K_at_zero_is_half_pi():
    assert complete_elliptic_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)


@pytest.mark.parametrize(
    "k, expected",
    [
        # frozen from quadrature of the defining integral
        (1.0 / 3.0, 1.6173867356247322),
        (1.0 / math.sqrt(2.0), 1.8540746773013719),
    ],
)
def test_K_known_values(k, expected):
    assert complete_elliptic_K(k) == pytest.approx(expected, rel=1e-14)


@given(st.floats(min_value=0.0, max_value=0.999))
def test_K_matches_quadrature(k):
    assert complete_elliptic_K(k) == pytest.approx(quad_K(k), rel=1e-12)


def test_K_complement_agrees_with_direct_form():
    for k in (0.1, 0.5, 0.9, 0.999):
        kc = math.sqrt(1 - k * k)
        assert complete_elliptic_K_complement(kc) == pytest.approx(complete_elliptic_K(k), rel=1e-14)


def test_K_increasing_on_grid():
    ks = np.linspace(0.0, 0.999, 200)
    vals = [complete_elliptic_K(k) for k in ks]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("k", [1.0, 1.5, -0.1, float("nan")])
def test_K_domain_error(k):
    with pytest.raises(ValueError):
        complete_elliptic_K(k)


def test_agm_basic():
    assert agm(1.0, 1.0) == 1.0
    assert agm(1.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert agm(24.0, 6.0) == pytest.approx(13.458171481725616, rel=1e-14)
    with pytest.raises(ValueError):
        agm(-1.0, 1.0)


@pytest.mark.parametrize("k", [0.0, 0.3, 0.9, 1.0 - 1e-13])
def test_origin(k):
    with pytest.warns(RuntimeWarning) if k > 1 - 1e-12 else _nullcontext():
        t = jacobi_elliptic(0.0, k)
    assert (t.sn, t.cn, t.dn) == pytest.approx((0.0, 1.0, 1.0), abs=1e-15)


class _nullcontext:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False


def test_trigonometric_limit():
    t = jacobi_elliptic(1.0, 0.0)
    assert t.sn == pytest.approx(math.sin(1.0), abs=1e-15)
    assert t.cn == pytest.approx(math.cos(1.0), abs=1e-15)
    assert t.dn == 1.0


def test_half_period_identity():
    # sn(K/2; k) = 1/sqrt(1 + k'), k = 0.6, k' = 0.8
    k = 0.6
    t = jacobi_elliptic(complete_elliptic_K(k) / 2, k)
    assert t.sn == pytest.approx(1.0 / math.sqrt(1.8), abs=1e-12)
    assert t.sn == pytest.approx(0.7453559924999299, abs=1e-12)


@pytest.mark.parametrize(
    "u, k, expected",
    [
        # frozen from scipy.special.ellipj (parameter m = k^2)
        (0.3, 0.5, (0.2944655515495562, 0.9556620945452506, 0.9891018702528339)),
        (1.7, 0.9, (0.965204915863874, 0.26149468520834585, 0.4953658960987236)),
        (-2.2, 0.99, (-0.9798759929379713, 0.1996072104504865, 0.24279654445315876)),
        (5.0, 0.2, (-0.9725961687710882, 0.23250095159332326, 0.9808987040972531)),
    ],
)
def test_frozen_values(u, k, expected):
    t = jacobi_elliptic(u, k)
    assert (t.sn, t.cn, t.dn) == pytest.approx(expected, abs=1e-12)


@given(st.floats(min_value=0.0, max_value=0.9999), st.floats(min_value=-4.0, max_value=4.0))
def test_matches_scipy_within_four_periods(k, frac):
    u = frac * complete_elliptic_K(k)
    t = jacobi_elliptic(u, k)
    ref = scipy_sncndn(u, k)
    assert np.allclose((t.sn, t.cn, t.dn), ref, atol=1e-12, rtol=0)


@given(st.floats(min_value=0.0, max_value=0.9999), st.floats(min_value=-20.0, max_value=20.0))
def test_pythagorean_identities(k, u):
    t = jacobi_elliptic(u, k)
    assert t.sn**2 + t.cn**2 == pytest.approx(1.0, abs=1e-13)
    assert t.dn**2 + (k * t.sn) ** 2 == pytest.approx(1.0, abs=1e-13)


@given(st.floats(min_value=0.0, max_value=0.99), st.floats(min_value=-3.0, max_value=3.0))
def test_periodicity(k, u):
    four_k = 4 * complete_elliptic_K(k)
    assert jacobi_elliptic(u + four_k, k).sn == pytest.approx(jacobi_elliptic(u, k).sn, abs=1e-10)


@pytest.mark.parametrize("k", [0.0, 0.2, 0.7, 0.95, 0.999999])
def test_quarter_period(k):
    kk = complete_elliptic_K(k)
    t = jacobi_elliptic(kk, k)
    assert t.sn == pytest.approx(1.0, abs=1e-12)
    assert t.cn == pytest.approx(0.0, abs=1e-12)


def test_non_finite_argument_rejected():
    for u in (math.inf, math.nan):
        with pytest.raises(ValueError):
            jacobi_elliptic(u, 0.5)
    with pytest.raises(ValueError):
        jacobi_elliptic(0.5, 1.2)


def test_modulus_clamped_with_warning():
    with pytest.warns(RuntimeWarning, match="clamped"):
        t = jacobi_elliptic(0.5, 1.0)
    assert t.sn == pytest.approx(math.tanh(0.5), abs=1e-6)


def test_vectorised_form_with_complement():
    u = np.linspace(-3, 3, 11)
    ell = 1e-9
    s, c, d = sncndn(u, math.sqrt(1 - ell * ell), ell)
    assert np.allclose(s, np.tanh(u), atol=1e-9)
    assert np.allclose(s**2 + c**2, 1.0, atol=1e-13)
