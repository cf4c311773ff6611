import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zoloeig.filter_design import zolotarev_coeffs
from zoloeig.krylov import GMRESNotConverged, multishift_gmres


def diag_operator(d):
    d = np.asarray(d)

    def apply(v):
        return d[:, None] * v if v.ndim == 2 else d * v

    return apply


def test_identity_operator_one_iteration():
    y = np.array([1.0, 2.0, -1.0])
    s = 0.5j
    x, rep = multishift_gmres(lambda v: v, [s, -s], y)
    assert np.allclose(x[0], y / (1 + s), rtol=0, atol=1e-15)
    assert np.allclose(x[1], y / (1 - s), rtol=0, atol=1e-15)
    assert rep.iterations.tolist() == [1]
    assert rep.all_converged


def test_diagonal_matches_dense_solve():
    d = np.array([1.0, 0.9, 1.1])
    y = np.ones(3)
    shifts = [0.5j, -0.5j]
    x, rep = multishift_gmres(diag_operator(d), shifts, y)
    for xi, s in zip(x, shifts):
        ref = np.linalg.solve(np.diag(d) + s * np.eye(3), y)
        assert np.abs(xi - ref).max() <= 1e-12
    assert rep.iterations[0] <= 3


def test_reported_residual_matches_recomputed(rng):
    n, k = 80, 3
    m = rng.standard_normal((n, n)) / np.sqrt(n)
    g = np.eye(n) + 0.3 * (m + m.T) / 2
    shifts = [0.7j, -0.7j, 0.2 + 1j]
    y = rng.standard_normal((n, k))
    x, rep = multishift_gmres(lambda v: g @ v, shifts, y, tol=1e-9, max_iter=80)
    for j, s in enumerate(shifts):
        actual = np.linalg.norm((g + s * np.eye(n)) @ x[j] - y, axis=0) / np.linalg.norm(y, axis=0)
        assert np.abs(actual - rep.residuals[:, j]).max() <= 1e-10
    assert np.all(rep.residuals <= 1e-9)


def test_applications_equal_iterations_independent_of_shift_count(rng):
    d = np.concatenate([np.linspace(0.5, 1, 40), -np.linspace(0.5, 1, 40)])
    y = rng.standard_normal((80, 2))
    calls = {"cols": 0}

    def counted(v):
        calls["cols"] += v.shape[1]
        return diag_operator(d)(v)

    co = zolotarev_coeffs(5, 0.5)
    few = 1j * np.sqrt(co.c_odd[:1])
    many = np.concatenate([1j * np.sqrt(co.c_odd), -1j * np.sqrt(co.c_odd)])
    _, rep_few = multishift_gmres(counted, np.concatenate([few, -few]), y)
    used = calls["cols"]
    assert used == rep_few.applications.sum()
    calls["cols"] = 0
    _, rep_many = multishift_gmres(counted, many, y)
    assert calls["cols"] == rep_many.applications.sum()
    assert np.array_equal(rep_many.applications, rep_many.iterations)


def synthetic_run(ell2, r, rng):
    # G with spectrum filling [-1, -ell2] U [ell2, 1] and the outer shifts of a design
    d = rng.uniform(ell2, 1.0, 300) * rng.choice([-1.0, 1.0], 300)
    s = 1j * np.sqrt(zolotarev_coeffs(r, ell2).c_odd)
    return multishift_gmres(diag_operator(d), np.concatenate([s, -s]), rng.standard_normal((300, 4)), tol=1e-12)


@pytest.mark.parametrize("ell2", [0.85, 0.9, 0.99])
@pytest.mark.parametrize("r", [2, 4, 6])
def test_synthetic_spectrum_converges_within_25(ell2, r, rng):
    _, rep = synthetic_run(ell2, r, rng)
    assert rep.all_converged and rep.max_iterations <= 25


@pytest.mark.parametrize("ell2", [0.5, 0.7])
def test_synthetic_spectrum_wide_intervals_within_cap(ell2, rng):
    # a filled two-interval spectrum with ratio 1/ell2 needs more than 25 minimal-residual steps
    _, rep = synthetic_run(ell2, 3, rng)
    assert rep.all_converged and 25 < rep.max_iterations <= 50


def test_orthogonality(rng):
    n = 120
    m = rng.standard_normal((n, n))
    g = np.eye(n) + 0.5 * (m - m.T) / np.sqrt(n)
    _, rep = multishift_gmres(lambda v: g @ v, [0.3j, -0.3j], rng.standard_normal(n), tol=1e-12, max_iter=60)
    assert rep.orthogonality <= 1e-10


def test_not_converged_carries_report(rng):
    n = 200
    d = np.linspace(-1, 1, n)
    with pytest.raises(GMRESNotConverged) as info:
        multishift_gmres(diag_operator(d), [1e-3j], rng.standard_normal(n), tol=1e-14, max_iter=5)
    rep = info.value.report
    assert rep.iterations.tolist() == [5] and not rep.all_converged
    assert info.value.solutions.shape == (1, n)
    x, rep2 = multishift_gmres(diag_operator(d), [1e-3j], rng.standard_normal(n), tol=1e-14, max_iter=5,
                               raise_on_fail=False)
    assert not rep2.all_converged


def test_zero_rhs_column():
    y = np.zeros((4, 2))
    y[:, 1] = 1.0
    x, rep = multishift_gmres(diag_operator([1, 2, 3, 4]), [1j], y)
    assert np.all(x[0][:, 0] == 0)
    assert rep.iterations[0] == 0 and rep.converged.all()


def test_argument_errors():
    with pytest.raises(ValueError):
        multishift_gmres(lambda v: v, [1j, 1j], np.ones(3))
    with pytest.raises(ValueError):
        multishift_gmres(lambda v: v, [], np.ones(3))
    with pytest.raises(ValueError):
        multishift_gmres(lambda v: v, [1j], np.ones(3), max_iter=0)
    with pytest.raises(ValueError):
        multishift_gmres(lambda v: v[:2], [1j], np.ones(3))


@given(st.integers(1, 6), st.floats(0.5, 0.99), st.integers(0, 2**31))
def test_solutions_solve_each_shift(r, ell2, seed):
    rng = np.random.default_rng(seed)
    d = rng.uniform(ell2, 1.0, 50) * rng.choice([-1.0, 1.0], 50)
    s = 1j * np.sqrt(zolotarev_coeffs(r, ell2).c_odd)
    shifts = np.concatenate([s, -s])
    y = rng.standard_normal(50)
    x, rep = multishift_gmres(diag_operator(d), shifts, y, tol=1e-12)
    for xi, si in zip(x, shifts):
        assert np.linalg.norm((d + si) * xi - y) <= 1e-11 * np.linalg.norm(y)
