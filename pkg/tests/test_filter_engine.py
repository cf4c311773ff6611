import numpy as np
import pytest
import scipy.sparse as sp

from zoloeig.filter_design import SpectralWindow, build_filter_design, eval_filter_scalar, rescaled_eval
from zoloeig.filter_engine import FilterOperator, apply_filter, apply_g
from zoloeig.reference import dense_generalized_eig, filter_of_matrix_oracle
from zoloeig.sparse_linalg import ShiftedFactorSet, SparseHermitian, SparsePencil

from oracles import random_hermitian_pencil

DIAG_WINDOW = SpectralWindow.from_gaps(2, 3, 6, 7)


def diag_pencil(values):
    return SparsePencil(SparseHermitian(sp.diags(np.asarray(values, dtype=float)).tocsr()))


def dense_pencil(rng, n, complex_=True):
    a, b = random_hermitian_pencil(rng, n, complex_=complex_, cond=5.0)
    return SparsePencil(SparseHermitian(a), SparseHermitian(b)), a, b


@pytest.mark.parametrize("r", [1, 3, 5])
def test_apply_g_matches_scalar_on_diagonal(r):
    d = np.arange(1.0, 11.0)
    design = build_filter_design(DIAG_WINDOW, r)
    op = FilterOperator(design, diag_pencil(d))
    g = apply_g(op, np.eye(10))
    ref = rescaled_eval(design.inner, design.mobius(d))
    assert np.abs(np.diag(g) - ref).max() <= 1e-10
    assert np.abs(g - np.diag(np.diag(g))).max() <= 1e-12
    inside = (d >= DIAG_WINDOW.a_plus) & (d <= DIAG_WINDOW.b_minus)
    gd = np.diag(g)[inside]
    assert np.all(gd >= design.ell2 - 1e-10) and np.all(gd <= 1 + 1e-10)


def test_apply_g_real_output_for_real_pencil(rng):
    pencil, _, _ = dense_pencil(rng, 25, complex_=False)
    design = build_filter_design(SpectralWindow.from_gaps(-1.5, -1, 1, 1.5), 3)
    out = FilterOperator(design, pencil).apply_g(rng.standard_normal((25, 2)))
    assert out.dtype.kind == "f"


def test_real_shortcut_agrees_with_complex_path(rng):
    pencil, _, _ = dense_pencil(rng, 25, complex_=False)
    design = build_filter_design(SpectralWindow.from_gaps(-1.5, -1, 1, 1.5), 3)
    op = FilterOperator(design, pencil)
    v = rng.standard_normal((25, 2))
    real = op.apply_g(v)
    full = op.apply_g(v.astype(complex))
    assert np.abs(full.imag).max() <= 1e-12 * np.abs(real).max()
    assert np.abs(full.real - real).max() <= 1e-12 * np.abs(real).max()


def test_filter_on_diagonal_pencil():
    d = np.arange(1.0, 11.0)
    design = build_filter_design(DIAG_WINDOW, 3)
    op = FilterOperator(design, diag_pencil(d))
    out, rep = apply_filter(op, np.eye(10))
    target = ((d > 2.5) & (d < 6.5)).astype(float)
    assert np.abs(np.diag(out) - target).max() <= design.delta0 + 1e-12 + 1e-13
    assert np.abs(np.diag(out) - eval_filter_scalar(design, d)).max() <= 1e-12 + 1e-9
    assert rep.all_converged


@pytest.mark.parametrize("complex_", [True, False])
def test_filter_matches_dense_oracle(complex_, rng):
    pencil, a, b = dense_pencil(rng, 30, complex_)
    eig = dense_generalized_eig(a, b)
    lam = eig.lambdas
    # window whose gaps straddle two interior eigenvalue gaps
    i, j = 8, 20
    w = SpectralWindow.from_gaps(lam[i], lam[i + 1], lam[j], lam[j + 1])
    design = build_filter_design(w, 4)
    op = FilterOperator(design, pencil)
    v = rng.standard_normal((30, 5))
    out, _ = op.apply_filter(v)
    ref = filter_of_matrix_oracle(design, eig, v)
    assert np.linalg.norm(out - ref) <= 1e-8 * np.linalg.norm(v)


def test_filter_is_nearly_idempotent(rng):
    pencil, a, b = dense_pencil(rng, 30)
    lam = dense_generalized_eig(a, b).lambdas
    w = SpectralWindow.from_gaps(lam[5], lam[6], lam[15], lam[16])
    design = build_filter_design(w, 4)
    op = FilterOperator(design, pencil)
    v = rng.standard_normal((30, 3))
    f1, _ = op.apply_filter(v)
    f2, _ = op.apply_filter(f1)
    assert np.linalg.norm(f2 - f1) <= (4 * design.delta0 + 1e-9) * np.linalg.norm(v)


@pytest.mark.parametrize("complex_, factor", [(False, 1), (True, 2)])
def test_inner_solve_counter(complex_, factor, rng):
    pencil, _, _ = dense_pencil(rng, 20, complex_)
    design = build_filter_design(SpectralWindow.from_gaps(-1.5, -1, 1, 1.5), 3)
    op = FilterOperator(design, pencil)
    before = op.counters.inner_solves
    op.apply_g(rng.standard_normal(20))
    assert op.counters.inner_solves - before == factor * 3
    assert op.solves_per_apply(True) == factor * 3
    op.apply_g(rng.standard_normal((20, 4)))
    assert op.counters.inner_solves - before == 5 * factor * 3
    assert op.counters.g_applications == 5


def test_filter_counters_track_gmres(rng):
    pencil, _, _ = dense_pencil(rng, 20)
    design = build_filter_design(SpectralWindow.from_gaps(-1.5, -1, 1, 1.5), 2)
    op = FilterOperator(design, pencil)
    _, rep = op.apply_filter(rng.standard_normal((20, 2)))
    snap = op.counters.snapshot()
    assert snap["filter_applications"] == 1
    assert snap["gmres_iterations"] == [rep.max_iterations]
    assert snap["g_applications"] == rep.applications.sum()


def test_reused_factors_must_match_poles(rng):
    pencil, _, _ = dense_pencil(rng, 12)
    d3 = build_filter_design(SpectralWindow.from_gaps(-1.5, -1, 1, 1.5), 3)
    d2 = build_filter_design(SpectralWindow.from_gaps(-1.5, -1, 1, 1.5), 2)
    fs = ShiftedFactorSet(pencil, d3.poles)
    FilterOperator(d3, pencil, factors=fs)
    with pytest.raises(ValueError):
        FilterOperator(d2, pencil, factors=fs)


def test_dimension_mismatch(rng):
    design = build_filter_design(DIAG_WINDOW, 2)
    op = FilterOperator(design, diag_pencil(np.arange(1.0, 11.0)))
    with pytest.raises(ValueError):
        op.apply_g(np.ones(9))


def test_threaded_apply_matches_serial(rng):
    pencil, _, _ = dense_pencil(rng, 30)
    design = build_filter_design(SpectralWindow.from_gaps(-1.5, -1, 1, 1.5), 4)
    v = rng.standard_normal((30, 3))
    serial = FilterOperator(design, pencil, threads=0).apply_g(v)
    threaded = FilterOperator(design, pencil, threads=4).apply_g(v)
    assert np.abs(serial - threaded).max() <= 1e-13 * np.abs(serial).max()
