"""Sparse Hermitian pencils, shifted assembly and an unpivoted band LU.

The factorization reorders the shifted matrix by reverse Cuthill-McKee and
then eliminates it as a block tridiagonal matrix whose block size is at least
the bandwidth.  No pivoting is done; for a definite pencil and a non-real
shift the imaginary part of A - sigma B is definite, which keeps every pivot
away from zero.  Tiny pivots are reported instead of being absorbed silently.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.csgraph import reverse_cuthill_mckee

__all__ = [
    "FactorizationError",
    "SparseHermitian",
    "SparsePencil",
    "ShiftedFactor",
    "ShiftedFactorSet",
    "assemble_shifted",
    "reorder_rcm",
    "bandwidth",
    "profile",
    "factorize",
    "solve",
    "adjoint_solve",
    "spmv",
    "thread_count",
]

_HERMITIAN_TOL = 1e-14
_PIVOT_TOL = 1e-14
_MIN_BLOCK = 48
_LEAF = 32


class FactorizationError(ArithmeticError):
    """A pivot fell below the relative threshold during unpivoted elimination."""

    def __init__(self, index: int, pivot: complex, row_norm: float):
        self.index = int(index)
        self.pivot = pivot
        self.row_norm = float(row_norm)
        super().__init__(
            f"tiny pivot {abs(pivot):.3e} at index {self.index} (row norm {self.row_norm:.3e})"
        )


def thread_count(threads: int | None = None) -> int:
    """Worker count: explicit argument, else ZOLOEIG_THREADS, else 0 (serial)."""
    if threads is None:
        raw = os.environ.get("ZOLOEIG_THREADS", "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"ZOLOEIG_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError(f"thread count must be non-negative, got {threads}")
    return int(threads)


class SparseHermitian:
    """Hermitian matrix in CSR form (full pattern, sorted indices, no stored zeros).

    Parameters
    ----------
    matrix : scipy sparse matrix or array_like
        Any square matrix scipy can convert to CSR.
    check : bool
        Verify |M - M^H| <= 1e-14 max|M| entrywise.
    comments : list of str, optional
        Free-form metadata, e.g. comment lines of the file the matrix came from.
    """

    def __init__(self, matrix, check: bool = True, comments=None):
        self.comments = list(comments or [])
        csr = sp.csr_matrix(matrix)
        if csr.shape[0] != csr.shape[1]:
            raise ValueError(f"matrix must be square, got shape {csr.shape}")
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        if np.iscomplexobj(csr.data) and not np.any(csr.data.imag):
            csr = csr.real.tocsr()
        if not np.iscomplexobj(csr.data):
            csr = csr.astype(float)
        self._csr = csr
        if check:
            self.check_hermitian()

    def check_hermitian(self, tol: float = _HERMITIAN_TOL) -> None:
        csr = self._csr
        if csr.nnz == 0:
            return
        scale = np.abs(csr.data).max()
        diff = csr - csr.conj().T
        worst = np.abs(diff.data).max() if diff.nnz else 0.0
        if worst > tol * scale:
            raise ValueError(f"matrix is not Hermitian: max |M - M^H| = {worst:.3e} (scale {scale:.3e})")

    @classmethod
    def identity(cls, n: int) -> "SparseHermitian":
        return cls(sp.identity(n, format="csr", dtype=float), check=False)

    @property
    def n(self) -> int:
        return self._csr.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self._csr.data)

    @property
    def row_offsets(self) -> np.ndarray:
        return self._csr.indptr

    @property
    def col_indices(self) -> np.ndarray:
        return self._csr.indices

    @property
    def values(self) -> np.ndarray:
        return self._csr.data

    @property
    def csr(self) -> sp.csr_matrix:
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def __matmul__(self, x):
        return spmv(self, x)

    def __repr__(self) -> str:
        kind = "complex" if self.is_complex else "real"
        return f"SparseHermitian(n={self.n}, nnz={self.nnz}, {kind})"


def _as_hermitian(m) -> SparseHermitian:
    return m if isinstance(m, SparseHermitian) else SparseHermitian(m)


@dataclass
class SparsePencil:
    """Pencil (A, B) with A Hermitian and B Hermitian positive definite.

    ``b_mat = None`` stands for the identity.  Definiteness of B is checked
    on demand by :meth:`check_definite`.
    """

    a_mat: SparseHermitian
    b_mat: SparseHermitian | None = None
    _b_checked: bool = field(default=False, init=False, repr=False)

    def __post_init__(self):
        self.a_mat = _as_hermitian(self.a_mat)
        if self.b_mat is not None:
            self.b_mat = _as_hermitian(self.b_mat)
            if self.b_mat.n != self.a_mat.n:
                raise ValueError(f"dimension mismatch: A is {self.a_mat.n}, B is {self.b_mat.n}")

    @property
    def n(self) -> int:
        return self.a_mat.n

    @property
    def b_is_identity(self) -> bool:
        return self.b_mat is None

    @property
    def is_real(self) -> bool:
        return not self.a_mat.is_complex and (self.b_mat is None or not self.b_mat.is_complex)

    def apply_a(self, x):
        return spmv(self.a_mat, x)

    def apply_b(self, x):
        return np.array(x, copy=True) if self.b_mat is None else spmv(self.b_mat, x)

    def b_csr(self) -> sp.csr_matrix:
        return sp.identity(self.n, format="csr") if self.b_mat is None else self.b_mat.csr

    def check_definite(self) -> None:
        """Raise ValueError unless B factors with positive real pivots."""
        if self.b_mat is None or self._b_checked:
            return
        try:
            f = factorize(self.b_mat.csr)
        except FactorizationError as exc:
            raise ValueError(f"B is not positive definite: {exc}") from None
        piv = f.pivots
        if np.any(piv.real <= 0) or np.any(np.abs(piv.imag) > 1e-12 * np.abs(piv.real)):
            raise ValueError("B is not positive definite: non-positive pivot in its factorization")
        self._b_checked = True


def spmv(matrix, x):
    """y = M x for a SparseHermitian or scipy matrix and a vector or column block."""
    csr = matrix.csr if isinstance(matrix, SparseHermitian) else sp.csr_matrix(matrix)
    x = np.asarray(x)
    if x.shape[0] != csr.shape[1]:
        raise ValueError(f"dimension mismatch: matrix is {csr.shape}, block has {x.shape[0]} rows")
    return csr @ x


def assemble_shifted(pencil: SparsePencil, sigma: complex) -> sp.csr_matrix:
    """A - sigma B on the union of the two sparsity patterns."""
    a = pencil.a_mat.csr.tocoo()
    b = pencil.b_csr().tocoo()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: A {a.shape}, B {b.shape}")
    sigma = complex(sigma)
    dtype = complex if (sigma.imag != 0 or pencil.a_mat.is_complex or np.iscomplexobj(b.data)) else float
    bvals = -(sigma if dtype is complex else sigma.real) * b.data
    rows = np.concatenate([a.row, b.row])
    cols = np.concatenate([a.col, b.col])
    vals = np.concatenate([a.data.astype(dtype), bvals.astype(dtype)])
    out = sp.csr_matrix((vals, (rows, cols)), shape=a.shape, dtype=dtype)
    # duplicates are summed; cancelled entries stay in the pattern on purpose
    out.sum_duplicates()
    out.sort_indices()
    return out


def _pattern(matrix) -> sp.csr_matrix:
    csr = matrix.csr if isinstance(matrix, SparseHermitian) else sp.csr_matrix(matrix)
    pat = csr.copy()
    pat.data = np.ones_like(pat.data, dtype=np.int8)
    return pat


def reorder_rcm(matrix) -> np.ndarray:
    """Reverse Cuthill-McKee permutation of a structurally symmetric pattern.

    ``perm[i]`` is the original index placed at position i.
    """
    pat = _pattern(matrix)
    pat = (pat + pat.T).tocsr()
    return np.asarray(reverse_cuthill_mckee(pat, symmetric_mode=True), dtype=np.int64)


def bandwidth(matrix, perm: np.ndarray | None = None) -> int:
    """max |i - j| over stored entries, after the optional symmetric permutation."""
    coo = _pattern(matrix).tocoo()
    if coo.nnz == 0:
        return 0
    if perm is None:
        return int(np.abs(coo.row - coo.col).max())
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    return int(np.abs(inv[coo.row] - inv[coo.col]).max())


def profile(matrix, perm: np.ndarray | None = None) -> int:
    """Envelope size sum_i (i - min{j : m_ij != 0, j <= i}) of the lower triangle."""
    coo = _pattern(matrix).tocoo()
    n = coo.shape[0]
    if perm is None:
        r, c = coo.row, coo.col
    else:
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        r, c = inv[coo.row], inv[coo.col]
    first = np.arange(n)
    low = c <= r
    np.minimum.at(first, r[low], c[low])
    np.minimum.at(first, c[~low], r[~low])
    return int(np.sum(np.arange(n) - first))


def _lu_inplace(a: np.ndarray, row_norms: np.ndarray, offset: int) -> None:
    """Unpivoted LU of a dense square block, L unit lower and U stored in place."""
    n = a.shape[0]
    if n <= _LEAF:
        for k in range(n):
            piv = a[k, k]
            if not abs(piv) > _PIVOT_TOL * row_norms[k]:
                raise FactorizationError(offset + k, piv, row_norms[k])
            if k + 1 < n:
                a[k + 1 :, k] /= piv
                a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
        return
    h = n // 2
    _lu_inplace(a[:h, :h], row_norms[:h], offset)
    a[:h, h:] = sla.solve_triangular(a[:h, :h], a[:h, h:], lower=True, unit_diagonal=True)
    a[h:, :h] = sla.solve_triangular(a[:h, :h], a[h:, :h].T, trans="T", lower=False).T
    a[h:, h:] -= a[h:, :h] @ a[:h, h:]
    _lu_inplace(a[h:, h:], row_norms[h:], offset + h)


@dataclass
class _BlockBandLU:
    """LU of a block tridiagonal matrix: diagonal LU blocks plus the off-diagonal factors."""

    bounds: np.ndarray
    diag: list
    lower: list
    upper: list

    def _fwd_l(self, b):
        z = np.empty_like(b)
        for i, d in enumerate(self.diag):
            s, e = self.bounds[i], self.bounds[i + 1]
            rhs = b[s:e]
            if i:
                rhs = rhs - self.lower[i - 1] @ z[self.bounds[i - 1] : s]
            z[s:e] = sla.solve_triangular(d, rhs, lower=True, unit_diagonal=True, check_finite=False)
        return z

    def _bwd_u(self, z):
        x = np.empty_like(z)
        m = len(self.diag)
        for i in range(m - 1, -1, -1):
            s, e = self.bounds[i], self.bounds[i + 1]
            rhs = z[s:e]
            if i < m - 1:
                rhs = rhs - self.upper[i] @ x[e : self.bounds[i + 2]]
            x[s:e] = sla.solve_triangular(self.diag[i], rhs, lower=False, check_finite=False)
        return x

    def solve(self, b):
        return self._bwd_u(self._fwd_l(b))

    def solve_adjoint(self, b):
        # (LU)^H x = b: U^H is block lower, L^H block upper
        m = len(self.diag)
        w = np.empty_like(b)
        for i in range(m):
            s, e = self.bounds[i], self.bounds[i + 1]
            rhs = b[s:e]
            if i:
                rhs = rhs - self.upper[i - 1].conj().T @ w[self.bounds[i - 1] : s]
            w[s:e] = sla.solve_triangular(self.diag[i], rhs, lower=False, trans="C", check_finite=False)
        x = np.empty_like(w)
        for i in range(m - 1, -1, -1):
            s, e = self.bounds[i], self.bounds[i + 1]
            rhs = w[s:e]
            if i < m - 1:
                rhs = rhs - self.lower[i].conj().T @ x[e : self.bounds[i + 2]]
            x[s:e] = sla.solve_triangular(
                self.diag[i], rhs, lower=True, unit_diagonal=True, trans="C", check_finite=False
            )
        return x

    def pivots(self) -> np.ndarray:
        return np.concatenate([np.diag(d) for d in self.diag])

    @property
    def stored(self) -> int:
        return sum(d.size for d in self.diag) + sum(x.size for x in self.lower) + sum(x.size for x in self.upper)


def _band_lu(pm: sp.csr_matrix, block: int) -> _BlockBandLU:
    n = pm.shape[0]
    bounds = np.arange(0, n, block).tolist() + [n]
    bounds = np.array(bounds)
    m = len(bounds) - 1
    row_norms = np.asarray(abs(pm).sum(axis=1)).ravel()
    dtype = pm.dtype
    diag, lower, upper = [], [], []
    schur = None
    for i in range(m):
        s, e = bounds[i], bounds[i + 1]
        d = pm[s:e, s:e].toarray().astype(dtype, copy=False)
        if schur is not None:
            d -= schur
        _lu_inplace(d, row_norms[s:e], s)
        diag.append(d)
        if i + 1 < m:
            e2 = bounds[i + 2]
            sub = pm[e:e2, s:e].toarray()
            sup = pm[s:e, e:e2].toarray()
            # L_{i+1,i} = sub U_i^{-1};  U_{i,i+1} = L_i^{-1} sup
            lb = sla.solve_triangular(d, sub.T, trans="T", lower=False).T
            ub = sla.solve_triangular(d, sup, lower=True, unit_diagonal=True)
            lower.append(lb)
            upper.append(ub)
            schur = lb @ ub
    return _BlockBandLU(bounds=bounds, diag=diag, lower=lower, upper=upper)


@dataclass
class ShiftedFactor:
    """Direct factorization of one shifted matrix A - sigma B.

    Attributes
    ----------
    shift : complex
        The shift sigma (None when factorizing a bare matrix).
    ordering : ndarray
        Symmetric permutation applied before elimination.
    method : str
        ``"band"`` (unpivoted block band LU) or ``"dense"`` (pivoted dense LU).
    profile : dict
        Bandwidth, block size, stored factor entries and the smallest relative pivot.
    """

    shift: complex | None
    ordering: np.ndarray
    method: str
    profile: dict
    _factors: object = field(repr=False)
    _n: int = field(repr=False)

    @property
    def n(self) -> int:
        return self._n

    @property
    def pivots(self) -> np.ndarray:
        if self.method == "band":
            return self._factors.pivots()
        return np.diag(self._factors[0])

    def _check(self, rhs):
        rhs = np.asarray(rhs)
        if rhs.shape[0] != self._n:
            raise ValueError(f"dimension mismatch: factor is {self._n}, rhs has {rhs.shape[0]} rows")
        return rhs

    def _run(self, rhs, adjoint: bool):
        rhs = self._check(rhs)
        dtype = np.result_type(rhs.dtype, self.profile["dtype"], float)
        b = rhs.astype(dtype, copy=False)[self.ordering]
        if self.method == "band":
            y = self._factors.solve_adjoint(b) if adjoint else self._factors.solve(b)
        else:
            y = sla.lu_solve(self._factors, b, trans=2 if adjoint else 0, check_finite=False)
        out = np.empty_like(y)
        out[self.ordering] = y
        return out

    def solve(self, rhs):
        """x with (A - sigma B) x = rhs; rhs may be a vector or a column block."""
        return self._run(rhs, adjoint=False)

    def adjoint_solve(self, rhs):
        """x with (A - sigma B)^H x = rhs."""
        return self._run(rhs, adjoint=True)


def factorize(
    matrix,
    ordering: np.ndarray | None = None,
    method: str = "band",
    shift: complex | None = None,
    block_size: int | None = None,
) -> ShiftedFactor:
    """Factorize a square sparse matrix.

    Parameters
    ----------
    matrix : sparse or dense square matrix
    ordering : permutation, optional
        Symmetric reordering; RCM of the pattern when omitted.
    method : {"band", "dense"}
        ``band`` is the unpivoted block band LU; ``dense`` uses partial pivoting
        and is meant for small oracle problems.
    shift : complex, optional
        Recorded on the returned factor.
    block_size : int, optional
        Block size of the band elimination; defaults to max(bandwidth, 48).

    Raises
    ------
    FactorizationError
        If an unpivoted pivot is smaller than 1e-14 times its row norm.
    """
    csr = matrix.csr if isinstance(matrix, SparseHermitian) else sp.csr_matrix(matrix)
    n = csr.shape[0]
    if csr.shape[1] != n:
        raise ValueError(f"matrix must be square, got {csr.shape}")
    if ordering is None:
        ordering = reorder_rcm(csr) if method == "band" else np.arange(n)
    ordering = np.asarray(ordering, dtype=np.int64)
    if ordering.shape != (n,) or not np.array_equal(np.sort(ordering), np.arange(n)):
        raise ValueError("ordering must be a permutation of range(n)")
    pm = csr[ordering][:, ordering].tocsr()
    dtype = np.result_type(pm.dtype, float)
    pm = pm.astype(dtype)
    bw = bandwidth(pm)
    info = {"n": n, "bandwidth": bw, "dtype": dtype}

    if method == "band":
        block = max(bw, _MIN_BLOCK) if block_size is None else int(block_size)
        if block < max(bw, 1):
            raise ValueError(f"block size {block} smaller than bandwidth {bw}")
        block = min(block, max(n, 1))
        try:
            lu = _band_lu(pm, block)
        except FactorizationError as exc:
            # report the row in the caller's numbering
            raise FactorizationError(ordering[exc.index], exc.pivot, exc.row_norm) from None
        row_norms = np.asarray(abs(pm).sum(axis=1)).ravel()
        info.update(block_size=block, factor_entries=lu.stored)
        factors = lu
        piv = lu.pivots()
    elif method == "dense":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            factors = sla.lu_factor(pm.toarray(), check_finite=False)
        row_norms = np.abs(pm.toarray()).sum(axis=1)
        info.update(block_size=n, factor_entries=n * n)
        piv = np.diag(factors[0])
        # row interchanges scramble the row association; compare against the largest row
        scale = row_norms.max() if n else 1.0
        small = ~(np.abs(piv) > _PIVOT_TOL * scale)
        if np.any(small):
            k = int(np.argmax(small))
            raise FactorizationError(k, piv[k], scale)
    else:
        raise ValueError(f"unknown factorization method {method!r}")
    with np.errstate(divide="ignore"):
        ratio = np.abs(piv) / np.where(row_norms > 0, row_norms, 1.0)
    info["min_pivot_ratio"] = float(ratio.min()) if n else 1.0
    return ShiftedFactor(
        shift=None if shift is None else complex(shift),
        ordering=ordering,
        method=method,
        profile=info,
        _factors=factors,
        _n=n,
    )


def solve(factor: ShiftedFactor, rhs):
    return factor.solve(rhs)


def adjoint_solve(factor: ShiftedFactor, rhs):
    return factor.adjoint_solve(rhs)


class ShiftedFactorSet:
    """Factorizations of A - sigma_j B for several shifts, all on one RCM ordering.

    Parameters
    ----------
    pencil : SparsePencil
    shifts : sequence of complex
    method : {"band", "dense"}
    threads : int, optional
        Worker threads for the independent factorizations; defaults to ZOLOEIG_THREADS.
    """

    def __init__(self, pencil: SparsePencil, shifts, method: str = "band", threads: int | None = None):
        self.pencil = pencil
        self.shifts = np.array([complex(s) for s in shifts])
        union = assemble_shifted(pencil, 1.0 + 1.0j)
        self.ordering = reorder_rcm(union) if method == "band" else np.arange(pencil.n)
        nthreads = thread_count(threads)

        def work(s):
            return factorize(assemble_shifted(pencil, s), self.ordering, method=method, shift=s)

        if nthreads > 1 and len(self.shifts) > 1:
            with ThreadPoolExecutor(max_workers=nthreads) as pool:
                self.factors = list(pool.map(work, self.shifts))
        else:
            self.factors = [work(s) for s in self.shifts]

    def __len__(self) -> int:
        return len(self.factors)

    def __getitem__(self, j: int) -> ShiftedFactor:
        return self.factors[j]

    def __iter__(self):
        return iter(self.factors)
