"""Filtered subspace iteration for the eigenpairs of a pencil inside (a, b)."""
from __future__ import annotations

import json
import math
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .filter_design import FilterDesign, SpectralWindow, build_filter_design, choose_order
from .filter_engine import FilterOperator
from .reference import jacobi_eigh
from .sparse_linalg import SparsePencil

__all__ = [
    "SolveConfig",
    "SolveStats",
    "EigResult",
    "RankDeficientSubspace",
    "subspace_iteration",
    "rayleigh_ritz",
    "relative_residual",
    "relative_eigengap",
    "mgs_orthonormalize",
    "solve_count",
    "window_from_spectrum",
    "window_for_lowest",
    "write_vectors",
    "read_vectors",
    "VECTOR_MAGIC",
]

VECTOR_MAGIC = b"ZEIGVEC1"
_VECTOR_TAGS = {1: np.dtype("<f8"), 2: np.dtype("<c16")}
# relative threshold on the eigenvalues of Y^H B Y below which a direction is dropped
_RANK_TOL = 1e-14


class RankDeficientSubspace(np.linalg.LinAlgError):
    """The filtered block lost rank below the number of wanted eigenpairs."""


@dataclass
class SolveConfig:
    """Inputs of the subspace iteration.

    ``r = None`` selects the filter order automatically so that the Goncar
    bound is below ``filter_eps`` (``tol`` when unset).
    """

    n_lambda: int
    oversample_k: int = 1
    r: int | None = None
    tol: float = 1e-10
    max_subspace_iters: int = 5
    gmres_tol: float = 1e-12
    gmres_max: int = 50
    seed: int = 0
    filter_eps: float | None = None
    method: str = "band"
    threads: int | None = None

    def __post_init__(self):
        if self.n_lambda < 1:
            raise ValueError(f"n_lambda must be at least 1, got {self.n_lambda}")
        if self.oversample_k < 0:
            raise ValueError(f"oversample_k must be non-negative, got {self.oversample_k}")
        if self.max_subspace_iters < 1:
            raise ValueError("max_subspace_iters must be at least 1")

    @property
    def n_ss(self) -> int:
        return self.n_lambda + self.oversample_k


@dataclass
class SolveStats:
    """Cost accounting.

    ``n_solv`` is the bound solves_per_apply * n_ss * n_iter * n_gmres with
    n_gmres the largest per-iteration GMRES count; ``n_solv_exact`` is the
    tally of column solves actually performed.
    """

    n_ss: int
    n_iter: int = 0
    n_gmres: int = 0
    n_solv: int = 0
    n_solv_exact: int = 0
    solves_per_apply: int = 0
    gmres_per_iteration: list = field(default_factory=list)
    factorization_time: float = 0.0
    iteration_time: float = 0.0

    @property
    def total_time(self) -> float:
        return self.factorization_time + self.iteration_time

    def to_dict(self) -> dict:
        return {
            "n_ss": self.n_ss,
            "n_iter": self.n_iter,
            "n_gmres": self.n_gmres,
            "n_solv": self.n_solv,
            "n_solv_exact": self.n_solv_exact,
            "gmres_per_iteration": list(self.gmres_per_iteration),
            "t_fact_s": self.factorization_time,
            "t_iter_s": self.iteration_time,
            "t_total_s": self.total_time,
        }


@dataclass
class EigResult:
    lambdas: np.ndarray
    vectors: np.ndarray
    residual: float
    stats: SolveStats
    window: SpectralWindow
    r: int
    converged: bool
    design: FilterDesign | None = None

    def to_dict(self) -> dict:
        return {
            "lambdas": [float(x) for x in self.lambdas],
            "residual": float(self.residual),
            "converged": bool(self.converged),
            "stats": self.stats.to_dict(),
            "window": self.window.to_dict(),
            "r": self.r,
        }

    def write_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        return path


def solve_count(solves_per_apply: int, n_ss: int, n_iter: int, n_gmres: int) -> int:
    """Linear solves when every column runs n_gmres GMRES steps in each iteration."""
    return int(solves_per_apply) * int(n_ss) * int(n_iter) * int(n_gmres)


def mgs_orthonormalize(y: np.ndarray) -> np.ndarray:
    """Columns of ``y`` orthonormalized by modified Gram-Schmidt (two passes)."""
    q = np.array(y, dtype=np.result_type(y.dtype, float), copy=True)
    k = q.shape[1]
    for j in range(k):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= (q[:, i].conj() @ q[:, j]) * q[:, i]
        nrm = np.linalg.norm(q[:, j])
        if nrm == 0.0:
            raise RankDeficientSubspace(f"column {j} is linearly dependent on the previous ones")
        q[:, j] /= nrm
    return q


def rayleigh_ritz(y: np.ndarray, pencil: SparsePencil, rank_tol: float = _RANK_TOL):
    """Ritz values and coefficient block of the pencil projected onto span(Y).

    Directions of Y^H B Y with eigenvalue below ``rank_tol`` times the largest are
    discarded, so the returned block may have fewer than ``Y.shape[1]`` columns.

    Returns
    -------
    theta : ndarray
        Ascending Ritz values.
    qt : ndarray
        Coefficients with qt^H (Y^H B Y) qt = I; Ritz vectors are Y @ qt.
    """
    y = np.asarray(y)
    ay = pencil.apply_a(y)
    by = pencil.apply_b(y)
    at = y.conj().T @ ay
    bt = y.conj().T @ by
    at = 0.5 * (at + at.conj().T)
    bt = 0.5 * (bt + bt.conj().T)
    d, u = jacobi_eigh(bt)
    dmax = d.max() if d.size else 0.0
    if not dmax > 0.0:
        raise RankDeficientSubspace("projected B matrix is not positive definite")
    keep = d > rank_tol * dmax
    w = u[:, keep] / np.sqrt(d[keep])
    # standard problem on the retained B-orthonormal directions
    c = w.conj().T @ at @ w
    theta, z = jacobi_eigh(0.5 * (c + c.conj().T))
    return theta, w @ z


def relative_residual(pencil: SparsePencil, lambdas, vectors, window: SpectralWindow) -> float:
    """max_i ||A x_i - lambda_i B x_i|| / (max(|a|, |b|) ||B x_i||)."""
    lambdas = np.asarray(lambdas, dtype=float)
    x = np.asarray(vectors)
    if x.ndim == 1:
        x = x[:, None]
    if lambdas.size == 0:
        return 0.0
    scale = max(abs(window.a), abs(window.b))
    if scale == 0.0:
        scale = 1.0
    ax = pencil.apply_a(x)
    bx = pencil.apply_b(x)
    num = np.linalg.norm(ax - bx * lambdas, axis=0)
    den = scale * np.linalg.norm(bx, axis=0)
    return float(np.max(num / den))


def relative_eigengap(window: SpectralWindow) -> float:
    """min gap width over the inner width b- - a+; an infinite gap defers to the other."""
    inner = window.b_minus - window.a_plus
    if not inner > 0.0:
        raise ValueError("relative eigengap needs b_minus > a_plus")
    widths = [w for w in (window.a_plus - window.a_minus, window.b_plus - window.b_minus) if math.isfinite(w)]
    if not widths:
        raise ValueError("both eigengaps are unbounded")
    return min(widths) / inner


def window_from_spectrum(lambdas, a: float, b: float) -> SpectralWindow:
    """Exact eigengaps around (a, b) from a known spectrum (test problems only)."""
    lam = np.sort(np.asarray(lambdas, dtype=float))
    inside = lam[(lam > a) & (lam < b)]
    if inside.size == 0:
        raise ValueError(f"no eigenvalue inside ({a}, {b})")
    below = lam[lam <= a]
    above = lam[lam >= b]
    am = below[-1] if below.size else -math.inf
    bp = above[0] if above.size else math.inf
    return SpectralWindow(a, b, am, inside[0], inside[-1], bp)


def window_for_lowest(lambdas, k: int) -> SpectralWindow:
    """Window (-inf, l_1, l_k, l_{k+1}) enclosing the k smallest eigenvalues."""
    lam = np.sort(np.asarray(lambdas, dtype=float))
    if not (1 <= k < lam.size):
        raise ValueError(f"k must lie in [1, {lam.size - 1}], got {k}")
    return SpectralWindow.from_gaps(-math.inf, lam[0], lam[k - 1], lam[k])


def _random_block(rng: np.random.Generator, n: int, k: int, complex_: bool) -> np.ndarray:
    y = rng.standard_normal((n, k))
    if complex_:
        y = y + 1j * rng.standard_normal((n, k))
    return y


def subspace_iteration(
    pencil: SparsePencil,
    window: SpectralWindow,
    config: SolveConfig,
    design: FilterDesign | None = None,
) -> EigResult:
    """Eigenpairs of the pencil inside (window.a, window.b).

    Each iteration filters the block with R_ab(B^{-1}A), extracts Ritz pairs,
    and stops once every Ritz pair inside (a, b) has relative residual at most
    ``config.tol`` (or after ``config.max_subspace_iters`` iterations, in which
    case the result is flagged unconverged).

    Raises
    ------
    RankDeficientSubspace
        If the filtered block spans fewer than ``n_lambda`` directions; a larger
        oversampling or a tighter GMRES tolerance usually helps.
    """
    n = pencil.n
    n_ss = config.n_ss
    if n_ss > n:
        raise ValueError(f"subspace size {n_ss} exceeds the dimension {n}")
    pencil.check_definite()
    if design is None:
        r = config.r if config.r is not None else choose_order(window, config.filter_eps or config.tol)
        design = build_filter_design(window, r)
    t0 = time.perf_counter()
    op = FilterOperator(design, pencil, method=config.method, threads=config.threads)
    t_fact = time.perf_counter() - t0

    rng = np.random.default_rng(config.seed)
    cplx = not pencil.is_real
    q = mgs_orthonormalize(_random_block(rng, n, n_ss, cplx))
    stats = SolveStats(n_ss=n_ss, factorization_time=t_fact, solves_per_apply=op.solves_per_apply(not cplx))

    t1 = time.perf_counter()
    converged = False
    residual = math.inf
    lam_in = np.zeros(0)
    x_in = np.zeros((n, 0))
    for it in range(1, config.max_subspace_iters + 1):
        y, report = op.apply_filter(q, gmres_tol=config.gmres_tol, gmres_max=config.gmres_max)
        stats.gmres_per_iteration.append(report.max_iterations)
        theta, qt = rayleigh_ritz(y, pencil)
        if len(theta) < config.n_lambda:
            raise RankDeficientSubspace(
                f"filtered subspace has rank {len(theta)} < n_lambda = {config.n_lambda}; "
                "increase the oversampling or tighten the GMRES tolerance"
            )
        x = y @ qt
        inside = (theta > window.a) & (theta < window.b)
        lam_in, x_in = theta[inside], x[:, inside]
        residual = relative_residual(pencil, lam_in, x_in, window) if lam_in.size else math.inf
        stats.n_iter = it
        if residual <= config.tol:
            converged = True
            break
        if x.shape[1] < n_ss:
            # refill dropped directions with fresh random columns
            x = np.hstack([x, _random_block(rng, n, n_ss - x.shape[1], cplx)])
        q = mgs_orthonormalize(x)
    stats.iteration_time = time.perf_counter() - t1
    stats.n_gmres = max(stats.gmres_per_iteration)
    stats.n_solv = solve_count(stats.solves_per_apply, n_ss, stats.n_iter, stats.n_gmres)
    stats.n_solv_exact = op.counters.inner_solves

    order = np.argsort(lam_in)
    return EigResult(
        lambdas=lam_in[order],
        vectors=x_in[:, order],
        residual=residual,
        stats=stats,
        window=window,
        r=design.r,
        converged=converged,
        design=design,
    )


def write_vectors(path, vectors: np.ndarray) -> Path:
    """Binary block: magic, little-endian uint64 n, k, tag (1 real, 2 complex), column-major data."""
    x = np.asarray(vectors)
    if x.ndim == 1:
        x = x[:, None]
    tag = 2 if np.iscomplexobj(x) else 1
    x = x.astype(_VECTOR_TAGS[tag])
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(VECTOR_MAGIC)
        fh.write(struct.pack("<QQQ", x.shape[0], x.shape[1], tag))
        fh.write(x.tobytes(order="F"))
    return path


def read_vectors(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:8] != VECTOR_MAGIC:
        raise ValueError(f"{path}: not an eigenvector file (bad magic)")
    n, k, tag = struct.unpack("<QQQ", data[8:32])
    if tag not in _VECTOR_TAGS:
        raise ValueError(f"{path}: unknown scalar tag {tag}")
    dt = _VECTOR_TAGS[tag]
    payload = data[32:]
    if len(payload) != n * k * dt.itemsize:
        raise ValueError(f"{path}: payload size {len(payload)} does not match {n}x{k} {dt}")
    return np.frombuffer(payload, dtype=dt).reshape((n, k), order="F").copy()
