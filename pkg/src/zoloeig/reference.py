"""Dense reference eigensolver for Hermitian definite pencils.

B = L L^H reduces A x = lambda B x to the standard problem C y = lambda y with
C = L^{-1} A L^{-H}, which is diagonalized by cyclic Jacobi rotations.  Each
sweep is split into n - 1 rounds of disjoint (p, q) pairs (round-robin
ordering), so the rotations of one round are applied simultaneously.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .filter_design import FilterDesign, eval_filter_scalar

__all__ = ["DenseEig", "dense_generalized_eig", "jacobi_eigh", "filter_of_matrix_oracle", "JACOBI_MAX_N"]

# above this size the oracle hands the standard problem to LAPACK
JACOBI_MAX_N = 512
_MAX_SWEEPS = 60


@dataclass(frozen=True)
class DenseEig:
    """Ascending eigenvalues and B-orthonormal eigenvectors of a dense pencil.

    ``b`` keeps the B used (None for the identity) so that B-inner products can
    be formed later.
    """

    lambdas: np.ndarray
    vectors: np.ndarray
    b: np.ndarray | None = None

    def b_apply(self, v):
        return v if self.b is None else self.b @ v


def _round_robin(n: int):
    """Pairings for n (even) players: n - 1 rounds of n/2 disjoint pairs."""
    players = np.arange(n)
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = players[:half]
        q = players[::-1][:half]
        rounds.append((p.copy(), q.copy()))
        players = np.concatenate([[players[0]], [players[-1]], players[1:-1]])
    return rounds


def jacobi_eigh(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = _MAX_SWEEPS):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ascending eigenvalues and a unitary matrix of eigenvectors.
    """
    a = np.array(a, dtype=complex if np.iscomplexobj(a) else float)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=a.dtype)
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=a.dtype)
    if n == 1:
        return a.diagonal().real.copy(), v
    m = n + (n % 2)
    if m != n:
        # a decoupled dummy row/column makes the pairing even
        pad = np.zeros((m, m), dtype=a.dtype)
        pad[:n, :n] = a
        pad[n, n] = 0.0
        a = pad
        v = np.eye(m, dtype=a.dtype)
    rounds = _round_robin(m)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), np.eye(n, dtype=a.dtype)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            mag = np.abs(apq)
            live = mag > 1e-300
            safe = np.where(live, mag, 1.0)
            tau = (a[q, q].real - a[p, p].real) / (2.0 * safe)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = np.where(live, 1.0 / np.sqrt(1.0 + t * t), 1.0)
            s = np.where(live, t * c, 0.0)
            # phase that makes the (p, q) entry real and positive
            u = np.where(live, apq.conj() / safe, 1.0)
            cu, su = c * u, s * u
            # columns: A <- A J with J[:, p] = (c, -s u), J[:, q] = (s, c u)
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = ap * c - aq * su
            a[:, q] = ap * s + aq * cu
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * su
            v[:, q] = vp * s + vq * cu
            # rows: A <- J^H A
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - su.conj()[:, None] * rq
            a[q, :] = s[:, None] * rp + cu.conj()[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
    w = a.diagonal().real[:n]
    v = v[:n, :n]
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def dense_generalized_eig(a_dense, b_dense=None, method: str = "auto") -> DenseEig:
    """All eigenpairs of the Hermitian definite pencil (A, B).

    Parameters
    ----------
    a_dense, b_dense : array_like
        Dense Hermitian A and Hermitian positive definite B (None for identity).
    method : {"auto", "jacobi", "lapack"}
        ``auto`` uses Jacobi up to JACOBI_MAX_N and LAPACK beyond.

    Raises
    ------
    ValueError
        If B is not positive definite or the inputs are not square.
    """
    a = np.asarray(a_dense)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"A must be square, got shape {a.shape}")
    if n > 2048:
        raise ValueError(f"dense reference limited to n <= 2048, got {n}")
    b = None if b_dense is None else np.asarray(b_dense)
    if b is not None and b.shape != a.shape:
        raise ValueError(f"dimension mismatch: A {a.shape}, B {b.shape}")
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_N else "lapack"
    if method not in ("jacobi", "lapack"):
        raise ValueError(f"unknown method {method!r}")

    if b is None:
        c = a
        chol = None
    else:
        try:
            chol = sla.cholesky(0.5 * (b + b.conj().T), lower=True)
        except np.linalg.LinAlgError:
            raise ValueError("B is not positive definite") from None
        tmp = sla.solve_triangular(chol, a, lower=True)
        c = sla.solve_triangular(chol, tmp.conj().T, lower=True).conj().T
    c = 0.5 * (c + c.conj().T)
    if method == "jacobi":
        w, y = jacobi_eigh(c)
    else:
        w, y = np.linalg.eigh(c)
    x = y if chol is None else sla.solve_triangular(chol, y, lower=True, trans="C")
    return DenseEig(lambdas=np.asarray(w, dtype=float), vectors=x, b=b)


def filter_of_matrix_oracle(design: FilterDesign, eig: DenseEig, v):
    """X R_ab(Lambda) X^H B V by spectral mapping."""
    v = np.asarray(v)
    vals = np.atleast_1d(eval_filter_scalar(design, eig.lambdas))
    x = eig.vectors
    coef = x.conj().T @ eig.b_apply(v)
    coef = vals[:, None] * coef if coef.ndim == 2 else vals * coef
    out = x @ coef
    if not np.iscomplexobj(v) and not np.iscomplexobj(x):
        out = out.real
    return out
