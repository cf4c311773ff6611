"""Multi-shift GMRES: one Arnoldi basis per right-hand side serves every shift.

K_m(G + sI, y) = K_m(G, y), so with G V_m = V_{m+1} H_m the shifted system
reduces to the small least-squares problem min || beta e_1 - (H_m + s I_ext) z ||
for each shift s.  Columns of the right-hand side are expanded together (the
operator sees one block per step) but each keeps its own basis and Hessenberg
matrix, and drops out of the block as soon as all of its shifts converge.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ShiftedSolveReport", "GMRESNotConverged", "multishift_gmres"]

_BREAKDOWN = 1e-13


@dataclass
class ShiftedSolveReport:
    """Per-column outcome of a multishift solve.

    Attributes
    ----------
    iterations : ndarray of int, shape (k,)
        Arnoldi steps m taken by each right-hand-side column.
    applications : ndarray of int, shape (k,)
        Operator applications per column; equals ``iterations``.
    residuals : ndarray, shape (k, n_shifts)
        Relative residual ||(G + sI)x - y|| / ||y|| from the projected problem.
    converged : ndarray of bool, shape (k, n_shifts)
    orthogonality : float
        max over columns of ||V^H V - I||_max for the final Arnoldi bases.
    """

    iterations: np.ndarray
    applications: np.ndarray
    residuals: np.ndarray
    converged: np.ndarray
    orthogonality: float = 0.0

    @property
    def max_iterations(self) -> int:
        return int(self.iterations.max()) if self.iterations.size else 0

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


class GMRESNotConverged(RuntimeError):
    """Raised when max_iter is reached with unconverged shifts; carries the partial result."""

    def __init__(self, message: str, solutions: np.ndarray, report: ShiftedSolveReport):
        super().__init__(message)
        self.solutions = solutions
        self.report = report


def _shifted_lstsq(h: np.ndarray, beta: float, shifts: np.ndarray):
    """Solve min ||beta e1 - (h + s I_ext) z|| for all shifts at once.

    ``h`` is (m+1, m).  Returns z with shape (n_shifts, m) and the residual norms.
    """
    m = h.shape[1]
    hs = np.broadcast_to(h, (len(shifts),) + h.shape).astype(complex)
    idx = np.arange(m)
    hs[:, idx, idx] += shifts[:, None]
    q, r = np.linalg.qr(hs, mode="complete")
    g = beta * q[:, 0, :].conj()
    z = np.linalg.solve(r[:, :m, :m], g[:, :m, None])[..., 0]
    return z, np.abs(g[:, m])


def multishift_gmres(apply_g, shifts, rhs, tol: float = 1e-12, max_iter: int = 50, raise_on_fail: bool = True):
    """Solve (G + s I) x = y for every shift s and every column y of ``rhs``.

    Parameters
    ----------
    apply_g : callable
        Maps an (n, k) block to G applied to it.
    shifts : sequence of complex
        Distinct shifts.
    rhs : ndarray, shape (n,) or (n, k)
    tol : float
        Relative residual target, met by every shift of a column before it stops.
    max_iter : int
        Cap on Arnoldi steps; there is no restart.
    raise_on_fail : bool
        Raise :class:`GMRESNotConverged` when the cap is hit.

    Returns
    -------
    solutions : ndarray, shape (n_shifts,) + rhs.shape
    report : ShiftedSolveReport
    """
    shifts = np.asarray([complex(s) for s in shifts])
    if len(shifts) == 0:
        raise ValueError("at least one shift is required")
    if len(np.unique(shifts)) != len(shifts):
        raise ValueError("shifts must be distinct")
    if max_iter < 1:
        raise ValueError(f"max_iter must be positive, got {max_iter}")
    rhs = np.asarray(rhs)
    vector = rhs.ndim == 1
    y = rhs[:, None] if vector else rhs
    n, k = y.shape
    ns = len(shifts)

    beta = np.linalg.norm(y, axis=0)
    iters = np.zeros(k, dtype=int)
    res = np.zeros((k, ns))
    conv = np.zeros((k, ns), dtype=bool)
    sol = np.zeros((ns, n, k), dtype=complex)
    ortho = 0.0

    active = np.nonzero(beta > 0)[0]
    conv[beta == 0] = True
    basis = None
    hess = np.zeros((k, max_iter + 1, max_iter), dtype=complex)

    def finish(c: int, m: int):
        nonlocal ortho
        h = hess[c, : m + 1, :m]
        if basis.dtype.kind != "c":
            h = h.real
        z, rnorm = _shifted_lstsq(h, beta[c], shifts)
        v = basis[:, c, :m]
        sol[:, :, c] = z @ v.T
        res[c] = rnorm / beta[c]
        conv[c] = res[c] <= tol
        iters[c] = m
        gram = v.conj().T @ v
        ortho = max(ortho, float(np.abs(gram - np.eye(m)).max()))

    step = 0
    while len(active) and step < max_iter:
        v_cur = (y[:, active] / beta[active]) if step == 0 else basis[:, active, step]
        w = np.asarray(apply_g(v_cur))
        if w.shape != v_cur.shape:
            raise ValueError(f"operator returned shape {w.shape}, expected {v_cur.shape}")
        if basis is None:
            dtype = np.result_type(y.dtype, w.dtype, float)
            basis = np.zeros((n, k, max_iter + 1), dtype=dtype)
            basis[:, active, 0] = y[:, active] / beta[active]
        elif basis.dtype.kind != "c" and w.dtype.kind == "c":
            basis = basis.astype(complex)
        w = w.astype(basis.dtype, copy=True)
        wnorm = np.linalg.norm(w, axis=0)

        vs = basis[:, active, : step + 1]
        hcol = np.zeros((len(active), step + 2), dtype=complex)
        # modified Gram-Schmidt followed by one reorthogonalization pass
        for _ in range(2):
            for t in range(step + 1):
                coef = np.einsum("ij,ij->j", vs[:, :, t].conj(), w)
                w -= vs[:, :, t] * coef
                hcol[:, t] += coef
        hnext = np.linalg.norm(w, axis=0)
        hcol[:, step + 1] = hnext
        hess[active, : step + 2, step] = hcol
        step += 1

        breakdown = hnext <= _BREAKDOWN * np.maximum(wnorm, 1e-300)
        safe = np.where(breakdown, 1.0, hnext)
        basis[:, active, step] = np.where(breakdown, 0.0, w / safe)

        done = []
        for i, c in enumerate(active):
            h = hess[c, : step + 1, :step]
            if basis.dtype.kind != "c":
                h = h.real
            if breakdown[i]:
                hess[c, step, step - 1] = 0.0
                finish(c, step)
                done.append(i)
                continue
            _, rnorm = _shifted_lstsq(h, beta[c], shifts)
            if np.all(rnorm <= tol * beta[c]):
                finish(c, step)
                done.append(i)
        active = np.delete(active, done)

    for c in active:
        finish(c, step)

    report = ShiftedSolveReport(
        iterations=iters.copy(),
        applications=iters.copy(),
        residuals=res,
        converged=conv,
        orthogonality=ortho,
    )
    solutions = sol[:, :, 0] if vector else sol
    if not report.all_converged and raise_on_fail:
        bad = int(np.sum(~conv.all(axis=1)))
        raise GMRESNotConverged(
            f"multishift GMRES: {bad} of {k} columns unconverged after {max_iter} iterations "
            f"(worst residual {res.max():.3e}, tol {tol:.1e})",
            solutions,
            report,
        )
    return solutions, report
