"""Matrix application of the composed filter.

The inner function G = Zhat(T(B^{-1}A)) is applied through r pre-factorized
shifted matrices K_j = A - s_j B (pole form), and the outer Zolotarev function
of G through 2r shifted systems (G +- i sqrt(c_j) I) x = V solved by one
multishift GMRES call.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .filter_design import FilterDesign
from .krylov import ShiftedSolveReport, multishift_gmres
from .sparse_linalg import ShiftedFactorSet, SparsePencil, thread_count

__all__ = ["FilterCounters", "FilterOperator", "apply_g", "apply_filter"]


@dataclass
class FilterCounters:
    """Running tallies; all counts are per right-hand-side column.

    ``inner_solves`` counts one column solved with one K_j (or its adjoint).
    """

    g_applications: int = 0
    inner_solves: int = 0
    filter_applications: int = 0
    gmres_iterations: list = field(default_factory=list)

    def snapshot(self) -> dict:
        return {
            "g_applications": self.g_applications,
            "inner_solves": self.inner_solves,
            "filter_applications": self.filter_applications,
            "gmres_iterations": list(self.gmres_iterations),
        }


class FilterOperator:
    """R_ab(B^{-1}A) for one design and pencil, with its factorizations.

    Parameters
    ----------
    design : FilterDesign
    pencil : SparsePencil
    factors : ShiftedFactorSet, optional
        Reused if given; must be built on ``design.poles``.
    method : {"band", "dense"}
        Factorization route when ``factors`` is not supplied.
    threads : int, optional
        Worker threads for the per-pole solves (default ZOLOEIG_THREADS).
    """

    def __init__(
        self,
        design: FilterDesign,
        pencil: SparsePencil,
        factors: ShiftedFactorSet | None = None,
        method: str = "band",
        threads: int | None = None,
    ):
        self.design = design
        self.pencil = pencil
        if factors is None:
            factors = ShiftedFactorSet(pencil, design.poles, method=method, threads=threads)
        elif not np.array_equal(np.asarray(factors.shifts), np.asarray(design.poles, dtype=complex)):
            raise ValueError("factor shifts do not match the design poles")
        self.factors = factors
        self.threads = thread_count(threads)
        self.counters = FilterCounters()
        self._lock = threading.Lock()

    @property
    def b_mat(self):
        return self.pencil.b_mat

    @property
    def n(self) -> int:
        return self.pencil.n

    @property
    def r(self) -> int:
        return self.design.r

    def solves_per_apply(self, real_input: bool = True) -> int:
        """Inner solves per column per G application: r on the real path, 2r otherwise."""
        return self.r if (self.pencil.is_real and real_input) else 2 * self.r

    def _count(self, **inc):
        with self._lock:
            for k, v in inc.items():
                setattr(self.counters, k, getattr(self.counters, k) + v)

    def apply_g(self, v):
        """G V = c0 V + Mhat sum_j (w_j K_j^{-1} B V + conj(w_j) K_j^{-H} B V)."""
        v = np.asarray(v)
        if v.shape[0] != self.n:
            raise ValueError(f"dimension mismatch: operator is {self.n}, block has {v.shape[0]} rows")
        d = self.design
        real = self.pencil.is_real and v.dtype.kind != "c"
        bv = self.pencil.apply_b(v)
        ncols = 1 if v.ndim == 1 else v.shape[1]

        def term(j):
            f = self.factors[j]
            w = d.weights[j]
            if real:
                return 2.0 * (w * f.solve(bv)).real
            return w * f.solve(bv) + np.conj(w) * f.adjoint_solve(bv)

        if self.threads > 1 and self.r > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                parts = list(pool.map(term, range(self.r)))
        else:
            parts = [term(j) for j in range(self.r)]
        acc = parts[0]
        for p in parts[1:]:
            acc = acc + p
        self._count(g_applications=ncols, inner_solves=ncols * (self.r if real else 2 * self.r))
        return d.constant_term * v + d.inner_mhat * acc

    def apply_filter(self, v, gmres_tol: float = 1e-12, gmres_max: int = 50) -> tuple[np.ndarray, ShiftedSolveReport]:
        """R_ab(B^{-1}A) V from the 2r outer shifted systems in G."""
        v = np.asarray(v)
        d = self.design
        shifts = d.outer_shifts
        xs, report = multishift_gmres(self.apply_g, shifts, v, tol=gmres_tol, max_iter=gmres_max)
        r = d.r
        acc = np.zeros(xs.shape[1:], dtype=complex)
        for j in range(r):
            acc += 0.5 * d.outer_a[j] * (xs[j] + xs[j + r])
        out = 0.5 * d.outer.big_m * acc + 0.5 * v
        if self.pencil.is_real and v.dtype.kind != "c":
            out = out.real
        with self._lock:
            self.counters.filter_applications += 1
            self.counters.gmres_iterations.append(report.max_iterations)
        return out, report


def apply_g(op: FilterOperator, v):
    return op.apply_g(v)


def apply_filter(op: FilterOperator, v, gmres_tol: float = 1e-12, gmres_max: int = 50):
    return op.apply_filter(v, gmres_tol=gmres_tol, gmres_max=gmres_max)
