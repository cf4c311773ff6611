"""Test problems (a 3D Hamiltonian with Gaussian wells) and Matrix Market I/O."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .sparse_linalg import SparseHermitian, SparsePencil

__all__ = [
    "Well",
    "HamiltonianSpec",
    "MatrixMarketError",
    "gen_hamiltonian",
    "hamiltonian_potential",
    "screen_hamiltonian",
    "read_matrix_market",
    "write_matrix_market",
]

WELL_RADIUS = 0.2
N_WELLS = 3


@dataclass(frozen=True)
class Well:
    center: tuple[float, float, float]
    depth: float


@dataclass(frozen=True)
class HamiltonianSpec:
    """Grid size and potential wells of H = -(1/2) Laplacian + V on the unit cube.

    ``wells = None`` draws three wells from ``seed``: centres uniform in [0, 1)^3
    and depths uniform in (0, 1].  Pass ``wells=()`` for the free Laplacian.
    """

    n: int
    seed: int = 0
    wells: tuple | None = None
    radius: float = WELL_RADIUS

    def __post_init__(self):
        if not (4 <= self.n <= 64):
            raise ValueError(f"grid size n must lie in [4, 64], got {self.n}")

    @property
    def size(self) -> int:
        return self.n**3

    def resolved_wells(self) -> tuple:
        if self.wells is not None:
            return tuple(self.wells)
        rng = np.random.default_rng(self.seed)
        out = []
        for _ in range(N_WELLS):
            center = tuple(float(c) for c in rng.random(3))
            depth = 1.0 - float(rng.random())
            out.append(Well(center, depth))
        return tuple(out)


def hamiltonian_potential(spec: HamiltonianSpec) -> np.ndarray:
    """V at the interior grid points i h (i = 1..n), flattened in C order (z fastest)."""
    n = spec.n
    h = 1.0 / (n + 1)
    g = h * np.arange(1, n + 1)
    x, y, z = np.meshgrid(g, g, g, indexing="ij")
    v = np.zeros_like(x)
    for w in spec.resolved_wells():
        cx, cy, cz = w.center
        d2 = (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2
        v -= w.depth * np.exp(-d2 / (2.0 * spec.radius**2))
    return v.ravel()


def gen_hamiltonian(spec: HamiltonianSpec) -> SparsePencil:
    """Standard pencil (H, I) with the 7-point Dirichlet Laplacian, spacing 1/(n+1)."""
    n = spec.n
    h = 1.0 / (n + 1)
    t = sp.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")
    eye = sp.identity(n, format="csr")
    lap = sp.kron(sp.kron(t, eye), eye) + sp.kron(sp.kron(eye, t), eye) + sp.kron(sp.kron(eye, eye), t)
    a = (0.5 / h**2) * lap + sp.diags(hamiltonian_potential(spec))
    return SparsePencil(SparseHermitian(a.tocsr()))


def screen_hamiltonian(n: int, seed: int, nev: int, gap_range=(1e-4, 1e-3), max_tries: int = 200):
    """Draw potentials until the lowest ``nev`` eigenvalues have a relative eigengap in ``gap_range``.

    Candidate seeds come from a generator seeded with ``seed``.  The eigengap is
    (l_{nev+1} - l_nev) / (l_nev - l_1) from a dense LAPACK eigensolve of the
    lowest nev + 1 eigenvalues.

    Returns
    -------
    spec, pencil, gap, tries
    """
    lo, hi = gap_range
    rng = np.random.default_rng(seed)
    for tries in range(1, max_tries + 1):
        sub = int(rng.integers(0, 2**31 - 1))
        spec = HamiltonianSpec(n=n, seed=sub)
        pencil = gen_hamiltonian(spec)
        lam = sla.eigh(pencil.a_mat.to_dense(), eigvals_only=True, subset_by_index=[0, nev])
        gap = (lam[nev] - lam[nev - 1]) / (lam[nev - 1] - lam[0])
        if lo <= gap <= hi:
            return spec, pencil, float(gap), tries
    raise RuntimeError(f"no potential with relative eigengap in [{lo:g}, {hi:g}] after {max_tries} draws")


class MatrixMarketError(ValueError):
    """Malformed Matrix Market input; ``line`` is 1-based."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


_FIELDS = ("real", "complex", "integer", "pattern")
_SYMMETRIES = ("general", "symmetric", "hermitian", "skew-symmetric")


def read_matrix_market(path, check: bool = True) -> SparseHermitian:
    """Read a coordinate Matrix Market file into a SparseHermitian.

    Symmetric, Hermitian and skew-symmetric files store one triangle, which is
    expanded.  Comment lines are kept on ``matrix.comments``.
    """
    path = Path(path)
    with path.open() as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError(path, 1, "empty file")
    head = lines[0].split()
    if len(head) != 5 or head[0].lower() != "%%matrixmarket" or head[1].lower() != "matrix":
        raise MatrixMarketError(path, 1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'")
    fmt, fld, sym = (x.lower() for x in head[2:])
    if fmt != "coordinate":
        raise MatrixMarketError(path, 1, f"unsupported format {fmt!r}; only coordinate is read")
    if fld not in _FIELDS:
        raise MatrixMarketError(path, 1, f"unknown field {fld!r}")
    if sym not in _SYMMETRIES:
        raise MatrixMarketError(path, 1, f"unknown symmetry {sym!r}")

    comments = []
    i = 1
    while i < len(lines) and (lines[i].startswith("%") or not lines[i].strip()):
        if lines[i].startswith("%"):
            comments.append(lines[i][1:].strip())
        i += 1
    if i >= len(lines):
        raise MatrixMarketError(path, i + 1, "missing size line")
    try:
        nrows, ncols, nnz = (int(t) for t in lines[i].split())
    except ValueError:
        raise MatrixMarketError(path, i + 1, f"bad size line {lines[i]!r}") from None
    if nrows != ncols:
        raise MatrixMarketError(path, i + 1, f"matrix must be square, got {nrows}x{ncols}")

    ntok = {"pattern": 2, "complex": 4}.get(fld, 3)
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=complex if fld == "complex" else float)
    k = 0
    for lineno in range(i + 2, len(lines) + 1):
        text = lines[lineno - 1].strip()
        if not text or text.startswith("%"):
            continue
        if k >= nnz:
            raise MatrixMarketError(path, lineno, f"more than the declared {nnz} entries")
        tok = text.split()
        if len(tok) != ntok:
            raise MatrixMarketError(path, lineno, f"expected {ntok} fields, got {len(tok)}")
        try:
            r, c = int(tok[0]), int(tok[1])
            if fld == "pattern":
                v = 1.0
            elif fld == "complex":
                v = complex(float(tok[2]), float(tok[3]))
            else:
                v = float(tok[2])
        except ValueError:
            raise MatrixMarketError(path, lineno, f"unparsable entry {text!r}") from None
        if not (1 <= r <= nrows and 1 <= c <= ncols):
            raise MatrixMarketError(path, lineno, f"index ({r}, {c}) outside {nrows}x{ncols}")
        if sym != "general" and c > r:
            raise MatrixMarketError(path, lineno, f"entry ({r}, {c}) above the diagonal in a {sym} file")
        if sym == "skew-symmetric" and c == r:
            raise MatrixMarketError(path, lineno, "diagonal entry in a skew-symmetric file")
        rows[k], cols[k], vals[k] = r - 1, c - 1, v
        k += 1
    if k != nnz:
        raise MatrixMarketError(path, len(lines), f"declared {nnz} entries, found {k}")

    if sym != "general":
        off = rows != cols
        mirror = {"symmetric": vals[off], "hermitian": np.conj(vals[off]), "skew-symmetric": -vals[off]}[sym]
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, mirror]),
        )
    m = sp.csr_matrix((vals, (rows, cols)), shape=(nrows, ncols))
    return SparseHermitian(m, check=check, comments=comments)


def write_matrix_market(path, matrix, comments=None, symmetry: str | None = None) -> Path:
    """Write a SparseHermitian (or scipy matrix) in coordinate format.

    By default the lower triangle is stored with the ``symmetric`` (real) or
    ``hermitian`` (complex) qualifier.  Values use ``repr`` so reading the
    file back reproduces them bit for bit.
    """
    if isinstance(matrix, SparseHermitian):
        csr = matrix.csr
        comments = list(matrix.comments) + list(comments or [])
    else:
        csr = sp.csr_matrix(matrix)
        comments = list(comments or [])
    cplx = np.iscomplexobj(csr.data)
    if symmetry is None:
        symmetry = "hermitian" if cplx else "symmetric"
    if symmetry not in ("general", "symmetric", "hermitian"):
        raise ValueError(f"unsupported symmetry {symmetry!r}")
    coo = csr.tocoo()
    order = np.lexsort((coo.row, coo.col))
    r, c, v = coo.row[order], coo.col[order], coo.data[order]
    if symmetry != "general":
        low = r >= c
        r, c, v = r[low], c[low], v[low]
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {'complex' if cplx else 'real'} {symmetry}\n")
        for line in comments:
            fh.write(f"% {line}\n" if line else "%\n")
        fh.write(f"{csr.shape[0]} {csr.shape[1]} {len(v)}\n")
        if cplx:
            for i, j, x in zip(r, c, v):
                fh.write(f"{i + 1} {j + 1} {float(x.real)!r} {float(x.imag)!r}\n")
        else:
            for i, j, x in zip(r, c, v):
                fh.write(f"{i + 1} {j + 1} {float(x)!r}\n")
    return path
