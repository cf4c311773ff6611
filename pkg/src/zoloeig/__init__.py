"""Interior eigenpairs of sparse Hermitian definite pencils by a composed Zolotarev filter."""
from .eigensolver import EigResult, SolveConfig, SolveStats, subspace_iteration
from .filter_design import FilterDesign, SpectralWindow, build_filter_design, choose_order
from .filter_engine import FilterOperator
from .problems_io import HamiltonianSpec, gen_hamiltonian, read_matrix_market, write_matrix_market
from .sparse_linalg import SparseHermitian, SparsePencil

__version__ = "0.1.0"

__all__ = [
    "EigResult",
    "SolveConfig",
    "SolveStats",
    "subspace_iteration",
    "FilterDesign",
    "SpectralWindow",
    "build_filter_design",
    "choose_order",
    "FilterOperator",
    "HamiltonianSpec",
    "gen_hamiltonian",
    "read_matrix_market",
    "write_matrix_market",
    "SparseHermitian",
    "SparsePencil",
    "__version__",
]
