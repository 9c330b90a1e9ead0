"""Sparse SVD by Lanczos-Golub-Kahan bidiagonalization, truncated pseudoinverse
least squares, and Gaussian-windowed random-feature solvers for steady
convection-diffusion."""

from .benchgen import HardMatrixSpec, gen_hard, gen_random_sparse
from .bidiag import (
    BidiagFactorization,
    OrthoMode,
    default_start_vector,
    golub_kahan,
    lanczos_tridiag,
    orthogonality_defect,
)
from .estimators import LanczosSVD, SparsePIELM, TruncatedPinvRegressor
from .mmio import MatrixMarketError, read_matrix_market, write_matrix_market
from .pielm import (
    AssembledSystem,
    ConvDiffProblem,
    RfnnModel,
    assemble,
    error_metrics,
    exact_solution,
    feature_row,
    gaussian_encoding,
    init_model,
    make_problem,
    predict,
    train,
)
from .sparse import (
    MatrixDiagnostics,
    SparseFormatError,
    SparseMatrix,
    diagnose,
    sparsify,
    spmv,
    spmv_transpose,
)
from .svd import (
    RitzTriplets,
    SolveReport,
    SvdConfig,
    naive_svd,
    pinv_solve,
    ritz_from_bidiag,
    sparse_svd,
)

__version__ = "0.1.0"

__all__ = [
    "AssembledSystem",
    "BidiagFactorization",
    "ConvDiffProblem",
    "HardMatrixSpec",
    "LanczosSVD",
    "MatrixDiagnostics",
    "MatrixMarketError",
    "OrthoMode",
    "RfnnModel",
    "RitzTriplets",
    "SolveReport",
    "SparseFormatError",
    "SparseMatrix",
    "SparsePIELM",
    "SvdConfig",
    "TruncatedPinvRegressor",
    "assemble",
    "default_start_vector",
    "diagnose",
    "error_metrics",
    "exact_solution",
    "feature_row",
    "gaussian_encoding",
    "gen_hard",
    "gen_random_sparse",
    "golub_kahan",
    "init_model",
    "lanczos_tridiag",
    "make_problem",
    "naive_svd",
    "orthogonality_defect",
    "pinv_solve",
    "predict",
    "read_matrix_market",
    "ritz_from_bidiag",
    "sparse_svd",
    "sparsify",
    "spmv",
    "spmv_transpose",
    "train",
    "write_matrix_market",
]
