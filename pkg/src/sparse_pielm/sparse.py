"""Validated CSR sparse matrices, products, and spectral diagnostics."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


class SparseFormatError(ValueError):
    """Raised when CSR arrays or a coordinate file violate the storage contract."""


def _as_1d(a, dtype, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != 1:
        raise SparseFormatError(f"{name} must be one-dimensional")
    return arr


class SparseMatrix:
    """Immutable CSR matrix with validated structure.

    Stored as ``row_offsets`` (length nrows+1, non-decreasing), ``col_indices``
    (strictly increasing within each row) and ``values`` (no explicit zeros).
    Products are delegated to a cached scipy CSR handle; both forward and
    transpose products use a fixed sequential reduction order, so repeated
    calls are bit-identical.
    """

    __slots__ = ("nrows", "ncols", "row_offsets", "col_indices", "values", "_csr")

    def __init__(self, nrows: int, ncols: int, row_offsets, col_indices, values):
        nrows = int(nrows)
        ncols = int(ncols)
        if nrows < 0 or ncols < 0:
            raise SparseFormatError("matrix dimensions must be non-negative")
        row_offsets = _as_1d(row_offsets, np.int64, "row_offsets")
        col_indices = _as_1d(col_indices, np.int64, "col_indices")
        vals = _as_1d(values, np.float64, "values")

        if row_offsets.shape[0] != nrows + 1:
            raise SparseFormatError("row_offsets must have length nrows + 1")
        if row_offsets[0] != 0 or row_offsets[-1] != col_indices.shape[0]:
            raise SparseFormatError("row_offsets must start at 0 and end at nnz")
        if np.any(np.diff(row_offsets) < 0):
            raise SparseFormatError("row_offsets must be non-decreasing")
        if col_indices.shape[0] != vals.shape[0]:
            raise SparseFormatError("col_indices and values must have equal length")
        if col_indices.size:
            if col_indices.min() < 0 or col_indices.max() >= ncols:
                raise SparseFormatError("column index out of range")
            # strictly increasing inside each row, checked without a Python loop:
            # pair (i, i+1) lies within one row iff position i+1 starts no new row
            nnz = col_indices.shape[0]
            starts = np.zeros(nnz + 1, dtype=bool)
            starts[row_offsets[1:-1]] = True
            intra = ~starts[1:nnz]
            if np.any(np.diff(col_indices)[intra] <= 0):
                raise SparseFormatError("column indices must be strictly increasing within a row")
        if np.any(vals == 0.0):
            raise SparseFormatError("explicit zeros are not stored")
        if not np.all(np.isfinite(vals)):
            raise SparseFormatError("values must be finite")

        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        for name, arr in (("row_offsets", row_offsets), ("col_indices", col_indices), ("values", vals)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "_csr", None)

    def __setattr__(self, name, value):
        raise AttributeError("SparseMatrix is immutable")

    # -- basic queries ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    @property
    def density(self) -> float:
        cells = self.nrows * self.ncols
        return self.nnz / cells if cells else 0.0

    def scipy_csr(self) -> sp.csr_matrix:
        if self._csr is None:
            csr = sp.csr_matrix(
                (self.values, self.col_indices, self.row_offsets),
                shape=(self.nrows, self.ncols),
            )
            object.__setattr__(self, "_csr", csr)
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self.scipy_csr().toarray()

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def one_norm(self) -> float:
        """Maximum absolute column sum."""
        if self.nnz == 0:
            return 0.0
        sums = np.zeros(self.ncols)
        np.add.at(sums, self.col_indices, np.abs(self.values))
        return float(sums.max())

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_scipy(mat) -> "SparseMatrix":
        csr = sp.csr_matrix(mat, dtype=np.float64)
        csr.sum_duplicates()
        csr.sort_indices()
        csr.eliminate_zeros()
        return SparseMatrix(csr.shape[0], csr.shape[1], csr.indptr, csr.indices, csr.data)

    @staticmethod
    def from_coo(nrows: int, ncols: int, rows, cols, vals) -> "SparseMatrix":
        coo = sp.coo_matrix(
            (np.asarray(vals, dtype=np.float64), (np.asarray(rows), np.asarray(cols))),
            shape=(nrows, ncols),
        )
        return SparseMatrix.from_scipy(coo)


def sparsify(dense, drop_tol: float = 0.0) -> SparseMatrix:
    """Compress a dense matrix to CSR, discarding entries with ``|v| <= drop_tol``."""
    if drop_tol < 0:
        raise ValueError("drop_tol must be non-negative")
    M = np.asarray(dense, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError("expected a two-dimensional array")
    kept = np.where(np.abs(M) > drop_tol, M, 0.0)
    return SparseMatrix.from_scipy(sp.csr_matrix(kept))


def spmv(A: SparseMatrix, x) -> np.ndarray:
    """Sparse matrix times dense vector, y = A x."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.ncols,):
        raise ValueError(f"x has shape {x.shape}, expected ({A.ncols},)")
    return A.scipy_csr() @ x


def spmv_transpose(A: SparseMatrix, y) -> np.ndarray:
    """Transpose product x = A^T y by column accumulation; A^T is never formed."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (A.nrows,):
        raise ValueError(f"y has shape {y.shape}, expected ({A.nrows},)")
    # CSR viewed as CSC of the transpose: same arrays, zero copies.
    return A.scipy_csr().T @ y


# -- diagnostics ------------------------------------------------------------

DENSE_DIAGNOSTICS_CAP = 2000


@dataclass(frozen=True)
class MatrixDiagnostics:
    shape: tuple[int, int]
    nnz: int
    density: float
    numerical_rank: int
    condition_number: float
    min_singular: float
    max_singular: float
    spectrum_truncated: bool = False

    def rows(self) -> list[tuple[str, str]]:
        return [
            ("nrows", str(self.shape[0])),
            ("ncols", str(self.shape[1])),
            ("nnz", str(self.nnz)),
            ("density", repr(self.density)),
            ("numerical_rank", str(self.numerical_rank)),
            ("condition_number", repr(self.condition_number)),
            ("min_singular", repr(self.min_singular)),
            ("max_singular", repr(self.max_singular)),
            ("spectrum_truncated", str(bool(self.spectrum_truncated))),
        ]


def diagnose(
    A: SparseMatrix,
    rank_tol: float = 1e-12,
    dense_cap: int = DENSE_DIAGNOSTICS_CAP,
    krylov_k: int = 200,
) -> MatrixDiagnostics:
    """Shape, sparsity and singular-spectrum summary of a matrix.

    The full spectrum comes from a dense SVD when ``min(shape) <= dense_cap``.
    Above the cap only the leading ``krylov_k`` singular values are computed
    with the iterative solver, so rank and condition number are then relative
    to the computed part of the spectrum and ``spectrum_truncated`` is set.

    ``numerical_rank`` counts singular values above ``rank_tol * max_singular``;
    ``condition_number`` is ``max_singular / min_singular`` over the computed
    nonzero singular values.
    """
    if rank_tol < 0:
        raise ValueError("rank_tol must be non-negative")
    m, n = A.shape
    if min(m, n) == 0 or A.nnz == 0:
        return MatrixDiagnostics((m, n), A.nnz, A.density, 0, np.inf, 0.0, 0.0)

    truncated = False
    if min(m, n) <= dense_cap:
        sigma = np.linalg.svd(A.to_dense(), compute_uv=False)
    else:
        from .svd import SvdConfig, sparse_svd

        k = min(krylov_k, min(m, n))
        cfg = SvdConfig(k=k, num_wanted=k, mode="full", max_restarts=2)
        sigma = sparse_svd(A, cfg).sigma
        truncated = True

    return diagnostics_from_spectrum(A, sigma, rank_tol=rank_tol, spectrum_truncated=truncated)


def diagnostics_from_spectrum(
    A: SparseMatrix,
    sigma,
    rank_tol: float = 1e-12,
    spectrum_truncated: bool = False,
) -> MatrixDiagnostics:
    """Diagnostics record from an already computed singular spectrum."""
    sigma = np.sort(np.asarray(sigma, dtype=np.float64))[::-1]
    m, n = A.shape
    smax = float(sigma[0]) if sigma.size else 0.0
    if smax == 0.0:
        return MatrixDiagnostics((m, n), A.nnz, A.density, 0, np.inf, 0.0, 0.0, spectrum_truncated)
    rank = int(np.sum(sigma > rank_tol * smax))
    nonzero = sigma[sigma > 0.0]
    smin = float(nonzero[-1])
    return MatrixDiagnostics(
        (m, n), A.nnz, A.density, rank, smax / smin, smin, smax, spectrum_truncated
    )


def write_diagnostics_csv(diag: MatrixDiagnostics, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "value"])
        w.writerows(diag.rows())
