"""Shared fixtures and oracle helpers for the test suite.

Oracles here are deliberately independent of the package under test: they use
plain numpy/scipy routines (dense SVD, dense products, explicit Gram-Schmidt)
so that agreement between the two is meaningful evidence of correctness.
"""

from __future__ import annotations

import numpy as np
import pytest

from sparse_pielm.sparse import SparseMatrix


def dense_of(A: SparseMatrix) -> np.ndarray:
    return A.scipy_csr().toarray()


def random_sparse(m: int, n: int, density: float, seed: int) -> SparseMatrix:
    """Random sparse matrix built directly from numpy, bypassing benchgen."""
    rng = np.random.default_rng(seed)
    mask = rng.random((m, n)) < density
    dense = np.where(mask, rng.standard_normal((m, n)), 0.0)
    rows, cols = np.nonzero(dense)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    offsets = np.zeros(m + 1, dtype=np.int64)
    np.add.at(offsets, rows + 1, 1)
    offsets = np.cumsum(offsets)
    return SparseMatrix(m, n, offsets, cols, dense[rows, cols])


def dense_svd_oracle(dense: np.ndarray):
    """Reference SVD via LAPACK on the dense array."""
    U, s, Vt = np.linalg.svd(dense, full_matrices=False)
    return U, s, Vt


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
