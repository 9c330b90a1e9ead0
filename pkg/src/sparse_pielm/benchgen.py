"""Deterministic generators for benchmark matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sparse import SparseMatrix, sparsify


@dataclass(frozen=True)
class HardMatrixSpec:
    """Low-rank-plus-sparse-noise matrix with a slowly decaying spectrum.

    The clean part has singular values sigma_i = i^{-1/2} for i = 1..rank on
    random orthonormal factors; ``eps`` scales an additional sparse Gaussian
    perturbation with expected fill ``rho``. Small gaps between the leading
    singular values make this family slow to converge without
    reorthogonalization.
    """

    m: int
    n: int
    rank: int
    eps: float = 1e-3
    rho: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("matrix dimensions must be positive")
        if not 1 <= self.rank <= min(self.m, self.n):
            raise ValueError(f"rank must lie in [1, {min(self.m, self.n)}]")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")

    def fields(self) -> dict:
        return {
            "kind": "hard",
            "m": self.m,
            "n": self.n,
            "rank": self.rank,
            "eps": self.eps,
            "rho": self.rho,
            "seed": self.seed,
        }


def gen_hard(spec: HardMatrixSpec) -> SparseMatrix:
    """Build the matrix described by ``spec``; same spec, same matrix, always.

    The orthonormal factors are drawn before any noise, so two specs differing
    only in ``eps``/``rho`` share the identical clean part.
    """
    rng = np.random.default_rng(spec.seed)
    U, _ = np.linalg.qr(rng.standard_normal((spec.m, spec.rank)))
    V, _ = np.linalg.qr(rng.standard_normal((spec.n, spec.rank)))
    s = np.arange(1, spec.rank + 1, dtype=np.float64) ** -0.5
    A = (U * s) @ V.T
    if spec.eps > 0.0 and spec.rho > 0.0:
        mask = rng.random((spec.m, spec.n)) < spec.rho
        noise = rng.standard_normal((spec.m, spec.n))
        A = A + spec.eps * (noise * mask)
    return sparsify(A, 0.0)


def gen_random_sparse(m: int, n: int, density: float, seed: int = 0) -> SparseMatrix:
    """Uniformly placed standard-normal entries with an exact nonzero count.

    The number of stored entries is round(m * n * density); positions are
    sampled without replacement, so the realized density matches the request
    up to rounding.
    """
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    total = m * n
    nnz = int(round(total * density))
    rng = np.random.default_rng(seed)
    if nnz == 0:
        return SparseMatrix(m, n, np.zeros(m + 1, dtype=np.int64), [], [])
    # rejection sampling keeps memory at O(nnz) instead of O(m*n)
    chosen = np.empty(0, dtype=np.int64)
    while chosen.size < nnz:
        extra = rng.integers(0, total, size=(nnz - chosen.size) + (nnz // 4) + 16)
        chosen = np.unique(np.concatenate([chosen, extra]))
    if chosen.size > nnz:
        chosen = rng.choice(chosen, size=nnz, replace=False)
    vals = rng.standard_normal(nnz)
    vals[vals == 0.0] = 1.0  # explicit zeros are not storable
    return SparseMatrix.from_coo(m, n, chosen // n, chosen % n, vals)


def write_sidecar(path, fields: dict) -> None:
    """Write generator settings as flat key=value lines next to the matrix."""
    with open(path, "w") as fh:
        for key, val in fields.items():
            fh.write(f"{key} = {val}\n")
