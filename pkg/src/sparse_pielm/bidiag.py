"""Lanczos-Golub-Kahan bidiagonalization with configurable reorthogonalization.

The factorization after k steps satisfies

    A V_k = U_k B_k
    A^T U_k = V_k B_k^T + beta_k * v_next e_k^T

with B_k upper bidiagonal (diagonal ``alpha``, superdiagonal ``beta[:-1]``) and
``beta[-1]`` the trailing coupling scalar. Without reorthogonalization the
computed bases lose orthogonality as singular values converge; ``full`` applies
classical Gram-Schmidt to both bases, ``one_sided`` only to the right basis.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .sparse import SparseMatrix, spmv, spmv_transpose

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class OrthoMode(str, Enum):
    NONE = "none"
    FULL = "full"
    ONE_SIDED = "one_sided"


def as_ortho_mode(mode) -> OrthoMode:
    """Coerce strings like 'one-sided' or 'full' to an OrthoMode."""
    if isinstance(mode, OrthoMode):
        return mode
    return OrthoMode(str(mode).strip().lower().replace("-", "_"))


@dataclass(frozen=True)
class BidiagFactorization:
    """Result of ``golub_kahan``.

    Attributes
    ----------
    U, V : ndarray
        Left (m x k) and right (n x k) Lanczos bases.
    alpha, beta : ndarray
        Non-negative recurrence scalars, both of length k. ``beta[:-1]`` is
        the superdiagonal of B_k; ``beta[-1]`` couples to ``v_next``.
    v_next : ndarray
        The (k+1)-th right vector (zero after a beta-breakdown).
    k : int
        Number of completed iterations; may be below the request on breakdown.
    breakdown_at : int or None
        1-based index of the recurrence scalar that fell below the breakdown
        tolerance, None if the full subspace was built.
    trace : tuple or None
        Per-iteration rows (j, alpha_j, beta_j, u_defect, v_defect) when
        tracing was requested.
    """

    U: np.ndarray
    V: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    v_next: np.ndarray
    k: int
    breakdown_at: int | None = None
    trace: tuple | None = None

    def bidiagonal(self) -> np.ndarray:
        """Dense k x k upper bidiagonal B_k."""
        B = np.diag(self.alpha)
        if self.k > 1:
            B[np.arange(self.k - 1), np.arange(1, self.k)] = self.beta[:-1]
        return B


def orthogonality_defect(Q: np.ndarray) -> float:
    """Frobenius norm of I - Q^T Q; zero for perfectly orthonormal columns."""
    Q = np.asarray(Q)
    if Q.ndim != 2:
        raise ValueError("expected a matrix")
    j = Q.shape[1]
    if j == 0:
        return 0.0
    G = Q.T @ Q
    return float(np.linalg.norm(np.eye(j) - G))


def default_start_vector(n: int, seed: int = 0) -> np.ndarray:
    """Deterministic pseudo-random unit vector."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    nv = np.linalg.norm(v)
    while nv == 0.0:  # absurdly unlikely, but keeps the contract total
        v = rng.standard_normal(n)
        nv = np.linalg.norm(v)
    return v / nv


def _gs_pass(w: np.ndarray, bases) -> np.ndarray:
    for Q in bases:
        if Q.shape[1]:
            w = w - Q @ (Q.T @ w)
    return w


def _orthogonalize(w: np.ndarray, bases) -> np.ndarray:
    """Classical Gram-Schmidt against each basis block in order, with a second
    pass when the first removes more than 1/sqrt(2) of the norm."""
    before = np.linalg.norm(w)
    w = _gs_pass(w, bases)
    if np.linalg.norm(w) < _SQRT_HALF * before:
        w = _gs_pass(w, bases)
    return w


def golub_kahan(
    A: SparseMatrix,
    v1: np.ndarray,
    k: int,
    mode=OrthoMode.FULL,
    breakdown_tol: float | None = None,
    deflate_right: np.ndarray | None = None,
    deflate_left: np.ndarray | None = None,
    collect_trace: bool = False,
) -> BidiagFactorization:
    """Run k steps of Golub-Kahan bidiagonalization of A from start vector v1.

    Parameters
    ----------
    A : SparseMatrix
    v1 : ndarray
        Unit-norm start vector of length ncols (checked to 1e-12).
    k : int
        Requested subspace dimension, 1 <= k <= min(shape).
    mode : OrthoMode or str
        'none' runs the plain coupled two-term recurrences; 'full'
        reorthogonalizes both bases against all previous vectors; 'one_sided'
        reorthogonalizes only the right basis (cheaper, but left-basis quality
        then degrades with the conditioning of B_k).
    breakdown_tol : float, optional
        Absolute tolerance below which a recurrence scalar is treated as zero.
        Defaults to 1e-14 * frobenius_norm(A).
    deflate_right, deflate_left : ndarray, optional
        Orthonormal column blocks to project out of every new right/left
        vector (used by restarted drivers to lock converged directions; the
        caller is expected to hand in a start vector already orthogonal to
        ``deflate_right``).
    collect_trace : bool
        Record (j, alpha, beta, u_defect, v_defect) per iteration. Defects are
        Frobenius orthogonality defects of all vectors produced so far, and
        cost one extra pass against each basis per iteration.
    """
    mode = as_ortho_mode(mode)
    m, n = A.shape
    v1 = np.asarray(v1, dtype=np.float64)
    if v1.shape != (n,):
        raise ValueError(f"start vector has shape {v1.shape}, expected ({n},)")
    nv1 = np.linalg.norm(v1)
    if abs(nv1 - 1.0) > 1e-12:
        raise ValueError(f"start vector must have unit norm, got {nv1!r}")
    if not 1 <= k <= min(m, n):
        raise ValueError(f"k={k} out of range [1, {min(m, n)}]")
    tol = 1e-14 * A.frobenius_norm() if breakdown_tol is None else float(breakdown_tol)
    D_r = None if deflate_right is None or deflate_right.shape[1] == 0 else deflate_right
    D_l = None if deflate_left is None or deflate_left.shape[1] == 0 else deflate_left

    U = np.zeros((m, k))
    V = np.zeros((n, k))
    alpha: list[float] = []
    beta: list[float] = []
    trace_rows: list[tuple] = []
    u_def_sq = 0.0
    v_def_sq = 0.0

    v = v1.copy()
    V[:, 0] = v
    v_next = v
    k_actual = k
    breakdown_at = None

    for j in range(k):
        u = spmv(A, v)
        if mode is OrthoMode.FULL:
            bases = [U[:, :j]] + ([D_l] if D_l is not None else [])
            u = _orthogonalize(u, bases)
        else:
            if j > 0:
                u -= beta[j - 1] * U[:, j - 1]
            if D_l is not None:
                u -= D_l @ (D_l.T @ u)
        a = float(np.linalg.norm(u))
        if a <= tol:
            k_actual = j
            breakdown_at = j + 1
            v_next = v
            break
        u /= a
        if collect_trace:
            c = U[:, :j].T @ u
            u_def_sq += 2.0 * float(c @ c) + float(u @ u - 1.0) ** 2
        U[:, j] = u
        alpha.append(a)

        w = spmv_transpose(A, u)
        if mode is OrthoMode.NONE:
            w -= a * v
            if D_r is not None:
                w -= D_r @ (D_r.T @ w)
        else:
            bases = [V[:, : j + 1]] + ([D_r] if D_r is not None else [])
            w = _orthogonalize(w, bases)
        b = float(np.linalg.norm(w))
        beta.append(b)
        if b <= tol:
            k_actual = j + 1
            breakdown_at = j + 1
            v_next = np.zeros(n)
            if collect_trace:
                trace_rows.append((j + 1, a, b, np.sqrt(u_def_sq), np.sqrt(v_def_sq)))
            break
        w /= b
        if collect_trace:
            c = V[:, : j + 1].T @ w
            v_def_sq += 2.0 * float(c @ c) + float(w @ w - 1.0) ** 2
            trace_rows.append((j + 1, a, b, np.sqrt(u_def_sq), np.sqrt(v_def_sq)))
        if j + 1 < k:
            V[:, j + 1] = w
        v = w
        v_next = w

    return BidiagFactorization(
        U=U[:, :k_actual],
        V=V[:, :k_actual],
        alpha=np.array(alpha[:k_actual]),
        beta=np.array(beta[:k_actual]),
        v_next=v_next,
        k=k_actual,
        breakdown_at=breakdown_at,
        trace=tuple(trace_rows) if collect_trace else None,
    )


def lanczos_tridiag(
    A: SparseMatrix,
    v1: np.ndarray,
    k: int,
    breakdown_tol: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric Lanczos on the operator x -> A^T (A x), never forming A^T A.

    Returns the right basis V (n x k') and the tridiagonal T (k' x k'), which
    in exact arithmetic equals B_k^T B_k from ``golub_kahan``. The right basis
    is kept fully reorthogonalized so the equivalence holds to roundoff for
    moderate k.
    """
    m, n = A.shape
    v1 = np.asarray(v1, dtype=np.float64)
    if v1.shape != (n,):
        raise ValueError(f"start vector has shape {v1.shape}, expected ({n},)")
    if abs(np.linalg.norm(v1) - 1.0) > 1e-12:
        raise ValueError("start vector must have unit norm")
    if not 1 <= k <= min(m, n):
        raise ValueError(f"k={k} out of range [1, {min(m, n)}]")
    fro = A.frobenius_norm()
    tol = 1e-14 * fro * fro if breakdown_tol is None else float(breakdown_tol)

    V = np.zeros((n, k))
    V[:, 0] = v1
    diag: list[float] = []
    off: list[float] = []
    k_actual = k
    for j in range(k):
        w = spmv_transpose(A, spmv(A, V[:, j]))
        diag.append(float(V[:, j] @ w))
        w = _orthogonalize(w, [V[:, : j + 1]])
        b = float(np.linalg.norm(w))
        if b <= tol:
            k_actual = j + 1
            break
        if j + 1 < k:
            off.append(b)
            V[:, j + 1] = w / b

    T = np.diag(diag[:k_actual])
    if k_actual > 1:
        idx = np.arange(k_actual - 1)
        T[idx, idx + 1] = off[: k_actual - 1]
        T[idx + 1, idx] = off[: k_actual - 1]
    return V[:, :k_actual], T


def write_trace_csv(fact: BidiagFactorization, path) -> None:
    """Write the per-iteration trace as CSV with header j,alpha,beta,u_defect,v_defect."""
    if fact.trace is None:
        raise ValueError("factorization carries no trace; rerun with collect_trace=True")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "alpha", "beta", "u_defect", "v_defect"])
        for row in fact.trace:
            w.writerow([row[0]] + [repr(float(x)) for x in row[1:]])
