"""Sparse SVD from bidiagonal subspaces, with restart, and truncated pseudoinverse solves."""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .bidiag import OrthoMode, as_ortho_mode, golub_kahan
from .sparse import SparseMatrix, spmv


@dataclass(frozen=True)
class SvdConfig:
    """Settings for the iterative SVD.

    ``k`` is the bidiagonal subspace size per sweep, ``num_wanted`` how many
    converged triplets stop the restart loop (defaults to k). A Ritz triplet
    counts as converged when its residual is at most ``conv_tol`` times the
    largest computed singular value. ``trunc_eps`` is the relative cutoff used
    by ``pinv_solve``: singular values at or below ``trunc_eps * sigma_max``
    are discarded rather than inverted.
    """

    k: int
    num_wanted: int | None = None
    conv_tol: float = 1e-10
    max_restarts: int = 0
    mode: OrthoMode | str = OrthoMode.FULL
    trunc_eps: float = 1e-12

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.num_wanted is not None and self.num_wanted < 1:
            raise ValueError("num_wanted must be at least 1")
        if self.conv_tol <= 0:
            raise ValueError("conv_tol must be positive")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be non-negative")
        if self.trunc_eps < 0:
            raise ValueError("trunc_eps must be non-negative")
        object.__setattr__(self, "mode", as_ortho_mode(self.mode))

    @property
    def wanted(self) -> int:
        return self.k if self.num_wanted is None else self.num_wanted


@dataclass(frozen=True)
class RitzTriplets:
    """Approximate singular triplets, sorted by decreasing sigma.

    ``residual[i]`` is the subspace residual ``beta_k * |e_k^T utilde_i|``,
    which equals ``norm(A^T left_i - sigma_i * right_i)`` for triplets drawn
    from an exact bidiagonal factorization. ``converged[i]`` holds exactly
    when ``residual[i] <= conv_tol * sigma[0]``.
    """

    sigma: np.ndarray
    left: np.ndarray
    right: np.ndarray
    residual: np.ndarray
    converged: np.ndarray
    conv_tol: float

    def __len__(self) -> int:
        return int(self.sigma.shape[0])

    @property
    def num_converged(self) -> int:
        return int(np.sum(self.converged))


def _assemble_triplets(sigma, left, right, residual, conv_tol: float) -> RitzTriplets:
    sigma = np.asarray(sigma, dtype=np.float64)
    residual = np.asarray(residual, dtype=np.float64)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    residual = residual[order]
    smax = sigma[0] if sigma.size else 0.0
    converged = residual <= conv_tol * smax
    return RitzTriplets(
        sigma=sigma,
        left=np.asarray(left)[:, order],
        right=np.asarray(right)[:, order],
        residual=residual,
        converged=converged,
        conv_tol=conv_tol,
    )


def _ritz_arrays(fact) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(sigma, left, right, residual) of the subspace SVD of a factorization.

    The regular path takes the dense SVD of B_k; the per-triplet residual
    falls out of the factorization for free as
    ``beta[-1] * |last row of the small left vectors|``.

    When the recurrence broke down the Krylov space is invariant:
    A^T U = [V v_next] B_ext^T holds with no remainder for the k x (k+1)
    extension B_ext = [B | beta_k e_k]. Its SVD is then exact for the captured
    subspace (residuals vanish), which matters when a tiny alpha ended the
    sweep one half-step after the last coupling was recorded.
    """
    B = fact.bidiagonal()
    if fact.breakdown_at is not None:
        B_ext = np.zeros((fact.k, fact.k + 1))
        B_ext[:, : fact.k] = B
        B_ext[-1, -1] = fact.beta[-1]
        Ub, s, Vbt = np.linalg.svd(B_ext, full_matrices=False)
        right = np.column_stack([fact.V, fact.v_next]) @ Vbt.T
        return s, fact.U @ Ub, right, np.zeros(fact.k)
    Ub, s, Vbt = np.linalg.svd(B)
    return s, fact.U @ Ub, fact.V @ Vbt.T, fact.beta[-1] * np.abs(Ub[-1, :])


def ritz_from_bidiag(fact, conv_tol: float = 1e-10) -> RitzTriplets:
    """Singular triplets of A restricted to the bidiagonal subspace."""
    if fact.k < 1:
        raise ValueError("factorization has no columns")
    s, left, right, residual = _ritz_arrays(fact)
    return _assemble_triplets(s, left, right, residual, conv_tol)


def _empty_triplets(m: int, n: int, conv_tol: float) -> RitzTriplets:
    return RitzTriplets(
        sigma=np.zeros(0),
        left=np.zeros((m, 0)),
        right=np.zeros((n, 0)),
        residual=np.zeros(0),
        converged=np.zeros(0, dtype=bool),
        conv_tol=conv_tol,
    )


def _project_out(v: np.ndarray, locked_right) -> np.ndarray | None:
    if locked_right is not None:
        v = v - locked_right @ (locked_right.T @ v)
    nv = np.linalg.norm(v)
    return v / nv if nv > 1e-6 else None


def _deflated_start(n: int, seed: int, sweep: int, locked_right) -> np.ndarray | None:
    for attempt in range(8):
        rng = np.random.default_rng([abs(int(seed)), sweep, attempt])
        v = rng.standard_normal(n)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            continue
        out = _project_out(v / nv, locked_right)
        if out is not None:
            return out
    return None


def sweep_start_vector(n: int, seed: int = 0, sweep: int = 0) -> np.ndarray:
    """The cold start vector ``sparse_svd`` draws for the given sweep.

    Sweeps after the first warm-start from the best unconverged Ritz vector
    instead whenever one is available; this is the fallback draw.
    """
    v = _deflated_start(n, seed, sweep, None)
    assert v is not None
    return v


def sparse_svd(A: SparseMatrix, cfg: SvdConfig, seed: int = 0) -> RitzTriplets:
    """Iterative SVD by restarted Golub-Kahan bidiagonalization.

    Each sweep builds a k-dimensional bidiagonal subspace, extracts Ritz
    triplets, and locks the converged ones: their right/left vectors are
    projected out of every later sweep (deflation), so restarts only hunt for
    what is still missing. The next sweep warm-starts from the best
    unconverged Ritz vector, so successive sweeps refine the same directions
    instead of exploring from scratch. Runs at most ``cfg.max_restarts``
    extra sweeps and returns the locked set merged with the last sweep's
    candidates.

    Non-convergence is not an error; inspect the ``converged`` flags.
    """
    m, n = A.shape
    kmax = min(m, n)
    locked_s: list[float] = []
    locked_res: list[float] = []
    locked_u: list[np.ndarray] = []
    locked_v: list[np.ndarray] = []
    final = None
    smax_seen = 0.0
    warm: np.ndarray | None = None

    for sweep in range(cfg.max_restarts + 1):
        p = len(locked_s)
        k_eff = min(cfg.k, kmax - p)
        if k_eff < 1:
            break
        Dv = np.column_stack(locked_v) if p else None
        Du = np.column_stack(locked_u) if p else None
        v1 = _project_out(warm, Dv) if warm is not None else None
        if v1 is None:
            v1 = _deflated_start(n, seed, sweep, Dv)
        if v1 is None:
            break
        fact = golub_kahan(A, v1, k_eff, mode=cfg.mode, deflate_right=Dv, deflate_left=Du)
        if fact.k == 0:
            break
        s, left, right, res = _ritz_arrays(fact)
        smax_seen = max(smax_seen, float(s[0]))
        conv = res <= cfg.conv_tol * smax_seen
        final = (s, left, right, res)
        if sweep == cfg.max_restarts or p + int(conv.sum()) >= cfg.wanted:
            break
        for i in np.flatnonzero(conv):
            locked_s.append(float(s[i]))
            locked_res.append(float(res[i]))
            locked_u.append(left[:, i])
            locked_v.append(right[:, i])
        pending = np.flatnonzero(~conv)
        warm = right[:, pending[0]].copy() if pending.size else None
        final = None

    parts_s: list[np.ndarray] = []
    parts_u: list[np.ndarray] = []
    parts_v: list[np.ndarray] = []
    parts_r: list[np.ndarray] = []
    if locked_s:
        parts_s.append(np.array(locked_s))
        parts_u.append(np.column_stack(locked_u))
        parts_v.append(np.column_stack(locked_v))
        parts_r.append(np.array(locked_res))
    if final is not None:
        parts_s.append(final[0])
        parts_u.append(final[1])
        parts_v.append(final[2])
        parts_r.append(final[3])
    if not parts_s:
        return _empty_triplets(m, n, cfg.conv_tol)
    return _assemble_triplets(
        np.concatenate(parts_s),
        np.hstack(parts_u),
        np.hstack(parts_v),
        np.concatenate(parts_r),
        cfg.conv_tol,
    )


NAIVE_SVD_CAP = 2000


def naive_svd(A: SparseMatrix, num_wanted: int | None = None, conv_tol: float = 1e-10) -> RitzTriplets:
    """Reference SVD through the dense normal matrix A^T A.

    Forms A^T A explicitly, eigendecomposes it, and rebuilds left vectors as
    A v / sigma. Simple and exact for well-separated spectra, but it squares
    the condition number and densifies, so it is capped at small sizes and
    exists as a test oracle, not a production path.
    """
    m, n = A.shape
    if n > NAIVE_SVD_CAP:
        raise ValueError(f"naive_svd forms a dense {n}x{n} normal matrix; cap is {NAIVE_SVD_CAP}")
    if n < 1 or m < 1:
        return _empty_triplets(m, n, conv_tol)
    dense = A.to_dense()
    G = dense.T @ dense
    lam, W = np.linalg.eigh(G)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    V = W[:, order]
    sigma = np.sqrt(np.clip(lam, 0.0, None))
    U = np.zeros((m, n))
    pos = sigma > 0.0
    U[:, pos] = (dense @ V[:, pos]) / sigma[pos]
    residual = np.linalg.norm(dense.T @ U - V * sigma, axis=0)
    t = _assemble_triplets(sigma, U, V, residual, conv_tol)
    if num_wanted is not None and num_wanted < len(t):
        sl = slice(0, num_wanted)
        t = RitzTriplets(
            sigma=t.sigma[sl],
            left=t.left[:, sl],
            right=t.right[:, sl],
            residual=t.residual[sl],
            converged=t.converged[sl],
            conv_tol=conv_tol,
        )
    return t


@dataclass(frozen=True)
class SolveReport:
    retained: int
    residual_norm: float
    effective_condition: float
    all_truncated: bool = False
    num_converged: int = 0
    total_triplets: int = 0


def apply_truncated_pinv(
    t: RitzTriplets, A: SparseMatrix, y: np.ndarray, trunc_eps: float
) -> tuple[np.ndarray, SolveReport]:
    """Truncated pseudoinverse applied to already computed triplets.

    beta = sum over retained i of right_i * (left_i^T y) / sigma_i, where a
    value is retained when sigma_i > trunc_eps * sigma_max. Discarding the
    tail trades a little bias for not amplifying noise by 1/sigma on
    directions the data cannot support. If everything is truncated the
    solution is identically zero and the report says so.
    """
    n = A.ncols
    smax = float(t.sigma[0]) if len(t) else 0.0
    keep = t.sigma > trunc_eps * smax if len(t) else np.zeros(0, dtype=bool)
    if smax == 0.0 or not bool(keep.any()):
        warnings.warn("all singular values truncated; returning the zero solution")
        report = SolveReport(
            retained=0,
            residual_norm=float(np.linalg.norm(y)),
            effective_condition=np.inf,
            all_truncated=True,
            num_converged=t.num_converged if len(t) else 0,
            total_triplets=len(t),
        )
        return np.zeros(n), report
    coeff = (t.left[:, keep].T @ y) / t.sigma[keep]
    beta = t.right[:, keep] @ coeff
    residual = float(np.linalg.norm(spmv(A, beta) - y))
    report = SolveReport(
        retained=int(keep.sum()),
        residual_norm=residual,
        effective_condition=smax / float(t.sigma[keep].min()),
        all_truncated=False,
        num_converged=t.num_converged,
        total_triplets=len(t),
    )
    return beta, report


def pinv_solve(A: SparseMatrix, y, cfg: SvdConfig, seed: int = 0) -> tuple[np.ndarray, SolveReport]:
    """Least-squares solve through the truncated singular value expansion.

    Runs the iterative SVD with ``cfg`` and applies ``apply_truncated_pinv``
    with the configured relative cutoff.
    """
    m, _ = A.shape
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (m,):
        raise ValueError(f"y has shape {y.shape}, expected ({m},)")
    t = sparse_svd(A, cfg, seed=seed)
    return apply_truncated_pinv(t, A, y, cfg.trunc_eps)


def write_spectrum_csv(t: RitzTriplets, path) -> None:
    """CSV with columns index,sigma,residual,converged (one row per triplet)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "sigma", "residual", "converged"])
        for i in range(len(t)):
            w.writerow([i, repr(float(t.sigma[i])), repr(float(t.residual[i])), int(t.converged[i])])


def write_solve_report_csv(report: SolveReport, path) -> None:
    """Scalar solve summary in the same metric,value layout as diagnostics."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "value"])
        w.writerow(["retained", report.retained])
        w.writerow(["residual_norm", repr(report.residual_norm)])
        w.writerow(["effective_condition", repr(report.effective_condition)])
        w.writerow(["all_truncated", str(bool(report.all_truncated))])
