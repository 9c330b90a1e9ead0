"""Estimator-style wrappers over the functional core.

These follow the usual fit/transform/predict conventions: constructor
arguments are stored verbatim as hyperparameters, fitted state lives in
trailing-underscore attributes, and ``get_params``/``set_params`` come from
the scikit-learn base class.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin

from . import pielm
from .sparse import SparseMatrix, sparsify, spmv
from .svd import SvdConfig, apply_truncated_pinv, sparse_svd


def as_sparse_matrix(X) -> SparseMatrix:
    """Coerce an array, scipy sparse matrix or SparseMatrix to CSR."""
    if isinstance(X, SparseMatrix):
        return X
    if sp.issparse(X):
        return SparseMatrix.from_scipy(X)
    return sparsify(np.asarray(X, dtype=np.float64), 0.0)


def _check_fitted(est, attr: str) -> None:
    if not hasattr(est, attr):
        raise RuntimeError(f"{type(est).__name__} is not fitted yet; call fit first")


class LanczosSVD(BaseEstimator, TransformerMixin):
    """Truncated SVD transformer backed by restarted bidiagonalization.

    Parameters mirror the solver configuration: ``n_components`` singular
    triplets are kept, computed in a subspace of ``subspace_size`` (defaults
    to ``4 * n_components`` capped at min(shape)) with the given
    reorthogonalization mode.
    """

    def __init__(
        self,
        n_components: int = 6,
        subspace_size: int | None = None,
        ortho: str = "full",
        conv_tol: float = 1e-10,
        max_restarts: int = 3,
        seed: int = 0,
    ):
        self.n_components = n_components
        self.subspace_size = subspace_size
        self.ortho = ortho
        self.conv_tol = conv_tol
        self.max_restarts = max_restarts
        self.seed = seed

    def _config(self, shape) -> SvdConfig:
        kmax = min(shape)
        k = self.subspace_size if self.subspace_size is not None else min(4 * self.n_components, kmax)
        k = min(max(k, self.n_components), kmax)
        return SvdConfig(
            k=k,
            num_wanted=min(self.n_components, kmax),
            conv_tol=self.conv_tol,
            max_restarts=self.max_restarts,
            mode=self.ortho,
        )

    def fit(self, X, y=None):
        A = as_sparse_matrix(X)
        t = sparse_svd(A, self._config(A.shape), seed=self.seed)
        keep = min(self.n_components, len(t))
        self.singular_values_ = t.sigma[:keep]
        self.components_ = t.right[:, :keep].T
        self.left_vectors_ = t.left[:, :keep]
        self.residuals_ = t.residual[:keep]
        self.converged_ = t.converged[:keep]
        self.n_features_in_ = A.ncols
        return self

    def transform(self, X):
        _check_fitted(self, "components_")
        A = as_sparse_matrix(X)
        if A.ncols != self.n_features_in_:
            raise ValueError(f"X has {A.ncols} columns, expected {self.n_features_in_}")
        return A.scipy_csr() @ self.components_.T


class TruncatedPinvRegressor(BaseEstimator, RegressorMixin):
    """Linear least squares through the truncated singular value expansion."""

    def __init__(
        self,
        subspace_size: int | None = None,
        trunc_eps: float = 1e-12,
        ortho: str = "full",
        conv_tol: float = 1e-10,
        max_restarts: int = 1,
        seed: int = 0,
    ):
        self.subspace_size = subspace_size
        self.trunc_eps = trunc_eps
        self.ortho = ortho
        self.conv_tol = conv_tol
        self.max_restarts = max_restarts
        self.seed = seed

    def fit(self, X, y):
        A = as_sparse_matrix(X)
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (A.nrows,):
            raise ValueError(f"y has shape {y.shape}, expected ({A.nrows},)")
        kmax = min(A.shape)
        k = kmax if self.subspace_size is None else min(self.subspace_size, kmax)
        cfg = SvdConfig(
            k=k,
            conv_tol=self.conv_tol,
            max_restarts=self.max_restarts,
            mode=self.ortho,
            trunc_eps=self.trunc_eps,
        )
        t = sparse_svd(A, cfg, seed=self.seed)
        self.coef_, self.report_ = apply_truncated_pinv(t, A, y, self.trunc_eps)
        self.n_features_in_ = A.ncols
        return self

    def predict(self, X):
        _check_fitted(self, "coef_")
        A = as_sparse_matrix(X)
        return spmv(A, self.coef_)


class SparsePIELM(BaseEstimator, RegressorMixin):
    """Random-feature collocation solver for 1D steady convection-diffusion.

    ``fit`` takes the collocation points (any 1D array of interior points, or
    None to place ``n_collocation`` uniformly) and solves for the output
    layer; ``predict`` evaluates the trained network. The target function is
    fixed by the problem parameters, so ``y`` is ignored.
    """

    def __init__(
        self,
        n_features: int = 512,
        width: float = 1e-4,
        peclet: float = -1000.0,
        length: float = 1.0,
        phi0: float = 0.0,
        phiL: float = 1.0,
        n_collocation: int | None = None,
        drop_tol: float = 1e-14,
        subspace_size: int | None = None,
        trunc_eps: float = 1e-12,
        ortho: str = "full",
        conv_tol: float = 1e-10,
        max_restarts: int = 1,
        shuffle: bool = False,
        seed: int = 0,
    ):
        self.n_features = n_features
        self.width = width
        self.peclet = peclet
        self.length = length
        self.phi0 = phi0
        self.phiL = phiL
        self.n_collocation = n_collocation
        self.drop_tol = drop_tol
        self.subspace_size = subspace_size
        self.trunc_eps = trunc_eps
        self.ortho = ortho
        self.conv_tol = conv_tol
        self.max_restarts = max_restarts
        self.shuffle = shuffle
        self.seed = seed

    def _problem(self, X) -> pielm.ConvDiffProblem:
        if X is None:
            n = self.n_collocation if self.n_collocation is not None else 2 * self.n_features
            return pielm.make_problem(
                self.peclet, n, length=self.length, phi0=self.phi0, phiL=self.phiL,
                shuffle=self.shuffle, seed=self.seed,
            )
        x = np.asarray(X, dtype=np.float64).reshape(-1)
        if self.peclet == 0:
            velocity, diffusivity = 0.0, 1.0
        elif abs(self.peclet) <= 1.0:
            velocity, diffusivity = self.peclet, 1.0
        else:
            velocity = 1.0 if self.peclet > 0 else -1.0
            diffusivity = 1.0 / abs(self.peclet)
        return pielm.ConvDiffProblem(
            length=self.length, phi0=self.phi0, phiL=self.phiL,
            velocity=velocity, diffusivity=diffusivity, peclet=self.peclet,
            collocation=x,
        )

    def fit(self, X=None, y=None):
        problem = self._problem(X)
        model = pielm.init_model(
            self.n_features, self.width, seed=self.seed, domain_length=self.length
        )
        kmax = min(problem.collocation.size + 2, self.n_features)
        k = kmax if self.subspace_size is None else min(self.subspace_size, kmax)
        cfg = SvdConfig(
            k=k,
            conv_tol=self.conv_tol,
            max_restarts=self.max_restarts,
            mode=self.ortho,
            trunc_eps=self.trunc_eps,
        )
        self.model_, self.report_ = pielm.train(
            model, problem, cfg, drop_tol=self.drop_tol, seed=self.seed
        )
        self.problem_ = problem
        return self

    def predict(self, X):
        _check_fitted(self, "model_")
        return pielm.predict(self.model_, np.asarray(X, dtype=np.float64).reshape(-1))

    def errors(self, n_grid: int = 10000) -> dict:
        _check_fitted(self, "model_")
        grid = np.linspace(0.0, self.length, n_grid)
        return pielm.error_metrics(self.model_, self.problem_, grid)
