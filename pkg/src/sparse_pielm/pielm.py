"""Random-feature collocation solver for 1D steady convection-diffusion.

The hidden layer is a row of tanh units whose pre-activations are passed
through a Gaussian window centered on a uniform grid:

    z_i(x) = W_i * x * exp(-(x - mu_i)^2 / d) + b_i

Away from its center a unit's window underflows to zero, so with b = 0 the
unit contributes exactly nothing there and the collocation matrix becomes
genuinely sparse: each row only sees the few units whose centers are nearby.
Shrinking the width d trades per-row support for a better conditioned, higher
rank system.
"""
from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass

import numpy as np

from .sparse import MatrixDiagnostics, SparseMatrix, diagnostics_from_spectrum
from .svd import SolveReport, SvdConfig, apply_truncated_pinv, sparse_svd


@dataclass(frozen=True)
class RfnnModel:
    """Random-feature network for a scalar function on an interval.

    ``W`` and ``b`` are the input weights and biases of the L+1 hidden units,
    ``mu`` their window centers (the i/L grid scaled to the domain), ``d`` the
    shared window width. ``beta`` is the trained output layer, None until a
    solve has run. Only tanh activation is implemented.
    """

    W: np.ndarray
    b: np.ndarray
    mu: np.ndarray
    d: float
    activation: str = "tanh"
    beta: np.ndarray | None = None

    def __post_init__(self):
        W = np.asarray(self.W, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        mu = np.asarray(self.mu, dtype=np.float64)
        if W.ndim != 1 or W.shape != b.shape or W.shape != mu.shape:
            raise ValueError("W, b, mu must be one-dimensional with equal length")
        if W.shape[0] < 2:
            raise ValueError("need at least two hidden units")
        if not self.d > 0:
            raise ValueError("window width d must be positive")
        if self.activation != "tanh":
            raise ValueError(f"unsupported activation {self.activation!r}")
        if self.beta is not None and np.asarray(self.beta).shape != W.shape:
            raise ValueError("beta length must match the hidden layer")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mu", mu)

    @property
    def n_features(self) -> int:
        return int(self.W.shape[0])

    @property
    def trained(self) -> bool:
        return self.beta is not None


def init_model(
    n_features: int,
    width: float,
    seed: int = 0,
    domain_length: float = 1.0,
    weight_scale: float = 1.0,
    bias_scale: float = 0.0,
) -> RfnnModel:
    """Fresh untrained model with uniform centers and uniform random weights.

    Biases default to zero so that a unit whose window has underflowed
    contributes exactly zero; a nonzero ``bias_scale`` breaks that and is only
    useful with wide windows.
    """
    if n_features < 2:
        raise ValueError("n_features must be at least 2")
    if not width > 0:
        raise ValueError("width must be positive")
    if not domain_length > 0:
        raise ValueError("domain_length must be positive")
    L = n_features - 1
    rng = np.random.default_rng(seed)
    W = rng.uniform(-weight_scale, weight_scale, size=n_features)
    b = rng.uniform(-bias_scale, bias_scale, size=n_features) if bias_scale > 0 else np.zeros(n_features)
    mu = (np.arange(n_features, dtype=np.float64) / L) * domain_length
    return RfnnModel(W=W, b=b, mu=mu, d=float(width))


@dataclass(frozen=True)
class ConvDiffProblem:
    """Steady convection-diffusion on [0, length] with Dirichlet ends.

    velocity * dphi/dx = diffusivity * d2phi/dx2,  phi(0) = phi0,
    phi(length) = phiL. ``peclet`` must equal velocity / diffusivity and is
    what the solution actually depends on.
    """

    length: float
    phi0: float
    phiL: float
    velocity: float
    diffusivity: float
    peclet: float
    collocation: np.ndarray

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("length must be positive")
        if self.diffusivity == 0:
            raise ValueError("diffusivity must be nonzero")
        ratio = self.velocity / self.diffusivity
        if abs(ratio - self.peclet) > 1e-9 * max(1.0, abs(self.peclet)):
            raise ValueError("peclet must equal velocity / diffusivity")
        x = np.asarray(self.collocation, dtype=np.float64)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("collocation must be a non-empty vector")
        if not np.all(np.isfinite(x)):
            raise ValueError("collocation points must be finite")
        if x.min() <= 0.0 or x.max() >= self.length:
            raise ValueError("collocation points must lie strictly inside (0, length)")
        object.__setattr__(self, "collocation", x)


def make_problem(
    peclet: float,
    n_collocation: int,
    length: float = 1.0,
    phi0: float = 0.0,
    phiL: float = 1.0,
    shuffle: bool = False,
    seed: int = 0,
) -> ConvDiffProblem:
    """Uniform interior collocation grid for a given Peclet number.

    The velocity/diffusivity split is chosen so neither coefficient exceeds 1,
    keeping interior rows on a scale comparable to the boundary rows. With
    ``shuffle`` the points are visited in random order, which scrambles the
    band structure of the assembled system without changing the solution.
    """
    if n_collocation < 1:
        raise ValueError("n_collocation must be positive")
    if abs(peclet) <= 1.0:
        velocity, diffusivity = peclet, 1.0
    else:
        velocity = 1.0 if peclet > 0 else -1.0
        diffusivity = 1.0 / abs(peclet)
    x = (np.arange(1, n_collocation + 1, dtype=np.float64) / (n_collocation + 1)) * length
    if shuffle:
        x = np.random.default_rng(seed).permutation(x)
    return ConvDiffProblem(
        length=length,
        phi0=phi0,
        phiL=phiL,
        velocity=velocity,
        diffusivity=diffusivity,
        peclet=peclet,
        collocation=x,
    )


# -- feature evaluation -------------------------------------------------------

# exp underflows to 0 beyond |t| = sqrt(745 d); entries outside carry nothing
_UNDERFLOW_EXPONENT = 745.0


def gaussian_encoding(x, mu, d: float):
    """Window factor exp(-(x - mu)^2 / d); an infinite d disables the window."""
    x = np.asarray(x, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    t = x - mu
    return np.exp(-(t * t) / d)


def _window(model: RfnnModel, x: float) -> tuple[int, int]:
    """Index range [lo, hi) of units whose window does not underflow at x."""
    n = model.n_features
    if not np.isfinite(model.d):
        return 0, n
    r = np.sqrt(_UNDERFLOW_EXPONENT * model.d)
    h = model.mu[1] - model.mu[0]
    lo = int(np.ceil((x - r - model.mu[0]) / h))
    hi = int(np.floor((x + r - model.mu[0]) / h)) + 1
    return max(lo, 0), min(hi, n)


def _window_values(model: RfnnModel, x: float, orders, lo: int, hi: int) -> dict:
    """Rows of the requested derivative orders on the active window."""
    mu = model.mu[lo:hi]
    W = model.W[lo:hi]
    b = model.b[lo:hi]
    t = x - mu
    E = np.exp(-(t * t) / model.d)
    z = W * x * E + b
    tz = np.tanh(z)
    out: dict = {}
    if 0 in orders:
        out[0] = tz
    if 1 in orders or 2 in orders:
        dE = E * (-2.0 * t / model.d)
        zp = W * (E + x * dE)
        phip = 1.0 - tz * tz
        if 1 in orders:
            out[1] = phip * zp
        if 2 in orders:
            d2E = E * (4.0 * t * t / (model.d * model.d) - 2.0 / model.d)
            zpp = W * (2.0 * dE + x * d2E)
            out[2] = (-2.0 * tz * phip) * (zp * zp) + phip * zpp
    return out


def feature_row(model: RfnnModel, x: float, order: int, drop_tol: float = 0.0) -> np.ndarray:
    """One dense row of unit responses (or their x-derivatives) at a point.

    order 0 is the activation itself, 1 and 2 push d/dx through both the tanh
    and the window by the chain rule. Entries are zeroed when they carry less
    than ``drop_tol``: for the derivative orders that is their magnitude, for
    order 0 their deviation from the inactive baseline tanh(b_i), which is the
    value a unit takes once its window has underflowed.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if drop_tol < 0:
        raise ValueError("drop_tol must be non-negative")
    x = float(x)
    lo, hi = _window(model, x)
    row = np.zeros(model.n_features)
    if lo >= hi:
        return row
    vals = _window_values(model, x, (order,), lo, hi)[order]
    if order == 0:
        keep = np.abs(vals - np.tanh(model.b[lo:hi])) > drop_tol
    else:
        keep = np.abs(vals) > drop_tol
    row[lo:hi] = np.where(keep, vals, 0.0)
    return row


@dataclass(frozen=True)
class AssembledSystem:
    """Sparse collocation system H beta = T with row provenance."""

    H: SparseMatrix
    T: np.ndarray
    row_kind: tuple[str, ...]

    def __post_init__(self):
        if self.H.nrows != self.T.shape[0] or self.H.nrows != len(self.row_kind):
            raise ValueError("H, T and row_kind disagree on the number of rows")


def assemble(model: RfnnModel, problem: ConvDiffProblem, drop_tol: float = 0.0) -> AssembledSystem:
    """Collocation matrix for the convection-diffusion residual.

    One row per interior point encodes velocity * phi' - diffusivity * phi''
    with zero right side; two trailing rows pin the boundary values through
    order-0 features. The combined interior rows are sparsified at
    ``drop_tol`` after the two derivative orders are mixed.
    """
    if drop_tol < 0:
        raise ValueError("drop_tol must be non-negative")
    n_feat = model.n_features
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    offsets = [0]
    running = 0

    for x in problem.collocation:
        lo, hi = _window(model, float(x))
        if lo < hi:
            w = _window_values(model, float(x), (1, 2), lo, hi)
            row = problem.velocity * w[1] - problem.diffusivity * w[2]
            keep = np.abs(row) > drop_tol
            idx = np.flatnonzero(keep)
            cols.append(idx + lo)
            vals.append(row[idx])
            running += idx.size
        offsets.append(running)

    for x_b, t_b in ((0.0, problem.phi0), (problem.length, problem.phiL)):
        row = feature_row(model, x_b, 0, drop_tol)
        idx = np.flatnonzero(row)
        cols.append(idx)
        vals.append(row[idx])
        running += idx.size
        offsets.append(running)

    H = SparseMatrix(
        problem.collocation.size + 2,
        n_feat,
        np.asarray(offsets, dtype=np.int64),
        np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64),
        np.concatenate(vals) if vals else np.zeros(0),
    )
    T = np.concatenate([np.zeros(problem.collocation.size), [problem.phi0, problem.phiL]])
    kinds = ("pde",) * problem.collocation.size + ("boundary", "boundary")
    return AssembledSystem(H=H, T=T, row_kind=kinds)


# -- training and evaluation --------------------------------------------------


@dataclass(frozen=True)
class TrainReport:
    solve: SolveReport
    diagnostics: MatrixDiagnostics


def train(
    model: RfnnModel,
    problem: ConvDiffProblem,
    cfg: SvdConfig,
    drop_tol: float = 0.0,
    seed: int = 0,
) -> tuple[RfnnModel, TrainReport]:
    """Assemble the collocation system and solve it by truncated pseudoinverse.

    Returns the trained model and a report carrying both the solve summary and
    spectral diagnostics of the system matrix (obtained from the same singular
    triplets, so diagnostics cost nothing extra).
    """
    system = assemble(model, problem, drop_tol)
    t = sparse_svd(system.H, cfg, seed=seed)
    beta, report = apply_truncated_pinv(t, system.H, system.T, cfg.trunc_eps)
    diag = diagnostics_from_spectrum(
        system.H, t.sigma, spectrum_truncated=len(t) < min(system.H.shape)
    )
    return dataclasses.replace(model, beta=beta), TrainReport(solve=report, diagnostics=diag)


def predict(model: RfnnModel, xs, drop_tol: float = 0.0) -> np.ndarray:
    """Evaluate the trained network at the given points."""
    if not model.trained:
        raise ValueError("model has no output layer yet; run train first")
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    out = np.empty(xs.shape[0])
    beta = np.asarray(model.beta)
    for i, x in enumerate(xs):
        lo, hi = _window(model, float(x))
        if lo >= hi:
            out[i] = 0.0
            continue
        vals = _window_values(model, float(x), (0,), lo, hi)[0]
        if drop_tol > 0:
            vals = np.where(np.abs(vals - np.tanh(model.b[lo:hi])) > drop_tol, vals, 0.0)
        out[i] = vals @ beta[lo:hi]
    return out


def exact_solution(problem: ConvDiffProblem, xs) -> np.ndarray:
    """Closed-form solution, safe against exponential overflow.

    phi(x) = phi0 + (phiL - phi0) * (e^(a x) - 1) / (e^(a L) - 1) with
    a = peclet. For large positive a*L the ratio is evaluated in the factored
    form e^(a(x-L)) (1 - e^(-a x)) / (1 - e^(-a L)), whose exponents are all
    non-positive; tiny a*L falls back to the linear limit.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    a = problem.peclet
    L = problem.length
    aL = a * L
    if abs(aL) < 1e-12:
        ratio = xs / L
    elif aL <= 30.0:
        ratio = np.expm1(a * xs) / np.expm1(aL)
    else:
        ratio = np.exp(a * (xs - L)) * (-np.expm1(-a * xs)) / (-np.expm1(-aL))
    return problem.phi0 + (problem.phiL - problem.phi0) * ratio


def error_metrics(model: RfnnModel, problem: ConvDiffProblem, grid) -> dict:
    """l2_rel, linf and boundary_err of the trained model on a grid."""
    grid = np.asarray(grid, dtype=np.float64)
    pred = predict(model, grid)
    exact = exact_solution(problem, grid)
    diff = pred - exact
    denom = np.linalg.norm(exact)
    l2_rel = float(np.linalg.norm(diff) / denom) if denom > 0 else float(np.linalg.norm(diff))
    ends = predict(model, np.array([0.0, problem.length]))
    boundary_err = max(abs(ends[0] - problem.phi0), abs(ends[1] - problem.phiL))
    return {
        "l2_rel": l2_rel,
        "linf": float(np.max(np.abs(diff))),
        "boundary_err": float(boundary_err),
    }


def write_solution_csv(model: RfnnModel, problem: ConvDiffProblem, grid, path) -> None:
    """CSV with columns x,predicted,exact,abs_error on the given grid."""
    grid = np.asarray(grid, dtype=np.float64)
    pred = predict(model, grid)
    exact = exact_solution(problem, grid)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "predicted", "exact", "abs_error"])
        for i in range(grid.shape[0]):
            w.writerow([repr(float(grid[i])), repr(float(pred[i])), repr(float(exact[i])), repr(abs(float(pred[i] - exact[i])))])
