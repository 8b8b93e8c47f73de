"""Linear smoothers: least squares, ridge, Gaussian kernel ridge, and kNN.

Every smoother here is linear in the response vector, so a fit carries its
in-sample hat diagonal (the smoother matrix diagonal) and trace alongside the
fitted values.  Those two quantities feed the leave-one-out shortcut and the
covariance-penalty criteria.

kNN conventions: Euclidean distance, distance ties broken by lowest training
index, and each training point counts as its own nearest neighbor in-sample,
so the kNN hat diagonal is exactly 1/k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .datagen import TrainingSet
from .errors import DegenerateNeighbors, NotPositiveDefinite, RankDeficient
from .linalg import _cholesky_spd

__all__ = [
    "SmootherSpec",
    "FittedSmoother",
    "fit",
    "predict",
    "neighbor_sets",
    "gaussian_bandwidth",
    "kernel_matrix",
]

_VARIANTS = ("least_squares", "ridge", "kernel_ridge", "knn")
_KERNELS = ("gaussian", "linear")


@dataclass(frozen=True)
class SmootherSpec:
    """Which smoother to fit and with what tuning.

    ``lam`` is the ridge / kernel-ridge penalty, ``kernel`` and ``bandwidth``
    apply to kernel ridge (bandwidth ``None`` means the median pairwise
    distance of the training covariates), ``k`` is the neighbor count.
    """

    variant: str
    lam: float = 0.0
    kernel: str = "gaussian"
    bandwidth: float | None = None
    k: int = 1

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown smoother variant {self.variant!r}")
        if not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError("lam must be finite and >= 0")
        if self.variant == "kernel_ridge":
            if self.lam <= 0.0:
                raise ValueError("kernel ridge requires lam > 0")
            if self.kernel not in _KERNELS:
                raise ValueError(f"unknown kernel {self.kernel!r}")
            if self.bandwidth is not None and self.bandwidth <= 0:
                raise ValueError("bandwidth must be > 0")
        if self.variant == "knn" and self.k < 1:
            raise ValueError("k must be >= 1")

    @classmethod
    def least_squares(cls) -> "SmootherSpec":
        return cls("least_squares")

    @classmethod
    def ridge(cls, lam: float) -> "SmootherSpec":
        return cls("ridge", lam=lam)

    @classmethod
    def kernel_ridge(
        cls, lam: float, kernel: str = "gaussian", bandwidth: float | None = None
    ) -> "SmootherSpec":
        return cls("kernel_ridge", lam=lam, kernel=kernel, bandwidth=bandwidth)

    @classmethod
    def knn(cls, k: int) -> "SmootherSpec":
        return cls("knn", k=k)


@dataclass(frozen=True)
class FittedSmoother:
    """A trained linear smoother plus its in-sample diagnostics.

    ``coefficients`` holds the primal coefficients for least squares / ridge
    and the dual weights for kernel ridge; it is ``None`` for kNN, which
    predicts straight from the stored training responses.  ``bandwidth`` is
    the resolved kernel bandwidth (``None`` outside kernel ridge).
    """

    spec: SmootherSpec
    train_X: np.ndarray = field(repr=False)
    train_Y: np.ndarray = field(repr=False)
    coefficients: np.ndarray | None = field(repr=False)
    fitted: np.ndarray = field(repr=False)
    hat_diag: np.ndarray = field(repr=False)
    trace_S: float
    bandwidth: float | None = None

    @property
    def n(self) -> int:
        return self.train_X.shape[0]

    @property
    def p(self) -> int:
        return self.train_X.shape[1]

    @property
    def residuals(self) -> np.ndarray:
        return self.train_Y - self.fitted

    def predict(self, X0: np.ndarray) -> np.ndarray:
        return predict(self, X0)


# --------------------------------------------------------------------------
# fitting
# --------------------------------------------------------------------------

def _as_xy(X, Y) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(X, TrainingSet) and Y is None:
        X, Y = X.X, X.Y
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or Y.shape != (X.shape[0],):
        raise ValueError("need X (n, p) and Y (n,)")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise ValueError("X and Y must be finite")
    return X, Y


def _linear_fit(X: np.ndarray, Y: np.ndarray, lam: float):
    """Shared least squares / ridge path; factors the Gram matrix once."""
    n, p = X.shape
    G = X.T @ X
    if lam:
        G = G + lam * np.eye(p)
    try:
        factor = _cholesky_spd(G)
    except NotPositiveDefinite as exc:
        if lam == 0.0:
            raise RankDeficient(f"rank(X) < p for n={n}, p={p}") from exc
        raise
    beta = scipy.linalg.cho_solve(factor, X.T @ Y, check_finite=False)
    W = scipy.linalg.cho_solve(factor, X.T, check_finite=False)
    h = np.clip(np.einsum("ij,ji->i", X, W), 0.0, None)
    return beta, X @ beta, h


def fit(spec: SmootherSpec, X, Y=None) -> FittedSmoother:
    """Train a smoother.

    Parameters
    ----------
    spec : SmootherSpec
    X, Y : (n, p) and (n,) arrays, or a single `TrainingSet`

    Returns
    -------
    FittedSmoother

    Raises
    ------
    RankDeficient
        Least squares on a design with rank(X) < p.
    DegenerateNeighbors
        kNN with k > n.
    """
    X, Y = _as_xy(X, Y)
    n = X.shape[0]
    bandwidth = None

    if spec.variant in ("least_squares", "ridge"):
        beta, fitted, h = _linear_fit(X, Y, spec.lam)
        coef = beta
    elif spec.variant == "kernel_ridge":
        bandwidth = spec.bandwidth
        if spec.kernel == "gaussian" and bandwidth is None:
            bandwidth = gaussian_bandwidth(X)
        K = kernel_matrix(X, X, spec.kernel, bandwidth)
        factor = _cholesky_spd(K + spec.lam * np.eye(n))
        coef = scipy.linalg.cho_solve(factor, Y, check_finite=False)
        fitted = K @ coef
        # diag(K (K + lam I)^{-1}) via one more triangular solve
        h = np.diag(scipy.linalg.cho_solve(factor, K, check_finite=False)).copy()
        h = np.clip(h, 0.0, None)
    else:  # knn
        if spec.k > n:
            raise DegenerateNeighbors(f"k={spec.k} exceeds n={n}")
        nbrs = neighbor_sets(X, X, spec.k)
        coef = None
        fitted = Y[nbrs].mean(axis=1)
        h = np.full(n, 1.0 / spec.k)

    return FittedSmoother(
        spec=spec,
        train_X=X,
        train_Y=Y,
        coefficients=coef,
        fitted=fitted,
        hat_diag=h,
        trace_S=float(h.sum()),
        bandwidth=bandwidth,
    )


def predict(model: FittedSmoother, X0: np.ndarray) -> np.ndarray:
    """Evaluate a fitted smoother at new covariate rows."""
    X0 = np.asarray(X0, dtype=float)
    if X0.ndim != 2 or X0.shape[1] != model.p:
        raise ValueError(f"X0 must be (m, {model.p})")
    if not np.all(np.isfinite(X0)):
        raise ValueError("X0 must be finite")
    spec = model.spec
    if spec.variant in ("least_squares", "ridge"):
        return X0 @ model.coefficients
    if spec.variant == "kernel_ridge":
        K0 = kernel_matrix(X0, model.train_X, spec.kernel, model.bandwidth)
        return K0 @ model.coefficients
    nbrs = neighbor_sets(model.train_X, X0, spec.k)
    return model.train_Y[nbrs].mean(axis=1)


# --------------------------------------------------------------------------
# neighbors and kernels
# --------------------------------------------------------------------------

def _sq_distances(X0: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distances, computed from differences.

    The expanded dot-product form would round mathematically tied distances
    apart; forming differences keeps exact ties exact so the lowest-index
    tie-break is deterministic.
    """
    return ((X0[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)


def neighbor_sets(X: np.ndarray, X0: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest training rows for every query row.

    Parameters
    ----------
    X : (n, p) array
        Training rows.
    X0 : (m, p) array
        Query rows (may be X itself; a row at zero distance is its own
        first neighbor).
    k : int
        Neighbor count, 1 <= k <= n.

    Returns
    -------
    (m, k) int array
        Neighbor indices, nearest first, distance ties broken by lowest
        index.
    """
    X = np.asarray(X, dtype=float)
    X0 = np.asarray(X0, dtype=float)
    n, p = X.shape
    if not 1 <= k <= n:
        raise DegenerateNeighbors(f"k={k} outside 1..n={n}")
    m = X0.shape[0]
    out = np.empty((m, k), dtype=np.intp)
    # chunk queries to keep the (chunk, n, p) difference tensor modest
    chunk = max(1, int(4_000_000 // max(1, n * p)))
    for start in range(0, m, chunk):
        stop = min(m, start + chunk)
        d2 = _sq_distances(X0[start:stop], X)
        order = np.argsort(d2, axis=1, kind="stable")
        out[start:stop] = order[:, :k]
    return out


def gaussian_bandwidth(X: np.ndarray) -> float:
    """Median pairwise Euclidean distance of the rows (1.0 if degenerate)."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 2:
        return 1.0
    d2 = _sq_distances(X, X)
    iu = np.triu_indices(n, k=1)
    d = np.sqrt(d2[iu])
    d = d[d > 0]
    if d.size == 0:
        return 1.0
    return float(np.median(d))


def kernel_matrix(A: np.ndarray, B: np.ndarray, kernel: str, bandwidth: float | None) -> np.ndarray:
    """Kernel Gram block k(a_i, b_j) for the supported kernels."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if kernel == "linear":
        return A @ B.T
    if kernel != "gaussian":
        raise ValueError(f"unknown kernel {kernel!r}")
    if bandwidth is None or bandwidth <= 0:
        raise ValueError("gaussian kernel needs a positive bandwidth")
    d2 = _sq_distances(A, B)
    return np.exp(-d2 / (2.0 * bandwidth**2))
