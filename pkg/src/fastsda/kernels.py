"""RBF kernels, feature-space centering and prototype selection."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .clustering import kmeans
from .errors import NonpositiveSigma, RTooLarge, ShapeMismatch, TooFewSamples
from .linalg import check_symmetric


@dataclass
class KernelConfig:
    sigma: float
    mode: str = "exact"
    prototype_count: int = 1000
    prototype_strategy: str = "kmeans-all"
    # approximate mode only: double-center the reduced kernel around the
    # prototype mean in feature space
    center: bool = False

    def __post_init__(self):
        if not self.sigma > 0:
            raise NonpositiveSigma(f"sigma must be positive, got {self.sigma}")
        if self.mode not in ("exact", "approximate"):
            raise ValueError(f"unknown kernel mode {self.mode!r}")
        if self.prototype_strategy not in ("random-train", "kmeans-all"):
            raise ValueError(f"unknown prototype strategy {self.prototype_strategy!r}")
        if self.prototype_count < 1:
            raise RTooLarge("prototype_count must be at least 1")


@dataclass
class CenteringStats:
    train_kernel_row_means: np.ndarray
    train_kernel_grand_mean: float


def rbf_kernel(a, b, sigma):
    """``exp(-|a_i - b_j|^2 / (2 sigma^2))`` for columns of ``a`` (D, n), ``b`` (D, m)."""
    if not sigma > 0:
        raise NonpositiveSigma(f"sigma must be positive, got {sigma}")
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[0] != b.shape[0]:
        raise ShapeMismatch(f"feature dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    d2 = cdist(a.T, b.T, "sqeuclidean")
    return np.exp(-d2 / (2.0 * sigma * sigma))


def mean_distance_sigma(x):
    """Mean Euclidean distance over all unordered pairs of columns."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] < 2:
        raise TooFewSamples("need at least two samples")
    return float(pdist(x.T).mean())


def center_kernel(k):
    """``(I - E) K (I - E)`` with ``E = 11^T / N``, plus out-of-sample stats."""
    k = np.asarray(k, dtype=np.float64)
    check_symmetric(k, name="kernel")
    row_means = k.mean(axis=1)
    grand = float(row_means.mean())
    kc = k - row_means[:, None] - row_means[None, :] + grand
    return kc, CenteringStats(row_means, grand)


def center_test_columns(k_test, stats):
    """Center kernel columns ``k(X_train, x)`` consistently with :func:`center_kernel`.

    Column ``j`` becomes ``(I - E)(k_j - row_means)``.
    """
    k_test = np.asarray(k_test, dtype=np.float64)
    if k_test.ndim == 1:
        k_test = k_test[:, None]
    if k_test.shape[0] != stats.train_kernel_row_means.size:
        raise ShapeMismatch(
            f"test kernel has {k_test.shape[0]} rows, training set has "
            f"{stats.train_kernel_row_means.size} samples"
        )
    out = k_test - stats.train_kernel_row_means[:, None]
    return out - out.mean(axis=0, keepdims=True)


def select_prototypes(x, cfg, rng):
    """Reference vectors (D, r) for the approximate kernel."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[1]
    r = cfg.prototype_count
    if r > n:
        raise RTooLarge(f"{r} prototypes requested from {n} samples")
    if cfg.prototype_strategy == "random-train":
        return x[:, rng.permutation(n)[:r]]
    _, centers = kmeans(x, r, rng)
    return centers
