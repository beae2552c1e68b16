"""Cross-validated evaluation and wall-clock benchmarks.

Protocol per rotation of a stratified five-fold split (three folds train,
one validation, one test):

1. fit standardization (and, for single-view methods, PCA keeping 98% of
   the energy) on the training split only;
2. split every class of the training split into ``Z`` subclasses with
   k-means, once per (rotation, Z), per view;
3. grid-search ``(Z, alpha)`` by validation accuracy of a 5-NN classifier
   in the learned space; ties go to the earlier grid entry;
4. refit the winner on the training split, time it, and score the test
   split once.
"""
import os
import platform
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .clustering import cluster_within_classes
from .errors import ClassTooSmall, DegenerateData, KTooLarge, NumericalError
from .kernels import KernelConfig, mean_distance_sigma, select_prototypes
from .laplacian import laplacian_eig, sda_eig_baseline, sda_sorted_vectors_baseline
from .layout import LabelLayout
from .pipeline import fit_fastsda, fit_mvsda
from .regression import fit_approx_model
from .targets import make_targets, target_count

METHODS = (
    "fastsda-linear",
    "fastsda-kernel",
    "fastsda-approx",
    "mvsda-linear",
    "mvsda-kernel",
    "oracle-sda",
    "oracle-sorted",
)
MULTIVIEW_METHODS = ("mvsda-linear", "mvsda-kernel")


@dataclass
class EvalConfig:
    folds: int = 5
    knn_k: int = 5
    z_grid: tuple = (1, 2, 3, 4, 5, 6)
    alpha_grid: tuple = (1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3)
    pca_energy: float = 0.98
    seed: int = 0
    prototype_count: int = 1000
    prototype_strategy: str = "kmeans-all"
    timing_repeats: int = 1
    sigma: float | None = None  # RBF width; None picks the mean pairwise distance

    def __post_init__(self):
        if self.folds < 3:
            raise ValueError("need at least 3 folds (train, validation, test)")
        if not self.z_grid or not self.alpha_grid:
            raise ValueError("grids must be non-empty")


@dataclass
class RotationResult:
    rotation: int
    z: int
    alpha: float
    d: int
    val_accuracy: float
    test_accuracy: float
    fit_seconds: float


@dataclass
class EvalReport:
    dataset: str
    method: str
    seed: int
    rotations: list
    machine: dict = field(default_factory=dict)

    @property
    def fold_accuracies(self):
        return [r.test_accuracy for r in self.rotations]

    @property
    def mean_accuracy(self):
        return float(np.mean(self.fold_accuracies))

    @property
    def std_accuracy(self):
        return float(np.std(self.fold_accuracies))

    @property
    def chosen(self):
        return [(r.z, r.alpha) for r in self.rotations]

    @property
    def fit_seconds(self):
        return [r.fit_seconds for r in self.rotations]

    TSV_COLUMNS = ("rotation", "z", "alpha", "d", "val_accuracy", "test_accuracy")
    TIMING_COLUMNS = ("rotation", "fit_seconds")

    def tsv_rows(self):
        """Deterministic per-rotation rows (no timings)."""
        return [[str(r.rotation), str(r.z), "%g" % r.alpha, str(r.d),
                 "%.6f" % r.val_accuracy, "%.6f" % r.test_accuracy] for r in self.rotations]

    def timing_rows(self):
        return [[str(r.rotation), "%.6f" % r.fit_seconds] for r in self.rotations]

    def summary(self, timing=True):
        """Human-readable report; ``timing=False`` leaves out wall-clock figures."""
        zs = [r.z for r in self.rotations]
        lines = [
            f"dataset: {self.dataset}",
            f"method: {self.method}",
            f"seed: {self.seed}",
            f"mean test accuracy: {100 * self.mean_accuracy:.2f}% "
            f"(std {100 * self.std_accuracy:.2f})",
            f"most frequent Z: {max(set(zs), key=zs.count)}",
        ]
        for r in self.rotations:
            lines.append(f"rotation {r.rotation}: Z={r.z} alpha={r.alpha:g} d={r.d} "
                         f"val={100 * r.val_accuracy:.2f}% test={100 * r.test_accuracy:.2f}%")
        if timing:
            lines.append(f"median fit seconds: {statistics.median(self.fit_seconds):.6f}")
            lines += [f"machine {k}: {v}" for k, v in self.machine.items()]
        return "\n".join(lines)


def machine_info():
    return {"platform": platform.platform(), "processor": platform.processor() or "unknown",
            "cpus": os.cpu_count(), "python": platform.python_version()}


def standardize(x):
    """Per-feature zero mean and unit variance; returns ``(x_std, means, stds)``.

    Zero-variance features are only centered (their std is recorded as 1).
    """
    x = np.asarray(x, dtype=np.float64)
    means = x.mean(axis=1)
    stds = x.std(axis=1)
    stds[stds == 0] = 1.0
    return (x - means[:, None]) / stds[:, None], means, stds


def apply_standardize(x, means, stds):
    return (np.asarray(x, dtype=np.float64) - means[:, None]) / stds[:, None]


def destandardize(x_std, means, stds):
    return x_std * stds[:, None] + means[:, None]


def pca_reduce(x, energy=0.98):
    """Principal components of centered ``x`` (D, N) holding ``energy`` of the variance.

    Returns ``(projection, transformed)`` with ``projection`` (D, D') and
    ``transformed = projection.T @ (x - mean)``. ``D'`` is the smallest
    count whose eigenvalue sum reaches ``energy`` of the total, never more
    than the numerical rank of the centered data.
    """
    if not 0 < energy <= 1:
        raise ValueError("energy must be in (0, 1]")
    x = np.asarray(x, dtype=np.float64)
    xc = x - x.mean(axis=1, keepdims=True)
    u, s, _ = np.linalg.svd(xc, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        raise DegenerateData("data has zero variance")
    rank = int(np.sum(s > 1e-10 * s[0]))
    var = s[:rank] ** 2
    cum = np.cumsum(var) / var.sum()
    keep = min(int(np.searchsorted(cum, energy * (1 - 1e-12))) + 1, rank)
    proj = u[:, :keep]
    # deterministic signs: largest-magnitude entry positive
    flip = np.sign(proj[np.argmax(np.abs(proj), axis=0), np.arange(keep)])
    proj = proj * flip
    return proj, proj.T @ xc


def stratified_folds(labels, folds=5, seed=0):
    """Fold index per sample: seeded shuffle per class, then round-robin.

    The round-robin start of each class continues where the previous class
    stopped, which also balances total fold sizes.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    out = np.empty(labels.size, dtype=np.int64)
    offset = 0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size < folds:
            raise ClassTooSmall(int(c), folds, idx.size)
        idx = rng.permutation(idx)
        out[idx] = (offset + np.arange(idx.size)) % folds
        offset = (offset + idx.size) % folds
    return out


def rotation_splits(fold_of, folds=5):
    """``(train, val, test)`` index arrays for every rotation.

    Rotation ``i`` trains on folds ``i, i+1, i+2``, validates on ``i+3``
    and tests on ``i+4`` (mod ``folds``); with more than five folds the
    remaining folds are added to the training split.
    """
    fold_of = np.asarray(fold_of)
    out = []
    for i in range(folds):
        val_f, test_f = (i + folds - 2) % folds, (i + folds - 1) % folds
        val = np.flatnonzero(fold_of == val_f)
        test = np.flatnonzero(fold_of == test_f)
        train = np.flatnonzero((fold_of != val_f) & (fold_of != test_f))
        out.append((train, val, test))
    return out


def knn_predict(train_y, train_labels, test_y, k=5):
    """k-nearest-neighbour majority vote in Euclidean distance.

    Ties in the vote go to the class with the smaller mean distance among
    its voting neighbours, then to the smaller label.
    """
    train_y = np.atleast_2d(train_y)
    test_y = np.atleast_2d(test_y)
    train_labels = np.asarray(train_labels)
    n = train_y.shape[1]
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} with {n} training samples")
    dist = cdist(test_y.T, train_y.T)
    nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
    out = np.empty(test_y.shape[1], dtype=train_labels.dtype)
    for i in range(test_y.shape[1]):
        labs = train_labels[nearest[i]]
        ds = dist[i, nearest[i]]
        classes, counts = np.unique(labs, return_counts=True)
        best = classes[counts == counts.max()]
        if best.size > 1:
            means = np.array([ds[labs == c].mean() for c in best])
            best = best[means == means.min()]
        out[i] = best.min()
    return out


def accuracy(pred, truth):
    return float(np.mean(np.asarray(pred) == np.asarray(truth)))


def _rng(cfg, *keys):
    return np.random.default_rng([cfg.seed, *keys])


def _median_time(fn, repeats):
    times, result = [], None
    for _ in range(max(1, repeats)):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return result, statistics.median(times)


class _Rotation:
    """Preprocessed splits and cached subclass labels of one rotation."""

    def __init__(self, dataset, split, cfg, rotation, multiview):
        self.cfg = cfg
        self.rotation = rotation
        self.multiview = multiview
        train, val, test = split
        self.idx = {"train": train, "val": val, "test": test}
        y = dataset.class_labels
        self.labels = {k: y[v] for k, v in self.idx.items()}
        if multiview:
            self.views = {k: [] for k in self.idx}
            for view in dataset.views:
                xt, means, stds = standardize(view.x[:, train])
                self.views["train"].append(xt)
                for k in ("val", "test"):
                    self.views[k].append(apply_standardize(view.x[:, self.idx[k]], means, stds))
        else:
            x = dataset.concatenated().x
            xt, means, stds = standardize(x[:, train])
            proj, xt = pca_reduce(xt, cfg.pca_energy)
            self.data = {"train": xt}
            for k in ("val", "test"):
                self.data[k] = proj.T @ apply_standardize(x[:, self.idx[k]], means, stds)
        self._subclasses = {}
        self._eig = {}

    def feasible(self, z):
        return np.bincount(self.labels["train"]).min() >= z

    def subclasses(self, z):
        if z not in self._subclasses:
            y = self.labels["train"]
            if self.multiview:
                self._subclasses[z] = [
                    cluster_within_classes(x, y, z, _rng(self.cfg, self.rotation, z, 100 + v))
                    for v, x in enumerate(self.views["train"])
                ]
            else:
                self._subclasses[z] = cluster_within_classes(
                    self.data["train"], y, z, _rng(self.cfg, self.rotation, z, 11)
                )
        return self._subclasses[z]

    def laplacian_eig(self, z):
        if z not in self._eig:
            layout = LabelLayout.single(self.labels["train"], self.subclasses(z))
            self._eig[z] = laplacian_eig(layout)
        return self._eig[z]


def _method_fitter(method, rot, cfg):
    """Return ``fit(z, alpha) -> model`` and ``embed(model, split) -> Y``."""
    y = rot.labels["train"]
    if method in MULTIVIEW_METHODS:
        xs = rot.views["train"]
        kind = method.split("-")[1]
        sigmas = None
        if kind == "kernel":
            sigmas = [cfg.sigma or mean_distance_sigma(x) for x in xs]

        def fit(z, alpha):
            return fit_mvsda(xs, y, rot.subclasses(z), alpha,
                             _rng(cfg, rot.rotation, z, 21), kind=kind, sigmas=sigmas)

        def embed(model, split):
            return model.transform(rot.views[split])

        return fit, embed

    x = rot.data["train"]

    def embed(model, split):
        return model.transform(rot.data[split])

    if method == "oracle-sda":
        def fit(z, alpha):
            return sda_eig_baseline(x, LabelLayout.single(y, rot.subclasses(z)))
    elif method == "oracle-sorted":
        def fit(z, alpha):
            layout = LabelLayout.single(y, rot.subclasses(z))
            return sda_sorted_vectors_baseline(x, layout, alpha, eig=rot.laplacian_eig(z))
    else:
        kind = method.split("-")[1]
        kernel = None
        if kind == "kernel":
            kernel = KernelConfig(cfg.sigma or mean_distance_sigma(x))
        elif kind == "approx":
            kernel = KernelConfig(cfg.sigma or mean_distance_sigma(x), mode="approximate",
                                  prototype_count=min(cfg.prototype_count, x.shape[1]),
                                  prototype_strategy=cfg.prototype_strategy)
            # prototypes depend on the training split only; share them across the grid
            protos = select_prototypes(x, kernel, _rng(cfg, rot.rotation, 31))

            def fit(z, alpha):
                layout = LabelLayout.single(y, rot.subclasses(z))
                t = make_targets(layout, target_count(layout), _rng(cfg, rot.rotation, z, 21))
                model = fit_approx_model(x, t, alpha, kernel, prototypes=protos)
                model.info["d"] = t.shape[0]
                return model

            return fit, embed

        def fit(z, alpha):
            return fit_fastsda(x, y, rot.subclasses(z), alpha,
                               _rng(cfg, rot.rotation, z, 21), kind=kind, kernel=kernel)

    return fit, embed


def evaluate_rotation(dataset, method, cfg, rotation, split):
    """Grid search, refit and test scoring for one rotation."""
    multiview = method in MULTIVIEW_METHODS
    rot = _Rotation(dataset, split, cfg, rotation, multiview)
    fit, embed = _method_fitter(method, rot, cfg)
    # the eigen baseline has no regression step, so alpha plays no role
    alphas = (cfg.alpha_grid[0],) if method == "oracle-sda" else cfg.alpha_grid
    best = None
    for z in cfg.z_grid:
        if not rot.feasible(z):
            continue
        for alpha in alphas:
            try:
                model = fit(z, alpha)
            except NumericalError:
                continue
            pred = knn_predict(embed(model, "train"), rot.labels["train"],
                               embed(model, "val"), cfg.knn_k)
            acc = accuracy(pred, rot.labels["val"])
            if best is None or acc > best[0]:
                best = (acc, z, alpha)
    if best is None:
        raise NumericalError(f"no grid point could be fitted in rotation {rotation}")
    val_acc, z, alpha = best

    def refit():
        if multiview:
            rot._subclasses.pop(z, None)  # clustering is part of multi-view fit time
        return fit(z, alpha)

    model, seconds = _median_time(refit, cfg.timing_repeats)
    pred = knn_predict(embed(model, "train"), rot.labels["train"],
                       embed(model, "test"), cfg.knn_k)
    return RotationResult(rotation, z, alpha, model.info.get("d", model.d), val_acc,
                          accuracy(pred, rot.labels["test"]), seconds)


def run_experiment(dataset, method, cfg=None, name=None, jobs=1):
    """Evaluate ``method`` on ``dataset`` (a :class:`MultiViewDataset`).

    Single-view methods use all views concatenated. Returns an
    :class:`EvalReport` with one row per rotation. With ``jobs > 1``
    rotations run in worker processes; accuracies are unaffected because
    every random stream is keyed by (seed, rotation, Z), but fit timings
    then share the machine.
    """
    cfg = cfg or EvalConfig()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    fold_of = stratified_folds(dataset.class_labels, cfg.folds, cfg.seed)
    splits = rotation_splits(fold_of, cfg.folds)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(evaluate_rotation, dataset, method, cfg, r, split)
                       for r, split in enumerate(splits)]
            results = [f.result() for f in futures]
    else:
        results = [evaluate_rotation(dataset, method, cfg, r, split)
                   for r, split in enumerate(splits)]
    return EvalReport(name or dataset.name, method, cfg.seed, results, machine_info())


def gaussian_mixture(n, dim, n_classes, n_sub, rng, spread=3.0, noise=1.0):
    """Synthetic multimodal data.

    Every class is a mixture of ``n_sub`` isotropic Gaussians with centers
    drawn from ``N(0, spread^2 I)``. Returns ``(x, class_labels,
    subclass_labels)`` with ``x`` of shape (dim, n); component sizes differ
    by at most one.
    """
    rng = np.random.default_rng(rng)
    comps = n_classes * n_sub
    comp = np.arange(n) % comps
    centers = rng.normal(scale=spread, size=(dim, comps))
    x = centers[:, comp] + rng.normal(scale=noise, size=(dim, n))
    return x, comp // n_sub, comp % n_sub


@dataclass
class BenchRow:
    dim: int
    n: int
    c: int
    z: int
    t_oracle: float
    t_fast: float

    @property
    def ratio(self):
        """Speed-up of the fast fit over the eigendecomposition baseline."""
        return self.t_oracle / self.t_fast


def benchmark_speed(d_grid, n_grid, c, z, seed=0, repeats=5, alpha=1.0):
    """Median fit times of the eigen baseline and the fast linear fit.

    Both fits receive the same synthetic data and subclass labels (the
    mixture components), so clustering is excluded from both timings.
    """
    rows = []
    for n in n_grid:
        for dim in d_grid:
            x, cls, sub = gaussian_mixture(n, dim, c, z, [seed, dim, n])
            layout = LabelLayout.single(cls, sub)
            _, t_oracle = _median_time(lambda: sda_eig_baseline(x, layout), repeats)
            _, t_fast = _median_time(
                lambda: fit_fastsda(x, cls, sub, alpha, np.random.default_rng(seed)), repeats
            )
            rows.append(BenchRow(dim, n, c, z, t_oracle, t_fast))
    return rows
