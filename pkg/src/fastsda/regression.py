"""Ridge regression of target vectors onto data, kernels or prototypes.

Three projection variants are supported:

``linear``
    ``W`` (D, d) applied to mean-centered inputs.
``kernel``
    ``A`` (N, d) applied to centered kernel columns against the stored
    training set.
``approx-kernel``
    ``A`` (r, d) applied to kernel columns against ``r`` prototypes.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EmptyResult, RankDeficientProjection, ShapeMismatch
from .kernels import (
    KernelConfig,
    center_kernel,
    center_test_columns,
    rbf_kernel,
    select_prototypes,
)
from .linalg import as_matrix, check_symmetric, cholesky_solve, gram_schmidt

NORMALIZATIONS = ("none", "l2", "orthogonal")
KERNEL_SOLVERS = ("direct", "full-gram")


@dataclass
class ProjectionModel:
    """A fitted projection.

    Attributes
    ----------
    variant : {"linear", "kernel", "approx-kernel"}
    coef : ndarray
        ``W`` (D, d), or ``A`` (N, d) / (r, d) for the kernel variants.
    mean : ndarray (D,)
        Training mean subtracted from every input.
    normalization : {"none", "l2", "orthogonal"}
    basis : ndarray (D, N) or (D, r), optional
        Centered training samples or prototypes for kernel variants.
    kernel : KernelConfig, optional
    centering : CenteringStats, optional
        Present for exact kernels, and for approximate kernels fitted
        with ``center=True``.
    info : dict
        Free-form fit diagnostics (never used by :func:`transform`).
    """

    variant: str
    coef: np.ndarray
    mean: np.ndarray
    normalization: str = "none"
    basis: np.ndarray = None
    kernel: KernelConfig = None
    centering: object = None
    info: dict = field(default_factory=dict)

    @property
    def d(self):
        return self.coef.shape[1]

    @property
    def w(self):
        if self.variant != "linear":
            raise AttributeError("kernel models have coefficients 'a', not 'w'")
        return self.coef

    @property
    def a(self):
        if self.variant == "linear":
            raise AttributeError("linear models have weights 'w', not 'a'")
        return self.coef

    def transform(self, x_new):
        return transform(self, x_new)


def _check_targets(t, n):
    t = as_matrix(t, "targets")
    if t.shape[1] != n:
        raise ShapeMismatch(f"targets have {t.shape[1]} columns, data has {n} samples")
    return t


def fit_linear(x, t, alpha, normalization="l2", branch="auto"):
    """Regress targets ``t`` (d, N) onto data ``x`` (D, N).

    ``W = (X X^T + alpha I)^-1 X T^T`` when ``N > D``, otherwise the
    equivalent ``W = X (X^T X + alpha I)^-1 T^T``; ``branch`` forces
    ``"primal"`` or ``"dual"``. ``x`` is centered internally and its mean
    stored on the model.
    """
    x = as_matrix(x, "x")
    t = _check_targets(t, x.shape[1])
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    dim, n = x.shape
    mean = x.mean(axis=1)
    xc = x - mean[:, None]
    if branch == "auto":
        branch = "primal" if n > dim else "dual"
    if branch == "primal":
        gram = xc @ xc.T
        gram[np.diag_indices(dim)] += alpha
        w = cholesky_solve(gram, xc @ t.T)
    elif branch == "dual":
        gram = xc.T @ xc
        gram[np.diag_indices(n)] += alpha
        w = xc @ cholesky_solve(gram, t.T)
    else:
        raise ValueError(f"unknown branch {branch!r}")
    model = ProjectionModel("linear", w, mean)
    return normalize_projection(model, normalization)


def _check_alpha_kernel(alpha):
    if not alpha > 0:
        raise ValueError("kernel regression needs alpha > 0 (centered kernels are singular)")


def fit_kernel(k_centered, t, alpha, solver="direct"):
    """Coefficients ``A`` (N, d) for a centered training kernel.

    ``solver="direct"`` returns ``(K + alpha I)^-1 T^T``; ``"full-gram"``
    returns ``(K K^T + alpha I)^-1 K T^T``.
    """
    k = as_matrix(k_centered, "kernel")
    check_symmetric(k, name="kernel")
    t = _check_targets(t, k.shape[0])
    _check_alpha_kernel(alpha)
    n = k.shape[0]
    if solver == "direct":
        system = k.copy()
        rhs = t.T
    elif solver == "full-gram":
        system = k @ k.T
        rhs = k @ t.T
    else:
        raise ValueError(f"unknown kernel solver {solver!r}")
    system[np.diag_indices(n)] += alpha
    system = 0.5 * (system + system.T)
    return cholesky_solve(system, rhs)


def fit_kernel_approx(k_hat, t, alpha):
    """Coefficients ``A`` (r, d) = ``(K K^T + alpha I)^-1 K T^T`` for ``K`` (r, N)."""
    k_hat = as_matrix(k_hat, "k_hat")
    t = _check_targets(t, k_hat.shape[1])
    _check_alpha_kernel(alpha)
    system = k_hat @ k_hat.T
    system[np.diag_indices(system.shape[0])] += alpha
    system = 0.5 * (system + system.T)
    return cholesky_solve(system, k_hat @ t.T)


def _prototype_kernel(model):
    kpp = rbf_kernel(model.basis, model.basis, model.kernel.sigma)
    if model.centering is not None:
        kpp = center_kernel(kpp)[0]
    return kpp


def normalize_projection(model, mode, k=None):
    """Rescale or orthonormalize projection columns.

    ``"l2"`` gives unit-norm columns of ``W`` or ``A``. ``"orthogonal"``
    runs Gram-Schmidt in the Euclidean inner product for ``W`` and in the
    ``K``-weighted one for ``A``, so that ``A^T K A = I``. ``k`` is the
    centered training kernel (exact variant) or prototype kernel
    (approximate variant); it is recomputed from the model when omitted.
    """
    mode = "none" if mode is None else mode
    if mode not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {mode!r}")
    coef = model.coef
    if mode == "l2":
        norms = np.linalg.norm(coef, axis=0)
        if np.any(norms == 0):
            raise RankDeficientProjection("projection has an all-zero direction")
        coef = coef / norms
    elif mode == "orthogonal":
        metric = None
        if model.variant == "kernel":
            if k is None:
                raw = rbf_kernel(model.basis, model.basis, model.kernel.sigma)
                k = center_kernel(raw)[0]
            metric = k
        elif model.variant == "approx-kernel":
            metric = _prototype_kernel(model) if k is None else k
        try:
            ortho = gram_schmidt(coef, metric=metric)
        except EmptyResult:
            ortho = np.empty((coef.shape[0], 0))
        if ortho.shape[1] != coef.shape[1]:
            raise RankDeficientProjection(
                f"orthogonalization kept {ortho.shape[1]} of {coef.shape[1]} directions"
            )
        coef = ortho
    return replace(model, coef=coef, normalization=mode)


def _kernel_columns(model, xc):
    k = rbf_kernel(model.basis, xc, model.kernel.sigma)
    if model.centering is not None:
        k = center_test_columns(k, model.centering)
    return k


def transform(model, x_new):
    """Embed columns of ``x_new`` (D, m); returns (d, m)."""
    x_new = as_matrix(x_new, "x_new")
    if x_new.shape[0] != model.mean.size:
        raise ShapeMismatch(
            f"model expects {model.mean.size} features, got {x_new.shape[0]}"
        )
    xc = x_new - model.mean[:, None]
    if model.variant == "linear":
        return model.coef.T @ xc
    return model.coef.T @ _kernel_columns(model, xc)


def fit_kernel_model(x, t, alpha, cfg, solver="direct", normalization="l2"):
    """Exact kernel pipeline: RBF kernel, double-centering, regression."""
    x = as_matrix(x, "x")
    t = _check_targets(t, x.shape[1])
    mean = x.mean(axis=1)
    xc = x - mean[:, None]
    kc, stats = center_kernel(rbf_kernel(xc, xc, cfg.sigma))
    a = fit_kernel(kc, t, alpha, solver)
    model = ProjectionModel("kernel", a, mean, basis=xc, kernel=cfg, centering=stats,
                            info={"solver": solver})
    return normalize_projection(model, normalization, k=kc)


def fit_approx_model(x, t, alpha, cfg, rng=None, prototypes=None, normalization="l2"):
    """Approximate kernel pipeline on ``r`` prototypes.

    Prototypes are drawn with :func:`~fastsda.kernels.select_prototypes`
    unless given (in input coordinates). With ``cfg.center`` the reduced
    kernel is centered around the prototype mean in feature space; with
    prototypes equal to the training set this reproduces the exact
    full-gram pipeline.
    """
    x = as_matrix(x, "x")
    t = _check_targets(t, x.shape[1])
    mean = x.mean(axis=1)
    xc = x - mean[:, None]
    if prototypes is None:
        protos = select_prototypes(xc, cfg, np.random.default_rng(rng))
    else:
        protos = as_matrix(prototypes, "prototypes") - mean[:, None]
    k_hat = rbf_kernel(protos, xc, cfg.sigma)
    kpp = rbf_kernel(protos, protos, cfg.sigma)
    stats = None
    if cfg.center:
        kpp, stats = center_kernel(kpp)
        k_hat = center_test_columns(k_hat, stats)
    a = fit_kernel_approx(k_hat, t, alpha)
    model = ProjectionModel("approx-kernel", a, mean, basis=protos, kernel=cfg,
                            centering=stats)
    return normalize_projection(model, normalization, k=kpp)


@dataclass
class MultiViewModel:
    """Per-view projections into one shared latent space.

    :meth:`transform` returns the per-view embeddings stacked vertically,
    ``(V * d, m)``, which is what the evaluation harness classifies.
    """

    views: list
    normalization: str = "l2"
    info: dict = field(default_factory=dict)

    @property
    def d(self):
        return self.views[0].d

    @property
    def n_views(self):
        return len(self.views)

    def transform_views(self, xs):
        if len(xs) != len(self.views):
            raise ShapeMismatch(f"model has {len(self.views)} views, got {len(xs)}")
        return [transform(m, x) for m, x in zip(self.views, xs)]

    def transform(self, xs):
        return np.vstack(self.transform_views(xs))


def _stacked_l2(models):
    norms = np.sqrt(sum((m.coef ** 2).sum(axis=0) for m in models))
    if np.any(norms == 0):
        raise RankDeficientProjection("projection has an all-zero direction")
    return [replace(m, coef=m.coef / norms, normalization="l2") for m in models]


def _split_views(t, n_views, n):
    t = as_matrix(t, "targets")
    if t.shape[1] != n_views * n:
        raise ShapeMismatch(f"targets have {t.shape[1]} columns, expected {n_views * n}")
    return [t[:, v * n:(v + 1) * n] for v in range(n_views)]


def _finish_multiview(models, normalization):
    if normalization == "l2":
        models = _stacked_l2(models)
    elif normalization == "orthogonal":
        models = [normalize_projection(m, "orthogonal") for m in models]
    elif normalization not in (None, "none"):
        raise ValueError(f"unknown normalization {normalization!r}")
    return MultiViewModel(models, normalization or "none")


def fit_multiview_linear(xs, t, alpha, normalization="l2"):
    """Regress view-major targets ``t`` (d, V*N) onto block-diagonal data.

    The ridge system is block-diagonal, so every view is solved on its own;
    ``"l2"`` normalizes the columns of the stacked ``W``.
    """
    n = as_matrix(xs[0], "x").shape[1]
    parts = _split_views(t, len(xs), n)
    models = [fit_linear(x, tv, alpha, normalization="none") for x, tv in zip(xs, parts)]
    return _finish_multiview(models, normalization)


def fit_multiview_kernel(xs, t, alpha, sigmas, normalization="l2"):
    """Kernel counterpart of :func:`fit_multiview_linear` (direct solver)."""
    n = as_matrix(xs[0], "x").shape[1]
    parts = _split_views(t, len(xs), n)
    models = [
        fit_kernel_model(x, tv, alpha, KernelConfig(s), normalization="none")
        for x, tv, s in zip(xs, parts, sigmas)
    ]
    return _finish_multiview(models, normalization)
