"""Exact between-class Laplacians, scatter matrices and eigen-based baselines.

This module is the reference the fast path is checked against. Everything
here builds dense N x N (or VN x VN) matrices, so sizes are capped at
:data:`ORACLE_MAX_N`.
"""
from dataclasses import dataclass

import numpy as np

from .errors import LayoutInvalid, OracleTooLarge, ShapeMismatch
from .linalg import TOL, as_matrix, generalized_sym_eig, numerical_rank, symmetric_eig
from .regression import ProjectionModel, fit_linear, normalize_projection
from .targets import make_targets, target_count

ORACLE_MAX_N = 2000


@dataclass
class Laplacian:
    lb: np.ndarray
    kind: str
    layout: object

    def rank(self, rtol=TOL.rank_rtol):
        return numerical_rank(self.lb, rtol)

    def max_row_sum(self):
        return float(np.abs(self.lb.sum(axis=1)).max())


def _check_size(n):
    if n > ORACLE_MAX_N:
        raise OracleTooLarge(
            f"Laplacian oracle is limited to {ORACLE_MAX_N} samples, got {n}"
        )


def build_lb_single(layout):
    """Between-class Laplacian of a single view.

    Entry ``(i, j)`` is ``(N - N_c) / (N^2 N_ch)`` when ``i`` and ``j`` share
    subclass ``h`` of class ``c``, zero for the same class but different
    subclasses, and ``-1/N^2`` across classes.
    """
    if layout.n_views != 1:
        raise LayoutInvalid("single-view Laplacian needs a one-view layout")
    n = layout.n_samples
    _check_size(n)
    c = layout.class_labels
    blk = layout.block_ids()
    n_c = layout.class_sizes[c]
    n_ch = np.bincount(blk)[blk]
    lb = np.where(c[:, None] == c[None, :], 0.0, -1.0 / n**2)
    same_sub = blk[:, None] == blk[None, :]
    lb = np.where(same_sub, ((n - n_c) / (n**2 * n_ch))[:, None], lb)
    return Laplacian(lb, "single-view", layout)


def build_lb_multiview(layout):
    """Multi-view between-class Laplacian, (V*N, V*N), view-major.

    Same (view, class, subclass): ``2 V (N - N_p) / (N_pl N^2)``; different
    classes, in any pair of views: ``-2 / N^2``; everything else zero. For
    ``V = 1`` this is twice the single-view Laplacian.
    """
    n = layout.n_samples
    total = n * layout.n_views
    _check_size(total)
    c = layout.class_labels
    blk = layout.block_ids()
    n_p = layout.class_sizes[c]
    n_pl = np.bincount(blk)[blk]
    lb = np.where(c[:, None] == c[None, :], 0.0, -2.0 / n**2)
    same_sub = blk[:, None] == blk[None, :]
    diag = 2.0 * layout.n_views * (n - n_p) / (n_pl * n**2)
    lb = np.where(same_sub, diag[:, None], lb)
    return Laplacian(lb, "multi-view", layout)


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool

    def line(self):
        status = "pass" if self.passed else "FAIL"
        return f"{status}\t{self.name}\t{self.value:.3e}\t{self.limit:.3e}"


def structural_checks(layout, rng=None, lb=None, eig_method="jacobi"):
    """Run the invariant suite on a Laplacian and a fresh set of targets.

    ``lb`` defaults to the exact Laplacian of ``layout`` (multi-view when the
    layout has more than one view); pass a modified matrix to check it
    instead. Returns a list of :class:`Check`; rank checks report the
    observed rank as ``value`` and the expected rank as ``limit``.
    """
    if lb is None:
        built = build_lb_single(layout) if layout.n_views == 1 else build_lb_multiview(layout)
        lb = built.lb
    lb = as_matrix(lb, "lb")
    norm = np.linalg.norm(lb)
    expected = layout.max_rank()
    checks = []

    def add(name, value, limit, passed=None):
        value = float(value)
        checks.append(Check(name, value, float(limit),
                            value <= limit if passed is None else bool(passed)))

    add("symmetry", np.abs(lb - lb.T).max(), 1e-12 * np.abs(lb).max())
    add("row_sums", np.abs(lb.sum(axis=1)).max(), 1e-10)
    rank = numerical_rank(lb)
    add("rank", rank, expected, rank == expected)
    sym = 0.5 * (lb + lb.T)
    res = symmetric_eig(sym, method=eig_method)
    add("trace", abs(np.trace(sym) - res.values.sum()), 1e-10 * max(np.abs(np.trace(sym)), norm))
    nonzero = np.abs(res.values) > TOL.rank_rtol * np.abs(res.values).max()
    blk = layout.block_ids()
    spread = 0.0
    for b in np.unique(blk):
        vecs = res.vectors[blk == b][:, nonzero]
        spread = max(spread, float((vecs.max(axis=0) - vecs.min(axis=0)).max(initial=0.0)))
    add("block_constant", spread, 1e-8)

    t = make_targets(layout, rng=np.random.default_rng(rng))
    add("targets_orthonormal", np.abs(t @ t.T - np.eye(t.shape[0])).max(), 1e-10)
    add("targets_zero_sum", np.abs(t.sum(axis=1)).max(), 1e-10)
    add("target_count", t.shape[0], expected, t.shape[0] == expected)
    add("span_residual", np.linalg.norm(lb - t.T @ (t @ lb)), 1e-8 * norm)
    lt_rank = numerical_rank(sym @ t.T)
    add("span_rank", lt_rank, t.shape[0], lt_rank == t.shape[0])
    return checks


def _subclass_sums(x, layout):
    blk = layout.block_ids()
    sums = np.zeros((x.shape[0], layout.n_classes * layout.n_subclasses))
    np.add.at(sums.T, blk, x.T)
    counts = np.bincount(blk, minlength=sums.shape[1])
    return sums, counts


def between_scatter(x, layout, form="blocks"):
    """Between-class scatter of ``x`` (D, N) for a single-view layout.

    ``form="pairs"`` sums ``p_a p_b (mu_a - mu_b)(mu_a - mu_b)^T`` over all
    subclass pairs from different classes; ``"laplacian"`` returns
    ``X L_b X^T``; ``"blocks"`` expands the same quantity from subclass sums
    without forming any N x N matrix.
    """
    x = as_matrix(x, "x")
    if x.shape[1] != layout.n_samples or layout.n_views != 1:
        raise ShapeMismatch("x must have one column per sample of a one-view layout")
    n = layout.n_samples
    if form == "laplacian":
        return x @ build_lb_single(layout).lb @ x.T
    sums, counts = _subclass_sums(x, layout)
    cls_of_block = np.arange(sums.shape[1]) // layout.n_subclasses
    if form == "pairs":
        means = sums / counts
        priors = counts / n
        s_b = np.zeros((x.shape[0], x.shape[0]))
        for a in range(sums.shape[1]):
            for b in range(a + 1, sums.shape[1]):
                if cls_of_block[a] == cls_of_block[b]:
                    continue
                diff = means[:, a] - means[:, b]
                s_b += priors[a] * priors[b] * np.outer(diff, diff)
        return s_b
    if form != "blocks":
        raise ValueError(f"unknown form {form!r}")
    n_c = layout.class_sizes[cls_of_block]
    # sum_ch (N - N_c) / (N^2 N_ch) s_ch s_ch^T
    weighted = sums * ((n - n_c) / (n**2 * counts))
    s_b = weighted @ sums.T
    class_sums = sums.reshape(x.shape[0], layout.n_classes, layout.n_subclasses).sum(axis=2)
    total = class_sums.sum(axis=1)
    s_b -= (np.outer(total, total) - class_sums @ class_sums.T) / n**2
    return 0.5 * (s_b + s_b.T)


def scatter_matrices(x, layout):
    """``(S_t, S_b) = (X X^T, X L_b X^T)`` for mean-centered ``x`` (D, N)."""
    x = as_matrix(x, "x")
    return x @ x.T, between_scatter(x, layout, form="laplacian")


def sda_eig_baseline(x, layout, ridge=None, eig_method="lapack", normalization="l2"):
    """Subclass discriminant analysis by generalized eigendecomposition.

    Solves ``S_b w = lam (S_t + ridge I) w`` and keeps the leading
    ``min(C*Z - 1, D)`` eigenvectors. ``ridge`` defaults to
    ``1e-6 * trace(S_t) / D``. The LAPACK solver is the default because
    this routine serves as a timing baseline; pass ``eig_method="jacobi"``
    for the reference solver.
    """
    x = as_matrix(x, "x")
    mean = x.mean(axis=1)
    xc = x - mean[:, None]
    dim = x.shape[0]
    s_t = xc @ xc.T
    s_b = between_scatter(xc, layout, form="blocks")
    if ridge is None:
        ridge = 1e-6 * np.trace(s_t) / dim
    res = generalized_sym_eig(s_b, s_t, ridge=ridge, method=eig_method)
    d = min(layout.max_rank(), dim)
    model = ProjectionModel("linear", res.vectors[:, :d].copy(), mean,
                            info={"eigenvalues": res.values[:d], "ridge": ridge})
    return normalize_projection(model, normalization)


def laplacian_eig(layout, method="jacobi"):
    """Eigendecomposition of the single-view ``L_b`` (values descending)."""
    return symmetric_eig(build_lb_single(layout).lb, method=method)


def criterion_values(w, s_t, s_b):
    """Per-direction ratio ``w^T S_b w / w^T S_t w``."""
    num = np.einsum("ij,ik,kj->j", w, s_b, w)
    den = np.einsum("ij,ik,kj->j", w, s_t, w)
    return num / den


def sda_sorted_vectors_baseline(x, layout, alpha, eig_method="jacobi", normalization="l2",
                                eig=None):
    """Spectral regression on exact Laplacian eigenvectors.

    Eigenvectors of ``L_b`` with nonzero eigenvalue are regressed onto
    ``x`` and the resulting directions are sorted by the discriminant
    criterion ``w^T S_b w / w^T S_t w``, largest first. ``eig`` may carry a
    precomputed eigendecomposition of ``L_b`` (it does not depend on
    ``alpha``).
    """
    x = as_matrix(x, "x")
    res = eig if eig is not None else laplacian_eig(layout, eig_method)
    keep = res.values > TOL.rank_rtol * max(np.abs(res.values).max(), np.finfo(float).tiny)
    targets = res.vectors[:, keep].T
    d = min(targets.shape[0], target_count(layout, x.shape[0]))
    model = fit_linear(x, targets, alpha, normalization="none")
    xc = x - model.mean[:, None]
    s_t = xc @ xc.T
    s_b = between_scatter(xc, layout, form="blocks")
    crit = criterion_values(model.coef, s_t, s_b)
    order = np.argsort(-crit, kind="stable")[:d]
    model.coef = model.coef[:, order]
    model.info = {"criterion": crit[order], "eigenvalues": res.values[keep][order]}
    return normalize_projection(model, normalization)
