"""Target vectors that span the nonzero eigenspace of the between-class Laplacian.

Instead of eigendecomposing the N x N Laplacian, random vectors with the
Laplacian's block structure are generated and orthonormalized against the
ones vector. Two kinds of column are produced:

* class-level columns: one random value per (view, class), repeated inside
  the class; at most ``C - 1`` of them;
* subclass-level columns: for each group of classes sharing a size
  (smallest size first), ``m * (V*Z - 1)`` columns holding one random value
  per (view, class, subclass) of the group's classes and zeros elsewhere.

The single-view routine is the ``V = 1`` case of the multi-view one, so for
equal seeds both return identical matrices.
"""
import numpy as np

from .errors import EmptyResult, LayoutInvalid, RankDeficient
from .linalg import gram_schmidt

MAX_RETRIES = 5


def target_count(layout, dims=None):
    """``min(V*C*Z - 1, min(D_v), N)``; ``dims`` may be an int or per-view list."""
    d = min(layout.max_rank(), layout.n_samples)
    if dims is not None:
        d = min(d, int(np.min(np.atleast_1d(dims))))
    return d


def _random_values(rng, size):
    # strictly inside (1, 2): never zero, so no accidental overlap with the
    # zero pattern of subclass-level columns
    return 1.0 + rng.random(size)


def raw_target_columns(layout, d, rng):
    """Structured random columns before orthogonalization, a list of (V*N,) arrays."""
    n_views, n_cls, n_sub = layout.n_views, layout.n_classes, layout.n_subclasses
    cls_block = layout.view_labels * n_cls + layout.class_labels
    sub_block = layout.block_ids()
    cols = []
    for _ in range(min(d, n_cls - 1)):
        cols.append(_random_values(rng, n_views * n_cls)[cls_block])

    per_class = n_views * n_sub - 1
    if per_class > 0:
        sizes = layout.class_sizes
        for size in np.unique(sizes):
            group = np.flatnonzero(sizes == size)
            m = group.size
            if len(cols) + m * per_class > d:
                m = (d - len(cols)) // per_class
            in_group = np.isin(layout.class_labels, group)
            for _ in range(m * per_class):
                vals = _random_values(rng, n_views * n_cls * n_sub)[sub_block]
                cols.append(np.where(in_group, vals, 0.0))
            if len(cols) == d:
                break
    return cols


def make_targets(layout, d_cap=None, rng=None, max_retries=MAX_RETRIES):
    """Orthonormal, zero-sum, block-constant target matrix of shape (d, V*N).

    Parameters
    ----------
    layout : LabelLayout
    d_cap : int, optional
        Upper bound on the number of targets; defaults to
        ``min(V*C*Z - 1, N)``. Pass :func:`target_count` with the data
        dimensionality to also cap at ``D``.
    rng : numpy.random.Generator
    max_retries : int
        Fresh redraws allowed when orthogonalization loses a column.
    """
    rng = np.random.default_rng() if rng is None else rng
    d = target_count(layout) if d_cap is None else min(int(d_cap), target_count(layout))
    if d < 1:
        raise LayoutInvalid(
            "layout has no between-class structure (need V*C*Z > 1 and N > 1)"
        )
    ones = np.ones(layout.class_labels.size)
    if not raw_target_columns(layout, d, np.random.default_rng(0)):
        raise LayoutInvalid(f"a budget of {d} targets fits no complete column group")
    for _ in range(max_retries + 1):
        cols = raw_target_columns(layout, d, rng)
        raw = np.column_stack([ones] + cols)
        try:
            q = gram_schmidt(raw)
        except EmptyResult:
            continue
        if q.shape[1] == raw.shape[1]:
            return q[:, 1:].T
    raise RankDeficient(
        f"target orthogonalization lost a column in {max_retries + 1} attempts"
    )


def make_targets_single(layout, d_cap=None, rng=None):
    if layout.n_views != 1:
        raise LayoutInvalid("single-view targets need a one-view layout")
    return make_targets(layout, d_cap, rng)


def make_targets_multiview(layout, d_cap=None, rng=None):
    return make_targets(layout, d_cap, rng)
