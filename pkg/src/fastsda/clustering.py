"""Seeded k-means used to split every class into subclasses."""
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ClassTooSmall, DegenerateInput
from .layout import make_rng


def _kmeans_pp(x, k, rng):
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = cdist(x, x[chosen], "sqeuclidean")[:, 0]
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # every remaining point coincides with a chosen center
            free = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(free))
        chosen.append(idx)
        d2 = np.minimum(d2, cdist(x, x[idx:idx + 1], "sqeuclidean")[:, 0])
    return x[chosen].copy()


def _repair_empty(labels, d2, k):
    dist = d2[np.arange(labels.size), labels].copy()
    for j in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[j] > 0:
            continue
        movable = counts[labels] > 1
        i = int(np.argmax(np.where(movable, dist, -1.0)))
        labels[i] = j
        dist[i] = 0.0
    return labels


def kmeans(points, k, rng, max_iters=300, trace=None):
    """Lloyd's k-means from a k-means++ start.

    Parameters
    ----------
    points : array (D, n)
        Samples as columns.
    k : int
    rng : numpy.random.Generator
    max_iters : int
        Iterations stop earlier once assignments no longer change.
    trace : list, optional
        If given, the inertia after every center update is appended.

    Returns
    -------
    labels : array (n,)
    centers : array (D, k)
    """
    x = np.asarray(points, dtype=np.float64).T
    n = x.shape[0]
    if k < 1 or n < k:
        raise DegenerateInput(f"k-means needs 1 <= k <= n, got k={k}, n={n}")
    rng = make_rng(rng)
    centers = _kmeans_pp(x, k, rng)
    labels = None
    for _ in range(max_iters):
        d2 = cdist(x, centers, "sqeuclidean")
        new = _repair_empty(np.argmin(d2, axis=1), d2, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            centers[j] = x[labels == j].mean(axis=0)
        if trace is not None:
            trace.append(float(((x - centers[labels]) ** 2).sum()))
    return labels, centers.T.copy()


@dataclass
class SubclassAssignment:
    labels: np.ndarray
    z: int
    view: int = 0


def _canonical_relabel(local):
    k = local.max() + 1
    sizes = np.bincount(local, minlength=k)
    first = np.array([np.flatnonzero(local == j)[0] for j in range(k)])
    order = np.lexsort((first, sizes))
    remap = np.empty(k, dtype=np.int64)
    remap[order] = np.arange(k)
    return remap[local]


def cluster_within_classes(x, class_labels, z, rng, max_iters=300):
    """Run k-means with ``k = z`` separately inside every class.

    Subclass indices are canonical: ascending subclass size, ties broken by
    the position of the subclass's first sample. Each class draws from its
    own child stream of ``rng``. Samples of a class are visited in
    lexicographic coordinate order, so the result does not depend on how
    the input columns are permuted.
    """
    x = np.asarray(x, dtype=np.float64)
    class_labels = np.asarray(class_labels)
    classes = np.unique(class_labels)
    rng = make_rng(rng)
    children = rng.spawn(len(classes))
    out = np.empty(class_labels.size, dtype=np.int64)
    for c, child in zip(classes, children):
        idx = np.flatnonzero(class_labels == c)
        if idx.size < z:
            raise ClassTooSmall(int(c), z, idx.size)
        if z == 1:
            out[idx] = 0
            continue
        pts = x[:, idx]
        order = np.lexsort(pts[::-1])
        local, _ = kmeans(pts[:, order], z, child, max_iters=max_iters)
        out[idx[order]] = _canonical_relabel(local)
    return out


def assign_subclasses(view, z, rng, max_iters=300):
    """Subclass labels for one :class:`~fastsda.data.DataView`."""
    labels = cluster_within_classes(view.x, view.class_labels, z, rng, max_iters)
    return SubclassAssignment(labels, z, getattr(view, "view_index", 0))
