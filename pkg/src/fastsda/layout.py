"""Class/subclass/view label bookkeeping shared by targets and Laplacians."""
from dataclasses import dataclass

import numpy as np

from .errors import LayoutInvalid


def make_rng(seed):
    """numpy PCG64 generator; child streams come from ``Generator.spawn``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class LabelLayout:
    """Per-sample class, subclass and view labels.

    Arrays have length ``V * N``: view 0's ``N`` samples first, then view 1's,
    and so on. Within every view the samples appear in the same order and
    carry the same class labels; subclass labels may differ between views.
    Samples need not be sorted; :meth:`canonical_order` gives the
    (view, class, subclass, index) sort used in the literature.
    """

    class_labels: np.ndarray
    subclass_labels: np.ndarray
    view_labels: np.ndarray
    n_classes: int
    n_subclasses: int
    n_views: int

    @classmethod
    def single(cls, class_labels, subclass_labels):
        c = np.asarray(class_labels, dtype=np.int64)
        s = np.asarray(subclass_labels, dtype=np.int64)
        return cls._build(c, s, np.zeros_like(c), 1)

    @classmethod
    def multiview(cls, class_labels, subclass_labels_per_view):
        c = np.asarray(class_labels, dtype=np.int64)
        subs = [np.asarray(s, dtype=np.int64) for s in subclass_labels_per_view]
        if not subs:
            raise LayoutInvalid("need at least one view")
        for s in subs:
            if s.shape != c.shape:
                raise LayoutInvalid("subclass labels must match class labels in length")
        n_views = len(subs)
        views = np.repeat(np.arange(n_views), c.size)
        return cls._build(np.tile(c, n_views), np.concatenate(subs), views, n_views)

    @classmethod
    def _build(cls, c, s, v, n_views):
        if c.ndim != 1 or c.size == 0 or c.shape != s.shape:
            raise LayoutInvalid("labels must be non-empty 1-D arrays of equal length")
        if c.min() < 0 or s.min() < 0:
            raise LayoutInvalid("labels must be non-negative")
        n_classes = int(c.max()) + 1
        n_sub = int(s.max()) + 1
        layout = cls(c, s, v, n_classes, n_sub, n_views)
        layout.validate()
        return layout

    def validate(self):
        n = self.n_samples
        if self.class_labels.size != n * self.n_views:
            raise LayoutInvalid("label length is not a multiple of the view count")
        first = self.class_labels[:n]
        for v in range(self.n_views):
            if not np.array_equal(self.class_labels[v * n:(v + 1) * n], first):
                raise LayoutInvalid("class labels differ between views")
        counts = np.zeros((self.n_views, self.n_classes, self.n_subclasses), dtype=np.int64)
        np.add.at(counts, (self.view_labels, self.class_labels, self.subclass_labels), 1)
        if np.any(counts == 0):
            v, c, z = np.argwhere(counts == 0)[0]
            raise LayoutInvalid(
                f"view {v}, class {c}: subclass {z} is empty "
                f"(every class needs all {self.n_subclasses} subclasses)"
            )

    @property
    def n_samples(self):
        """Samples per view (N)."""
        return self.class_labels.size // self.n_views

    @property
    def class_sizes(self):
        return np.bincount(self.class_labels[:self.n_samples], minlength=self.n_classes)

    def subclass_sizes(self, view=0):
        """Array (C, Z) of subclass sizes in one view."""
        sl = slice(view * self.n_samples, (view + 1) * self.n_samples)
        counts = np.zeros((self.n_classes, self.n_subclasses), dtype=np.int64)
        np.add.at(counts, (self.class_labels[sl], self.subclass_labels[sl]), 1)
        return counts

    def block_ids(self):
        """Dense id of each sample's (view, class, subclass) block."""
        return ((self.view_labels * self.n_classes + self.class_labels)
                * self.n_subclasses + self.subclass_labels)

    def canonical_order(self):
        idx = np.arange(self.class_labels.size)
        return np.lexsort((idx, self.subclass_labels, self.class_labels, self.view_labels))

    def is_canonical(self):
        return np.array_equal(self.canonical_order(), np.arange(self.class_labels.size))

    def view_slice(self, view):
        return slice(view * self.n_samples, (view + 1) * self.n_samples)

    def max_rank(self):
        """Rank of the between-class Laplacian: V*C*Z - 1."""
        return self.n_views * self.n_classes * self.n_subclasses - 1

    @classmethod
    def from_sizes(cls, sizes):
        """Canonically sorted layout from nested subclass sizes.

        ``sizes[v][c][z]`` is the size of subclass ``z`` of class ``c`` in
        view ``v``; class totals must agree across views. A two-level list
        ``sizes[c][z]`` describes a single view.
        """
        arr = sizes
        if np.ndim(arr[0][0]) == 0:
            arr = [arr]
        n_views = len(arr)
        class_totals = [sum(cls_sizes) for cls_sizes in arr[0]]
        per_view = []
        class_labels = None
        for view_sizes in arr:
            if [sum(s) for s in view_sizes] != class_totals:
                raise LayoutInvalid("class sizes must agree across views")
            cl, sl = [], []
            for c, subs in enumerate(view_sizes):
                for z, size in enumerate(subs):
                    cl += [c] * size
                    sl += [z] * size
            class_labels = np.array(cl)
            per_view.append(np.array(sl))
        if n_views == 1:
            return cls.single(class_labels, per_view[0])
        return cls.multiview(class_labels, per_view)
