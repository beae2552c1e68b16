"""One-call fits: subclass labels in, fitted projection out.

These glue :mod:`fastsda.targets` to :mod:`fastsda.regression`:
build the label layout, generate the target vectors and regress them.
"""
import numpy as np

from .kernels import KernelConfig, mean_distance_sigma
from .layout import LabelLayout, make_rng
from .regression import (
    fit_approx_model,
    fit_kernel_model,
    fit_linear,
    fit_multiview_kernel,
    fit_multiview_linear,
)
from .targets import make_targets, target_count

KINDS = ("linear", "kernel", "approx")


def fit_fastsda(x, class_labels, subclass_labels, alpha, rng=None, kind="linear",
                kernel=None, normalization="l2", solver="direct"):
    """Fast subclass discriminant analysis on one view.

    Parameters
    ----------
    x : array (D, N)
    class_labels, subclass_labels : array (N,)
        Dense class indices and per-class subclass indices in ``[0, Z)``.
    alpha : float
        Ridge regularization.
    rng : int or numpy.random.Generator
        Drives the random target values (and prototype choice for
        ``kind="approx"``).
    kind : {"linear", "kernel", "approx"}
    kernel : KernelConfig, optional
        Defaults to an RBF kernel with the mean pairwise distance as sigma.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    x = np.asarray(x, dtype=np.float64)
    rng = make_rng(rng)
    target_rng, proto_rng = rng.spawn(2)
    layout = LabelLayout.single(class_labels, subclass_labels)
    dims = x.shape[0] if kind == "linear" else None
    t = make_targets(layout, target_count(layout, dims), target_rng)
    if kind == "linear":
        model = fit_linear(x, t, alpha, normalization)
    else:
        if kernel is None:
            kernel = KernelConfig(mean_distance_sigma(x),
                                  mode="exact" if kind == "kernel" else "approximate",
                                  prototype_count=min(1000, x.shape[1]))
        if kind == "kernel":
            model = fit_kernel_model(x, t, alpha, kernel, solver, normalization)
        else:
            model = fit_approx_model(x, t, alpha, kernel, proto_rng,
                                     normalization=normalization)
    model.info["d"] = t.shape[0]
    return model


def fit_mvsda(xs, class_labels, subclass_labels, alpha, rng=None, kind="linear",
              sigmas=None, normalization="l2"):
    """Multi-view subclass discriminant analysis.

    Parameters
    ----------
    xs : list of arrays (D_v, N)
    class_labels : array (N,)
    subclass_labels : list of arrays (N,)
        One subclass labelling per view.
    sigmas : list of float, optional
        RBF widths per view for ``kind="kernel"``.
    """
    if kind not in ("linear", "kernel"):
        raise ValueError(f"unknown multi-view kind {kind!r}")
    xs = [np.asarray(x, dtype=np.float64) for x in xs]
    layout = LabelLayout.multiview(class_labels, subclass_labels)
    dims = [x.shape[0] for x in xs] if kind == "linear" else None
    t = make_targets(layout, target_count(layout, dims), make_rng(rng))
    if kind == "linear":
        model = fit_multiview_linear(xs, t, alpha, normalization)
    else:
        if sigmas is None:
            sigmas = [mean_distance_sigma(x) for x in xs]
        model = fit_multiview_kernel(xs, t, alpha, sigmas, normalization)
    model.info["d"] = t.shape[0]
    return model
