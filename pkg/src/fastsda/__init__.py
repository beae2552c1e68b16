"""Fast subclass discriminant analysis.

Linear, kernel and approximate-kernel subclass discriminant analysis, and
its multi-view extension, fitted by regressing random block-structured
target vectors instead of eigendecomposing the between-class Laplacian.
"""
from .clustering import assign_subclasses, cluster_within_classes, kmeans
from .data import DataView, MultiViewDataset, load_csv, load_multiview
from .evaluation import EvalConfig, benchmark_speed, run_experiment
from .kernels import KernelConfig, mean_distance_sigma, rbf_kernel
from .laplacian import (
    build_lb_multiview,
    build_lb_single,
    sda_eig_baseline,
    sda_sorted_vectors_baseline,
    structural_checks,
)
from .layout import LabelLayout
from .pipeline import fit_fastsda, fit_mvsda
from .regression import MultiViewModel, ProjectionModel, fit_linear, transform
from .serialize import load_model, save_model
from .targets import make_targets, make_targets_multiview, make_targets_single

__version__ = "0.1.0"

__all__ = [
    "DataView",
    "EvalConfig",
    "KernelConfig",
    "LabelLayout",
    "MultiViewDataset",
    "MultiViewModel",
    "ProjectionModel",
    "assign_subclasses",
    "benchmark_speed",
    "build_lb_multiview",
    "build_lb_single",
    "cluster_within_classes",
    "fit_fastsda",
    "fit_linear",
    "fit_mvsda",
    "kmeans",
    "load_csv",
    "load_model",
    "load_multiview",
    "make_targets",
    "make_targets_multiview",
    "make_targets_single",
    "mean_distance_sigma",
    "rbf_kernel",
    "run_experiment",
    "save_model",
    "sda_eig_baseline",
    "sda_sorted_vectors_baseline",
    "structural_checks",
    "transform",
]
