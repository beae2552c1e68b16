import numpy as np
import pytest

from fastsda.data import DataView, MultiViewDataset
from fastsda.errors import ClassTooSmall, DegenerateData, KTooLarge
from fastsda.evaluation import (
    EvalConfig,
    accuracy,
    apply_standardize,
    benchmark_speed,
    destandardize,
    gaussian_mixture,
    knn_predict,
    pca_reduce,
    rotation_splits,
    run_experiment,
    standardize,
    stratified_folds,
)

SMALL = dict(z_grid=(1, 2), alpha_grid=(0.1, 10.0))


def mixture_dataset(seed, n=150, dim=8, spread=1.5, views=1):
    x, cls, _ = gaussian_mixture(n, dim * views, 3, 2, seed, spread=spread)
    parts = np.split(x, views)
    return MultiViewDataset([DataView(p, cls, i) for i, p in enumerate(parts)], "mixture")


class TestPreprocessing:
    def test_pca_full_energy_is_rank(self, rng):
        x = rng.normal(size=(5, 3)) @ rng.normal(size=(3, 40))
        proj, y = pca_reduce(x, 1.0)
        assert proj.shape == (5, 3) and y.shape == (3, 40)

    def test_pca_isotropic(self, rng):
        proj, _ = pca_reduce(rng.normal(size=(2, 2000)), 0.98)
        assert proj.shape[1] == 2

    def test_pca_line(self, rng):
        x = np.outer([1.0, 2.0, -1.0], rng.normal(size=30))
        for energy in (0.5, 0.98, 1.0):
            assert pca_reduce(x, energy)[0].shape[1] == 1

    def test_pca_errors(self):
        with pytest.raises(DegenerateData):
            pca_reduce(np.ones((3, 5)))
        with pytest.raises(ValueError):
            pca_reduce(np.eye(3), 0.0)

    def test_standardize(self, rng):
        x = rng.normal(size=(3, 20)) * 5 + 2
        x[1] = 7.0
        xs, means, stds = standardize(x)
        assert np.all(xs[1] == 0) and stds[1] == 1.0
        np.testing.assert_allclose(xs[[0, 2]].mean(axis=1), 0, atol=1e-12)
        np.testing.assert_allclose(xs[[0, 2]].std(axis=1), 1)
        np.testing.assert_allclose(destandardize(xs, means, stds), x, atol=1e-10)
        np.testing.assert_allclose(standardize(xs)[0], xs, atol=1e-12)
        np.testing.assert_allclose(apply_standardize(x, means, stds), xs)


class TestFolds:
    def test_balanced(self):
        labels = np.repeat([0, 1, 2], 10)
        folds = stratified_folds(labels, 5, seed=3)
        for c in range(3):
            assert np.all(np.bincount(folds[labels == c], minlength=5) == 2)

    def test_proportional(self, rng):
        labels = rng.integers(0, 3, size=97)
        folds = stratified_folds(labels, 5, seed=1)
        for c in range(3):
            counts = np.bincount(folds[labels == c], minlength=5)
            assert counts.max() - counts.min() <= 1

    def test_rotations_partition(self, rng):
        labels = rng.integers(0, 2, size=50)
        splits = rotation_splits(stratified_folds(labels, 5, 0), 5)
        assert len(splits) == 5
        for train, val, test in splits:
            union = np.concatenate([train, val, test])
            assert np.array_equal(np.sort(union), np.arange(50))
        tests = np.concatenate([s[2] for s in splits])
        assert np.array_equal(np.sort(tests), np.arange(50))

    def test_too_small(self):
        with pytest.raises(ClassTooSmall):
            stratified_folds([0] * 10 + [1] * 3, 5)

    def test_seeded(self):
        labels = np.repeat([0, 1], 20)
        np.testing.assert_array_equal(stratified_folds(labels, 5, 4), stratified_folds(labels, 5, 4))


class TestKnn:
    def test_coincident_point(self):
        train = np.array([[0.0, 5.0, 9.0]])
        assert knn_predict(train, np.array([0, 1, 2]), np.array([[5.0]]), k=1)[0] == 1

    def test_majority(self):
        train = np.array([[0.0, 0.1, 0.2, 0.3, 0.4]])
        labels = np.array([7, 7, 7, 3, 3])
        assert knn_predict(train, labels, np.array([[0.2]]), k=5)[0] == 7

    def test_tie_goes_to_closer_class(self):
        train = np.array([[1.0, 1.2, -0.5, -0.6]])
        labels = np.array([0, 0, 1, 1])
        # class 0 mean distance 1.1, class 1 mean distance 0.55
        assert knn_predict(train, labels, np.array([[0.0]]), k=4)[0] == 1

    def test_full_tie_goes_to_smaller_label(self):
        train = np.array([[1.0, -1.0]])
        assert knn_predict(train, np.array([4, 2]), np.array([[0.0]]), k=2)[0] == 2

    def test_k_too_large(self):
        with pytest.raises(KTooLarge):
            knn_predict(np.zeros((1, 3)), np.zeros(3), np.zeros((1, 1)), k=4)

    def test_accuracy(self):
        assert accuracy([1, 2, 3, 4], [1, 2, 0, 0]) == 0.5


class TestExperiment:
    def test_report_structure_and_determinism(self):
        ds = mixture_dataset(0)
        cfg = EvalConfig(seed=7, **SMALL)
        a = run_experiment(ds, "fastsda-linear", cfg)
        b = run_experiment(ds, "fastsda-linear", cfg)
        assert len(a.rotations) == 5
        assert a.tsv_rows() == b.tsv_rows()
        assert a.summary(timing=False) == b.summary(timing=False)
        assert all(0 <= r <= 1 for r in a.fold_accuracies)
        assert all(t > 0 for t in a.fit_seconds)
        assert all(z in (1, 2) and alpha in (0.1, 10.0) for z, alpha in a.chosen)

    def test_jobs_do_not_change_results(self):
        ds = mixture_dataset(1)
        cfg = EvalConfig(seed=2, **SMALL)
        a = run_experiment(ds, "fastsda-linear", cfg)
        b = run_experiment(ds, "fastsda-linear", cfg, jobs=2)
        assert a.tsv_rows() == b.tsv_rows()

    def test_oracle_sorted_close_to_fast(self):
        gaps = []
        for seed in range(3):
            ds = mixture_dataset(seed, spread=0.8)
            cfg = EvalConfig(seed=seed, z_grid=(2,), alpha_grid=(1.0,))
            fast = run_experiment(ds, "fastsda-linear", cfg).mean_accuracy
            oracle = run_experiment(ds, "oracle-sorted", cfg).mean_accuracy
            gaps.append(fast - oracle)
        assert abs(np.mean(gaps)) <= 0.02

    @pytest.mark.parametrize("method", ["fastsda-kernel", "fastsda-approx", "oracle-sda"])
    def test_other_single_view_methods(self, method):
        ds = mixture_dataset(2, n=100)
        cfg = EvalConfig(seed=0, prototype_count=20, **SMALL)
        report = run_experiment(ds, method, cfg)
        assert report.mean_accuracy > 0.5

    @pytest.mark.parametrize("method", ["mvsda-linear", "mvsda-kernel"])
    def test_multiview_methods(self, method):
        ds = mixture_dataset(3, n=100, dim=4, views=2)
        report = run_experiment(ds, method, EvalConfig(seed=0, **SMALL))
        assert report.mean_accuracy > 0.5
        assert "median fit seconds" in report.summary()

    def test_no_leak_from_test_split(self):
        # replacing held-out samples by noise must not change model selection
        # or the validation scores of any rotation whose test fold it is
        ds = mixture_dataset(4)
        cfg = EvalConfig(seed=1, **SMALL)
        base = run_experiment(ds, "fastsda-linear", cfg)
        folds = stratified_folds(ds.class_labels, 5, cfg.seed)
        _, _, test0 = rotation_splits(folds)[0]
        x = ds.views[0].x.copy()
        x[:, test0] = np.random.default_rng(0).normal(size=(x.shape[0], test0.size)) * 50
        noisy = MultiViewDataset([DataView(x, ds.class_labels)], "noisy")
        other = run_experiment(noisy, "fastsda-linear", cfg)
        r0, s0 = base.rotations[0], other.rotations[0]
        assert (r0.z, r0.alpha, r0.val_accuracy) == (s0.z, s0.alpha, s0.val_accuracy)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            run_experiment(mixture_dataset(0), "lda")


def test_benchmark_rows():
    rows = benchmark_speed([20, 40], [60], c=3, z=2, repeats=1)
    assert [(r.dim, r.n) for r in rows] == [(20, 60), (40, 60)]
    assert all(r.t_oracle > 0 and r.t_fast > 0 and r.ratio > 0 for r in rows)


def test_benchmark_data_reproducible():
    a = gaussian_mixture(50, 4, 2, 2, [0, 4, 50])
    b = gaussian_mixture(50, 4, 2, 2, [0, 4, 50])
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)
