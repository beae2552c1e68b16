import numpy as np
import pytest

from fastsda.errors import NonpositiveSigma, RTooLarge, ShapeMismatch, TooFewSamples
from fastsda.kernels import (
    KernelConfig,
    center_kernel,
    center_test_columns,
    mean_distance_sigma,
    rbf_kernel,
    select_prototypes,
)
from fastsda.linalg import symmetric_eig


def test_rbf_values():
    x = np.array([[0.0, 0.0], [0.0, 2.0]])
    k = rbf_kernel(x, x, 2.0)
    np.testing.assert_allclose(np.diag(k), 1.0)
    assert k[0, 1] == pytest.approx(np.exp(-0.5), rel=1e-15)


def test_rbf_wide_sigma(rng):
    x = rng.normal(size=(3, 5))
    np.testing.assert_allclose(rbf_kernel(x, x, 1e8), 1.0, atol=1e-12)


def test_rbf_psd(rng):
    x = rng.normal(size=(4, 30))
    k = rbf_kernel(x, x, 1.3)
    np.testing.assert_array_equal(k, k.T)
    assert symmetric_eig(k).values.min() >= -1e-8


def test_rbf_errors(rng):
    with pytest.raises(NonpositiveSigma):
        rbf_kernel(np.zeros((2, 2)), np.zeros((2, 2)), 0.0)
    with pytest.raises(ShapeMismatch):
        rbf_kernel(np.zeros((2, 2)), np.zeros((3, 2)), 1.0)
    with pytest.raises(NonpositiveSigma):
        KernelConfig(-1.0)


def test_mean_distance():
    assert mean_distance_sigma(np.array([[0.0, 3.0]])) == pytest.approx(3.0)
    assert mean_distance_sigma(np.array([[0.0, 1.0, 2.0]])) == pytest.approx(4 / 3)
    with pytest.raises(TooFewSamples):
        mean_distance_sigma(np.zeros((2, 1)))


def test_mean_distance_brute_force(rng):
    x = rng.normal(size=(3, 7))
    x = np.hstack([x, x])
    n = x.shape[1]
    pairs = [np.linalg.norm(x[:, i] - x[:, j]) for i in range(n) for j in range(i + 1, n)]
    assert mean_distance_sigma(x) == pytest.approx(np.mean(pairs), rel=1e-12)


def test_center_constant_kernel():
    kc, _ = center_kernel(np.ones((4, 4)))
    np.testing.assert_allclose(kc, 0.0, atol=1e-15)


def test_center_properties(rng):
    x = rng.normal(size=(3, 12))
    kc, _ = center_kernel(rbf_kernel(x, x, 1.0))
    assert np.abs(kc.sum(axis=0)).max() <= 1e-8
    assert np.abs(kc.sum(axis=1)).max() <= 1e-8
    np.testing.assert_allclose(center_kernel(kc)[0], kc, atol=1e-10)


def test_center_matches_explicit_projector(rng):
    x = rng.normal(size=(2, 6))
    k = rbf_kernel(x, x, 0.7)
    e = np.eye(6) - np.ones((6, 6)) / 6
    np.testing.assert_allclose(center_kernel(k)[0], e @ k @ e, atol=1e-14)


def test_test_columns_match_training(rng):
    x = rng.normal(size=(3, 10))
    k = rbf_kernel(x, x, 1.0)
    kc, stats = center_kernel(k)
    np.testing.assert_allclose(center_test_columns(k[:, 3], stats)[:, 0], kc[:, 3], atol=1e-10)


def test_constant_test_column():
    _, stats = center_kernel(np.ones((3, 3)))
    np.testing.assert_allclose(center_test_columns(np.ones((3, 2)), stats), 0.0)


def test_explicit_feature_map(rng):
    # polynomial kernel (1 + x.y)^2 in 2-D has a finite 6-D feature map
    def phi(x):
        a, b = x
        r2 = np.sqrt(2)
        return np.array([np.ones_like(a), r2 * a, r2 * b, a * a, b * b, r2 * a * b])

    x = rng.normal(size=(2, 8))
    z = rng.normal(size=(2, 3))
    k = (1 + x.T @ x) ** 2
    k_test = (1 + x.T @ z) ** 2
    _, stats = center_kernel(k)
    f = phi(x)
    mean = f.mean(axis=1, keepdims=True)
    expected = (f - mean).T @ (phi(z) - mean)
    np.testing.assert_allclose(center_test_columns(k_test, stats), expected, atol=1e-10)


def test_center_test_shape():
    _, stats = center_kernel(np.eye(3))
    with pytest.raises(ShapeMismatch):
        center_test_columns(np.ones((4, 1)), stats)


def test_prototypes_random_permutation(rng):
    x = rng.normal(size=(2, 9))
    p = select_prototypes(x, KernelConfig(1.0, "approximate", 9, "random-train"), rng)
    assert sorted(map(tuple, p.T)) == sorted(map(tuple, x.T))


def test_prototypes_kmeans_single(rng):
    x = rng.normal(size=(3, 20))
    p = select_prototypes(x, KernelConfig(1.0, "approximate", 1, "kmeans-all"), rng)
    np.testing.assert_allclose(p[:, 0], x.mean(axis=1))


def test_prototype_kernel_shape(rng):
    x = rng.normal(size=(3, 20))
    p = select_prototypes(x, KernelConfig(1.0, "approximate", 5), rng)
    assert rbf_kernel(p, x, 1.0).shape == (5, 20)
    with pytest.raises(RTooLarge):
        select_prototypes(x, KernelConfig(1.0, "approximate", 21), rng)
