import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MULTIVIEW_EXAMPLE, SINGLE_EXAMPLE
from fastsda.errors import LayoutInvalid, OracleTooLarge, ShapeMismatch
from fastsda.evaluation import gaussian_mixture
from fastsda.laplacian import (
    between_scatter,
    build_lb_multiview,
    build_lb_single,
    criterion_values,
    scatter_matrices,
    sda_eig_baseline,
    sda_sorted_vectors_baseline,
    structural_checks,
)
from fastsda.layout import LabelLayout
from fastsda.linalg import numerical_rank, principal_angles
from fastsda.pipeline import fit_fastsda
from fastsda.regression import fit_linear
from fastsda.targets import make_targets


@st.composite
def single_layouts(draw, max_c=4, max_z=3):
    c = draw(st.integers(2, max_c))
    z = draw(st.integers(1, max_z))
    sizes = [[draw(st.integers(1, 6)) for _ in range(z)] for _ in range(c)]
    labels = draw(st.permutations(range(sum(map(sum, sizes)))))
    return sizes, list(labels)


def test_single_example_entries():
    lb = build_lb_single(LabelLayout.from_sizes(SINGLE_EXAMPLE)).lb
    assert lb[0, 1] == pytest.approx(9 / (289 * 3), rel=1e-14)
    assert lb[0, 16] == pytest.approx(-1 / 289, rel=1e-14)
    assert lb[0, 5] == 0.0  # same class, other subclass


def test_one_class_is_zero():
    lb = build_lb_single(LabelLayout.from_sizes([[5]])).lb
    assert np.all(lb == 0)


def test_multiview_rank_seven():
    lap = build_lb_multiview(LabelLayout.from_sizes(MULTIVIEW_EXAMPLE))
    assert lap.rank() == 7
    assert lap.max_row_sum() <= 1e-12
    np.testing.assert_array_equal(lap.lb, lap.lb.T)


def test_multiview_v1_same_column_space():
    layout = LabelLayout.from_sizes([[2, 3, 1], [4, 2, 2], [1, 1, 3]])
    single = build_lb_single(layout).lb
    multi = build_lb_multiview(layout).lb
    u1 = np.linalg.svd(single)[0][:, :numerical_rank(single)]
    u2 = np.linalg.svd(multi)[0][:, :numerical_rank(multi)]
    assert u1.shape == u2.shape
    assert np.max(principal_angles(u1, u2)) < 1e-8


def test_size_cap():
    with pytest.raises(OracleTooLarge):
        build_lb_single(LabelLayout.from_sizes([[1200], [1200]]))


def test_single_needs_one_view():
    with pytest.raises(LayoutInvalid):
        build_lb_single(LabelLayout.from_sizes(MULTIVIEW_EXAMPLE))


@settings(max_examples=40, deadline=None)
@given(single_layouts())
def test_invariants_single(drawn):
    sizes, perm = drawn
    base = LabelLayout.from_sizes(sizes)
    # shuffled sample order must not matter
    layout = LabelLayout.single(base.class_labels[perm], base.subclass_labels[perm])
    lap = build_lb_single(layout)
    np.testing.assert_array_equal(lap.lb, lap.lb.T)
    assert lap.max_row_sum() <= 1e-12
    assert lap.rank() == layout.max_rank()
    failed = [c.name for c in structural_checks(layout, rng=0) if not c.passed]
    assert not failed


def test_structural_checks_multiview():
    layout = LabelLayout.from_sizes(MULTIVIEW_EXAMPLE)
    checks = {c.name: c for c in structural_checks(layout, rng=1)}
    assert all(c.passed for c in checks.values())
    assert checks["rank"].value == 7


def test_structural_checks_catch_corruption():
    layout = LabelLayout.from_sizes(SINGLE_EXAMPLE)
    lb = build_lb_single(layout).lb.copy()
    lb[0, 5] += 1e-3
    lb[5, 0] += 1e-3
    checks = {c.name: c for c in structural_checks(layout, rng=0, lb=lb)}
    assert not checks["row_sums"].passed
    assert checks["symmetry"].passed


class TestScatter:
    def test_three_constructions_agree(self, rng):
        layout = LabelLayout.from_sizes([[3, 4], [2, 5], [6, 1]])
        x = rng.normal(size=(4, layout.n_samples))
        x -= x.mean(axis=1, keepdims=True)
        pairs = between_scatter(x, layout, "pairs")
        lap = between_scatter(x, layout, "laplacian")
        blocks = between_scatter(x, layout, "blocks")
        scale = np.linalg.norm(lap)
        assert np.linalg.norm(pairs - lap) <= 1e-8 * scale
        assert np.linalg.norm(blocks - lap) <= 1e-8 * scale

    def test_zero_data(self):
        layout = LabelLayout.from_sizes([[2, 2], [3, 1]])
        s_t, s_b = scatter_matrices(np.zeros((3, 8)), layout)
        assert np.all(s_t == 0) and np.all(s_b == 0)
        assert np.all(between_scatter(np.zeros((3, 8)), layout, "pairs") == 0)

    def test_shape_checked(self):
        with pytest.raises(ShapeMismatch):
            between_scatter(np.zeros((3, 5)), LabelLayout.from_sizes([[2], [2]]))


class TestBaselines:
    def test_fisher_direction(self, rng):
        n = 200
        y = np.repeat([0, 1], n // 2)
        x = rng.normal(size=(2, n)) * np.array([[1.0], [3.0]])
        x[0] += 4.0 * y
        layout = LabelLayout.single(y, np.zeros(n, int))
        w = sda_eig_baseline(x, layout).w
        assert w.shape == (2, 1)
        xc = x - x.mean(axis=1, keepdims=True)
        s_w = sum(np.cov(xc[:, y == c]) for c in (0, 1))
        fisher = np.linalg.solve(s_w, x[:, y == 1].mean(1) - x[:, y == 0].mean(1))
        cos = abs(w[:, 0] @ fisher) / np.linalg.norm(fisher)
        assert cos > 1 - 1e-8

    def test_sorted_vectors_collinear_with_fisher(self, rng):
        n = 100
        y = np.repeat([0, 1], n // 2)
        x = rng.normal(size=(3, n))
        x[1] += 3.0 * y
        layout = LabelLayout.single(y, np.zeros(n, int))
        a = sda_eig_baseline(x, layout).w[:, 0]
        b = sda_sorted_vectors_baseline(x, layout, 1e-10).w[:, 0]
        assert abs(a @ b) > 1 - 1e-6

    def test_sorted_vectors_span_matches_fast(self, rng):
        x, cls, sub = gaussian_mixture(60, 12, 3, 2, rng)
        layout = LabelLayout.single(cls, sub)
        oracle = sda_sorted_vectors_baseline(x, layout, 1e-9)
        fast = fit_fastsda(x, cls, sub, 1e-9, rng)
        assert oracle.d == fast.d == 5
        assert np.max(principal_angles(oracle.w, fast.w)) <= 1e-6

    def test_criterion_non_negative(self, rng):
        x, cls, sub = gaussian_mixture(50, 6, 2, 2, rng)
        layout = LabelLayout.single(cls, sub)
        model = sda_sorted_vectors_baseline(x, layout, 1.0)
        crit = model.info["criterion"]
        assert np.all(crit >= 0) and np.all(np.diff(crit) <= 0)
        xc = x - x.mean(axis=1, keepdims=True)
        s_t, s_b = scatter_matrices(xc, layout)
        np.testing.assert_allclose(criterion_values(model.w, s_t, s_b), crit, rtol=1e-8)

    def test_eig_baseline_keeps_cz_minus_one(self, rng):
        x, cls, sub = gaussian_mixture(90, 20, 3, 3, rng)
        model = sda_eig_baseline(x, LabelLayout.single(cls, sub))
        assert model.d == 8
        np.testing.assert_allclose(np.linalg.norm(model.w, axis=0), 1.0)

    def test_targets_span_laplacian_with_regression(self, rng):
        layout = LabelLayout.from_sizes([[4, 3], [5, 2]])
        t = make_targets(layout, rng=rng)
        lb = build_lb_single(layout).lb
        n = layout.n_samples
        proj = np.eye(n) - t.T @ t - np.ones((n, n)) / n
        assert np.linalg.norm(proj @ lb) <= 1e-8 * np.linalg.norm(lb)
        x = rng.normal(size=(30, n))
        assert fit_linear(x, t, 1e-6).d == 3
