import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fwintervene.baselines import (
    BASELINES,
    k_edge_deletion,
    top_k_ec_oneshot,
    uniform_reduction,
    weighted_reduction,
    weighted_shares,
)
from fwintervene.generators import power_law_graph, random_graph, random_sequence
from fwintervene.graph import WeightedGraph
from fwintervene.optimizer import BudgetSpec

from oracles import dense_objective


def test_uniform_scales_everything():
    g = random_graph(15, 0.3, seed=0)
    res = uniform_reduction(g, BudgetSpec.of_fraction(0.25))
    np.testing.assert_allclose(res.weights[0], 0.75 * g.weights)
    assert res.budget_used == pytest.approx(0.25 * g.total_weight())
    assert res.objective == pytest.approx(0.75 ** 2 * res.objective_trace[0], rel=1e-9)


def test_weighted_shares_examples():
    np.testing.assert_allclose(weighted_shares([3.0, 1.0], 2.0), [1.8, 0.2])
    np.testing.assert_allclose(weighted_shares([1.0, 1.0], 1.0), [0.5, 0.5])
    # 10 * theta * 100 would exceed 10, so that edge is clamped and the rest redistributed
    np.testing.assert_allclose(weighted_shares([10.0, 1.0, 1.0], 10.5), [10.0, 0.25, 0.25])
    np.testing.assert_array_equal(weighted_shares([2.0, 3.0], 5.0), [2.0, 3.0])
    np.testing.assert_array_equal(weighted_shares([2.0, 3.0], 0.0), [0.0, 0.0])


@given(st.lists(st.floats(0.01, 100.0), min_size=1, max_size=30), st.floats(0.0, 1.0))
def test_weighted_shares_properties(w, frac):
    w = np.array(w)
    b = frac * w.sum()
    red = weighted_shares(w, b)
    assert np.all(red >= 0) and np.all(red <= w * (1 + 1e-12))
    assert red.sum() == pytest.approx(b, rel=1e-9, abs=1e-9)
    # unclamped edges share one ratio red / w**2
    free = red < w * (1 - 1e-9)
    if free.sum() > 1:
        ratio = red[free] / w[free] ** 2
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-9)


def test_weighted_reduction_sequence():
    seq = random_sequence(8, 3, 0.4, seed=1)
    res = weighted_reduction(seq, 2.0)
    assert res.budget_used == pytest.approx(2.0)
    assert len(res.weights) == 3


def test_k_edge_deletion_removes_top_edges():
    g = random_graph(20, 0.2, seed=3)
    res = k_edge_deletion(g, 2.0, r=3)
    red = g.weights - res.weights[0]
    # every edge but the boundary one is untouched or deleted outright
    partial = (red > 0) & (res.weights[0] > 0)
    assert partial.sum() <= 1
    assert res.rank == 3
    assert res.objective == pytest.approx(dense_objective(g.to_dense(res.weights[0]), 3), rel=1e-8)


def test_top_k_ec_equals_k_edge_deletion_at_rank_one():
    g = random_graph(20, 0.2, seed=4)
    a = k_edge_deletion(g, 2.0)
    b = top_k_ec_oneshot(g, 2.0)
    np.testing.assert_array_equal(a.weights[0], b.weights[0])
    assert b.strategy == "top_k_ec"


@pytest.mark.parametrize("name", sorted(BASELINES))
def test_every_baseline_spends_the_budget(name):
    g = power_law_graph(200, 1000, seed=2)
    res = BASELINES[name](g, BudgetSpec.of_fraction(0.1), 2)
    assert res.budget_used == pytest.approx(0.1 * g.total_weight(), rel=1e-9)
    assert res.objective <= res.objective_trace[0]


def test_full_budget_baselines():
    g = random_graph(10, 0.3, seed=5)
    for fn in BASELINES.values():
        assert fn(g, g.total_weight()).objective == 0.0


def test_empty_reduction_on_zero_budget():
    g = WeightedGraph.from_matrix(np.array([[0, 2.0], [1.0, 0]]))
    for fn in BASELINES.values():
        res = fn(g, 0.0)
        np.testing.assert_array_equal(res.weights[0], g.weights)


def test_uniform_preserves_singular_vectors():
    from fwintervene.svd import truncated_svd

    g = random_graph(20, 0.3, seed=6)
    res = uniform_reduction(g, 0.3 * g.total_weight(), r=3)
    a = truncated_svd(g, 3)
    b = truncated_svd(res.reduced, 3)
    np.testing.assert_allclose(b.singular_values, 0.7 * a.singular_values, rtol=1e-9)
    np.testing.assert_allclose(np.abs(a.left_vectors.T @ b.left_vectors), np.eye(3), atol=1e-7)


def test_k_edge_deletion_diag():
    g = WeightedGraph.from_matrix(np.diag([3.0, 2.0]))
    np.testing.assert_array_equal(k_edge_deletion(g, 3.0).reduced.to_dense(), np.diag([0.0, 2.0]))
    np.testing.assert_array_equal(k_edge_deletion(g, 5.0).reduced.to_dense(), np.zeros((2, 2)))
    np.testing.assert_array_equal(top_k_ec_oneshot(g, 3.0, 2).reduced.to_dense(), np.diag([0.0, 2.0]))


def test_k_edge_deletion_matches_oracle():
    from fwintervene.optimizer import top_k_edge_centrality

    g = random_graph(10, 0.22, seed=8)
    assert k_edge_deletion(g, 2.0).reduced == top_k_edge_centrality(g, 2.0, r=1)


def test_top_k_ec_finite_difference_scores():
    # scores for the one-shot pass agree with finite differences of the rank-2 objective
    from fwintervene.centrality import static_scores

    g = random_graph(12, 0.3, seed=9)
    a = g.to_dense()
    sc = static_scores(g, 2).score
    h = 1e-6
    fd = []
    for i, j in zip(g.src, g.dst):
        p, m = a.copy(), a.copy()
        p[i, j] += h
        m[i, j] -= h
        fd.append((dense_objective(p, 2) - dense_objective(m, 2)) / (2 * h))
    np.testing.assert_allclose(sc, fd, atol=1e-5)
    res = top_k_ec_oneshot(g, 1.0, 2)
    top = np.argmax(sc)
    assert res.weights[0][top] < g.weights[top]


def test_sequence_k_edge_deletion_uses_global_order():
    seq = random_sequence(8, 2, 0.4, seed=3)
    res = k_edge_deletion(seq, 1.0)
    assert res.budget_used == pytest.approx(1.0)
