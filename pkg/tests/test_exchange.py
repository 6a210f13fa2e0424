import pytest
from hypothesis import given, settings

from symratio.exchange import (
    BudgetExceeded,
    ExchangeVertex,
    PivotError,
    build_exchange_graph,
    component_profile,
    exchange_vertex_count,
    pivot,
    saturated_partition,
    splits_as_tree_and_forest,
    vertex_equivalence,
    verify_thm_conn,
)
from symratio.multigraph import Multigraph

from .strategies import BANANA3, C3, K2, PARALLEL, connected_multigraphs

fs = frozenset


@pytest.mark.parametrize("g, vertices, edges, components", [
    (K2, 2, 1, 1),
    (BANANA3, 6, 3, 3),
    (C3, 6, 6, 1),
    (PARALLEL, 4, 2, 2),
])
def test_exchange_graph_sizes(g, vertices, edges, components):
    h = build_exchange_graph(g)
    assert (h.n_vertices, h.n_edges, h.n_components) == (vertices, edges, components)
    assert exchange_vertex_count(g) == vertices
    assert verify_thm_conn(g).passed


def test_connectivity_classification():
    assert verify_thm_conn(C3).connected and verify_thm_conn(K2).connected
    assert not verify_thm_conn(BANANA3).connected


def test_parallel_edge_profiles():
    h = build_exchange_graph(PARALLEL)
    profiles = sorted((component_profile(h, c).to_json() for c in range(h.n_components)),
                      key=lambda p: p["block_trees"])
    assert all(p["g0"] == [0, 1, 2] and p["blocks"] == [[0, 1], [2]] for p in profiles)
    assert [p["block_trees"][0] for p in profiles] == [[[0], [2]], [[2], [0]]]


def test_equivalence_agrees_with_saturation():
    h = build_exchange_graph(PARALLEL)
    for c in range(h.n_components):
        report = vertex_equivalence(h, c)
        assert report.consistent and report.partition.as_lists() == [[0, 1], [2]]


def test_pivot_is_an_involution():
    v = ExchangeVertex.make(1, {0}, {1, 2})
    w = pivot(C3, v, 1)
    assert w == ExchangeVertex.make(2, {0, 1}, {2})
    assert pivot(C3, w, 1) == v


def test_pivot_rejects_bad_edges():
    v = ExchangeVertex.make(1, {0}, {1, 2})
    with pytest.raises(PivotError, match="not in the tree"):
        pivot(C3, v, 0)
    with pytest.raises(PivotError):
        pivot(PARALLEL, ExchangeVertex.make(1, {0}, {1, 2}), 2)


def test_saturated_partition_examples():
    assert saturated_partition(PARALLEL, {0, 1, 2}).as_lists() == [[0, 1], [2]]
    assert saturated_partition(C3, {0, 1, 2}).as_lists() == [[0], [1], [2]]
    assert saturated_partition(K2, {0}).as_lists() == [[0], [1]]
    with pytest.raises(ValueError):
        saturated_partition(C3, {0, 1})


def test_splitting():
    assert splits_as_tree_and_forest(C3, {0, 1, 2}) is not None
    assert splits_as_tree_and_forest(C3, {0, 1}) is None


def test_budget():
    with pytest.raises(BudgetExceeded) as info:
        build_exchange_graph(C3, budget=5)
    assert info.value.counts["vertices"] == 6
    report = verify_thm_conn(C3, budget=5)
    assert not report.within_budget and not report.passed


def test_tree_has_no_exchange_vertices():
    report = verify_thm_conn(Multigraph(3, ((0, 1), (1, 2))))
    assert report.vacuous and report.passed


def test_dot_export():
    dot = build_exchange_graph(K2).to_dot()
    assert dot.startswith("graph exchange {")
    assert 'v0 -- v1 [label="0"];' in dot
    assert dot.count("--") == 1


def test_edges_are_bipartite_pivots():
    h = build_exchange_graph(C3)
    for i, j, e in h.edges():
        assert h.vertices[i].side != h.vertices[j].side
        assert pivot(C3, h.vertices[i], e) == h.vertices[j]


@settings(max_examples=40)
@given(connected_multigraphs(max_n=5, max_extra=3, loops=True))
def test_classification_holds_on_random_graphs(g):
    report = verify_thm_conn(g)
    assert report.passed, report.counterexample


@given(connected_multigraphs(max_n=4, max_extra=3))
def test_adjacency_is_symmetric(g):
    h = build_exchange_graph(g)
    for i, nbrs in enumerate(h.adjacency):
        for j, e in nbrs:
            assert (i, e) in h.adjacency[j]
