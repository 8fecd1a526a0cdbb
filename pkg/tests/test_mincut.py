import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_min_cut, brute_st_cut
from cutlab.families import clique_bridge, complete_graph, cycle_graph, cycle_with_chords, planted_cycle_chords
from cutlab.graph import DirectedWeightedGraph, GraphError, UndirectedGraph
from cutlab.mincut import edge_connectivity, global_min_cut, min_cut_edges, min_pairwise_connectivity


@st.composite
def undirected_graphs(draw, max_n=14):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return UndirectedGraph(n, tuple(chosen))


@st.composite
def weighted_symmetric(draw, max_n=10):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=1, max_size=len(pairs)))
    ws = draw(st.lists(st.integers(1, 20), min_size=len(chosen), max_size=len(chosen)))
    edges = [(u, v, float(w)) for (u, v), w in zip(chosen, ws)]
    return DirectedWeightedGraph(n, tuple(edges + [(v, u, w) for u, v, w in edges]))


def test_triangle():
    res = global_min_cut(UndirectedGraph(3, ((0, 1), (1, 2), (0, 2))))
    assert res.value == 2.0
    assert res.witness == (0,)


def test_two_cliques_bridge():
    pairs = [(u, v) for u in range(5) for v in range(u + 1, 5)]
    pairs += [(u + 5, v + 5) for u, v in pairs] + [(4, 5)]
    res = global_min_cut(UndirectedGraph(10, tuple(pairs)))
    assert res.value == 1.0
    assert res.witness == (0, 1, 2, 3, 4)


def test_disconnected_is_zero():
    res = global_min_cut(UndirectedGraph(4, ((0, 1), (2, 3))))
    assert res.value == 0.0
    assert res.witness == (0, 1)


def test_asymmetric_rejected():
    with pytest.raises(GraphError):
        global_min_cut(DirectedWeightedGraph(2, ((0, 1, 1.0),)))


@settings(max_examples=150, deadline=None)
@given(undirected_graphs())
def test_matches_brute_force(g):
    edges = [(u, v, 1.0) for u, v in g.edges]
    res = global_min_cut(g)
    assert res.value == brute_min_cut(g.n, edges)
    assert 0 in res.witness and len(res.witness) < g.n


@settings(max_examples=100, deadline=None)
@given(weighted_symmetric())
def test_weighted_matches_brute_force(g):
    edges = [(u, v, w) for u, v, w in g.edges if u < v]
    res = global_min_cut(g)
    assert res.value == pytest.approx(brute_min_cut(g.n, edges), rel=1e-9)
    side = set(res.witness)
    assert sum(w for u, v, w in edges if (u in side) != (v in side)) == pytest.approx(res.value, rel=1e-9)


def test_witness_is_deterministic():
    g = cycle_graph(8)
    assert global_min_cut(g) == global_min_cut(g)


@pytest.mark.parametrize("n,k", [(200, 2), (200, 16), (500, 7)])
def test_planted_family(n, k):
    assert global_min_cut(planted_cycle_chords(n, k, seed=n + k)).value == k


def test_other_families():
    assert global_min_cut(complete_graph(6)).value == 5
    assert global_min_cut(clique_bridge(16, 3, 1)).value == 3
    assert global_min_cut(cycle_with_chords(200, 10, 0)).value == 2


def test_min_cut_edges_small():
    with pytest.raises(ValueError):
        min_cut_edges(1, [])


def test_connectivity_examples():
    path = UndirectedGraph(3, ((0, 1), (1, 2)))
    assert edge_connectivity(path, 0, 2) == 1
    k4 = complete_graph(4)
    assert all(edge_connectivity(k4, u, v) == 3 for u, v in itertools.combinations(range(4), 2))
    with pytest.raises(ValueError):
        edge_connectivity(k4, 1, 1)


@settings(max_examples=60, deadline=None)
@given(undirected_graphs(max_n=9), st.data())
def test_connectivity_matches_brute_force(g, data):
    s, t = data.draw(st.lists(st.integers(0, g.n - 1), min_size=2, max_size=2, unique=True))
    assert edge_connectivity(g, s, t) == brute_st_cut(g.n, g.edges, s, t)


@settings(max_examples=30, deadline=None)
@given(undirected_graphs(max_n=8))
def test_pairwise_min_equals_global(g):
    low, _ = min_pairwise_connectivity(g)
    assert low == global_min_cut(g).value
