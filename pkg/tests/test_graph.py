import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutlab.graph import (
    CutPreconditionError, DirectedWeightedGraph, GraphError, UndirectedGraph, complement, cut_weight,
    cut_weights, edge_reverse_ratio, is_beta_balanced_exhaustive, node_set, read_edge_list, write_edge_list,
)


@st.composite
def directed_graphs(draw, max_n=9, symmetric_support=False):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    if symmetric_support:
        chosen = sorted(set(chosen) | {(v, u) for u, v in chosen})
    weights = draw(st.lists(st.floats(0.01, 100.0), min_size=len(chosen), max_size=len(chosen)))
    return DirectedWeightedGraph(n, tuple((u, v, w) for (u, v), w in zip(chosen, weights)))


def proper_sides(n, draw_bits):
    return [s for s in draw_bits if 0 < len(s) < n]


def test_single_edge_cuts():
    g = DirectedWeightedGraph(2, ((0, 1, 3.0),))
    assert cut_weight(g, [0]) == 3.0
    assert cut_weight(g, [1]) == 0.0


def test_unit_gadget_backward_contribution():
    # beta=1, eps=1/2: L={0,1}, R={2,3}; A={0}, B={2}; S = A cup (R - B) = {0, 3}
    w = {(0, 2): 3.5, (0, 3): 2.5, (1, 2): 2.5, (1, 3): 3.5}
    edges = [(u, v, x) for (u, v), x in w.items()] + [(v, u, 1.0) for (u, v) in w]
    g = DirectedWeightedGraph(4, tuple(edges))
    assert cut_weight(g, [0, 3]) == pytest.approx(w[(0, 2)] + 1.0, rel=1e-12)


def test_cut_precondition():
    g = DirectedWeightedGraph(3, ((0, 1, 1.0),))
    with pytest.raises(CutPreconditionError):
        cut_weight(g, [])
    with pytest.raises(CutPreconditionError):
        cut_weight(g, [0, 1, 2])
    with pytest.raises(CutPreconditionError):
        cut_weight(g, [5])


@pytest.mark.parametrize("edges", [
    ((0, 0, 1.0),), ((0, 1, 0.0),), ((0, 1, -1.0),), ((0, 1, math.inf),), ((0, 1, 1.0), (0, 1, 2.0)),
    ((0, 3, 1.0),),
])
def test_directed_graph_invariants(edges):
    with pytest.raises(GraphError):
        DirectedWeightedGraph(3, edges)


def test_undirected_invariants():
    with pytest.raises(GraphError):
        UndirectedGraph(3, ((0, 1), (1, 0)))
    with pytest.raises(GraphError):
        UndirectedGraph(3, ((1, 1),))
    g = UndirectedGraph(3, ((2, 0), (1, 0)))
    assert g.edges == ((0, 1), (0, 2))
    assert g.adjacency() == [[1, 2], [0], [0]]


def test_balance_examples():
    two_cycle = DirectedWeightedGraph(2, ((0, 1, 1.0), (1, 0, 1.0)))
    assert is_beta_balanced_exhaustive(two_cycle, 1.0)
    single = DirectedWeightedGraph(2, ((0, 1, 1.0),))
    assert not is_beta_balanced_exhaustive(single, 1e12)
    with pytest.raises(ValueError):
        is_beta_balanced_exhaustive(DirectedWeightedGraph(21, ()), 1.0)


def test_reverse_ratio_examples():
    assert edge_reverse_ratio(DirectedWeightedGraph(2, ((0, 1, 2.0), (1, 0, 1.0)))) == 2.0
    assert edge_reverse_ratio(DirectedWeightedGraph(2, ((0, 1, 2.0),))) == math.inf


@settings(max_examples=60, deadline=None)
@given(directed_graphs(), st.data())
def test_cut_plus_complement_is_crossing_weight(g, data):
    s = data.draw(st.sets(st.integers(0, g.n - 1), min_size=1, max_size=g.n - 1))
    inside = np.isin(np.arange(g.n), list(s))
    crossing = inside[g.src] != inside[g.dst]
    total = float(g.weight[crossing].sum())
    assert cut_weight(g, s) + cut_weight(g, complement(s, g.n)) == pytest.approx(total, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(directed_graphs(max_n=8, symmetric_support=True))
def test_balanced_at_reverse_ratio(g):
    ratio = edge_reverse_ratio(g)
    if math.isfinite(ratio) and g.m:
        assert is_beta_balanced_exhaustive(g, ratio)


@settings(max_examples=40, deadline=None)
@given(directed_graphs(max_n=12), st.integers(0, 2**32 - 1))
def test_batched_cuts_are_bitwise_identical(g, seed):
    rng = np.random.default_rng(seed)
    masks = rng.random((16, g.n)) < 0.5
    masks[:, 0] = True
    masks[:, 1] = False
    batch = cut_weights(g, masks)
    for row, mask in zip(batch, masks):
        assert cut_weight(g, np.nonzero(mask)[0]) == row


def test_node_set_canonical():
    assert node_set([3, 1, 3, 2]) == (1, 2, 3)


def test_edge_list_roundtrip():
    g = DirectedWeightedGraph(3, ((0, 1, 0.1), (2, 0, math.log(3))))
    buf = io.StringIO()
    write_edge_list(g, buf)
    assert buf.getvalue().splitlines()[0] == "n 3 directed"
    back = read_edge_list(io.StringIO(buf.getvalue()))
    assert back.edges == g.edges
    u = UndirectedGraph(4, ((0, 1), (2, 3)))
    buf = io.StringIO()
    write_edge_list(u, buf)
    assert read_edge_list(io.StringIO(buf.getvalue())) == u
    with pytest.raises(GraphError):
        read_edge_list(io.StringIO("n 3 weird\n"))
