"""Exact global minimum cut and pairwise edge connectivity.

``global_min_cut`` contracts edges whose endpoints are provably at least as
well connected as the best cut seen so far (Nagamochi-Ibaraki scan values and
the Padberg-Rinaldi common-neighbour bound), recording every candidate cut the
scan discovers: single super-vertices and maximum-adjacency prefixes.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, maximum_flow

from .graph import DirectedWeightedGraph, GraphError, NodeSet, UndirectedGraph

_TIE_TOL = 1e-9


@dataclass(frozen=True)
class MinCut:
    value: float
    witness: NodeSet


def _canonical_side(side: Iterable[int], n: int) -> NodeSet:
    s = set(side)
    if 0 not in s:
        s = set(range(n)) - s
    return tuple(sorted(s))


def _weighted_edges(g: UndirectedGraph | DirectedWeightedGraph) -> list[tuple[int, int, float]]:
    if isinstance(g, UndirectedGraph):
        return [(u, v, 1.0) for u, v in g.edges]
    if not g.is_symmetric():
        raise GraphError("global_min_cut needs an undirected graph or symmetric weights")
    return [(u, v, w) for u, v, w in g.edges if u < v]


def _cut_value(n: int, edges: Sequence[tuple[int, int, float]], side: NodeSet) -> float:
    inside = np.zeros(n, dtype=bool)
    inside[list(side)] = True
    total = 0.0
    for u, v, w in edges:
        if inside[u] != inside[v]:
            total += w
    return total


def _components(n: int, edges: Sequence[tuple[int, int, float]]) -> np.ndarray:
    if not edges:
        return np.arange(n)
    rows = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    cols = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    mat = csr_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(mat, directed=False)
    return labels


class _Best:
    def __init__(self) -> None:
        self.value = math.inf
        self.side: NodeSet | None = None

    def offer(self, value: float, side_fn, n: int) -> None:
        tol = _TIE_TOL * max(1.0, abs(self.value)) if math.isfinite(self.value) else 0.0
        if value < self.value - tol:
            self.value = value
            self.side = _canonical_side(side_fn(), n)
        elif abs(value - self.value) <= tol:
            side = _canonical_side(side_fn(), n)
            if self.side is None or side < self.side:
                self.side = side


def min_cut_edges(n: int, edges: Sequence[tuple[int, int, float]]) -> MinCut:
    """Exact minimum cut of an undirected multigraph given as ``(u, v, w)`` triples."""
    if n < 2:
        raise ValueError("a global cut needs at least two vertices")
    labels = _components(n, edges)
    if len(set(labels.tolist())) > 1:
        comp0 = labels[0]
        return MinCut(0.0, tuple(v for v in range(n) if labels[v] == comp0))

    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for u, v, w in edges:
        if u == v:
            continue
        adj[u][v] = adj[u].get(v, 0.0) + w
        adj[v][u] = adj[v].get(u, 0.0) + w
    members: list[list[int]] = [[v] for v in range(n)]
    alive = list(range(n))
    best = _Best()

    while len(alive) > 1:
        for v in alive:
            best.offer(sum(adj[v].values()), lambda v=v: members[v], n)

        parent = {v: v for v in alive}

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a: int, b: int) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        # Padberg-Rinaldi: w(uv) + sum_x min(w(ux), w(vx)) lower-bounds lambda(u, v).
        for u in alive:
            au = adj[u]
            for v, wuv in au.items():
                if v <= u:
                    continue
                av = adj[v]
                small, other = (au, av) if len(au) <= len(av) else (av, au)
                lb = wuv
                for x, wx in small.items():
                    wo = other.get(x)
                    if wo is not None:
                        lb += wx if wx < wo else wo
                if lb >= best.value:
                    union(u, v)

        # Maximum-adjacency scan; r[y] after adding edge (x, y) lower-bounds lambda(x, y).
        deg = {v: sum(adj[v].values()) for v in alive}
        attach = dict.fromkeys(alive, 0.0)
        seen: set[int] = set()
        order: list[int] = []
        prefix = 0.0
        heap: list[tuple[float, int]] = [(0.0, alive[0])]
        while heap:
            _, x = heapq.heappop(heap)
            if x in seen:
                continue
            seen.add(x)
            order.append(x)
            prefix += deg[x] - 2.0 * attach[x]
            if len(order) < len(alive):
                snapshot = len(order)
                best.offer(
                    prefix,
                    lambda k=snapshot: [m for y in order[:k] for m in members[y]],
                    n,
                )
            for y, w in adj[x].items():
                if y in seen:
                    continue
                attach[y] += w
                if attach[y] >= best.value:
                    union(x, y)
                heapq.heappush(heap, (-attach[y], y))

        groups: dict[int, list[int]] = {}
        for v in alive:
            groups.setdefault(find(v), []).append(v)
        if len(groups) == len(alive):
            # Rounding can hide the last vertex's qualifying edge; the last two scanned
            # vertices are still safe to merge (their cut-of-phase was already offered).
            union(order[-2], order[-1])
            groups = {}
            for v in alive:
                groups.setdefault(find(v), []).append(v)
        new_adj: dict[int, dict[int, float]] = {}
        for root, vs in groups.items():
            acc: dict[int, float] = {}
            for v in vs:
                for y, w in adj[v].items():
                    ry = find(y)
                    if ry != root:
                        acc[ry] = acc.get(ry, 0.0) + w
            new_adj[root] = acc
            if len(vs) > 1:
                members[root] = sorted(m for v in vs for m in members[v])
        for root, acc in new_adj.items():
            adj[root] = acc
        alive = sorted(groups)

    assert best.side is not None
    return MinCut(_cut_value(n, edges, best.side), best.side)


def global_min_cut(g: UndirectedGraph | DirectedWeightedGraph) -> MinCut:
    """Exact global minimum cut; disconnected graphs give value 0.

    The witness is the side containing vertex 0 of the lexicographically
    smallest minimum cut among those discovered by the contraction scan.
    """
    return min_cut_edges(g.n, _weighted_edges(g))


def _unit_capacity_matrix(g: UndirectedGraph) -> csr_matrix:
    if g.m == 0:
        return csr_matrix((g.n, g.n), dtype=np.int32)
    us = np.array([e[0] for e in g.edges], dtype=np.int32)
    vs = np.array([e[1] for e in g.edges], dtype=np.int32)
    rows = np.concatenate([us, vs])
    cols = np.concatenate([vs, us])
    return csr_matrix((np.ones(rows.size, dtype=np.int32), (rows, cols)), shape=(g.n, g.n))


def edge_connectivity(g: UndirectedGraph, u: int, v: int, _cap: csr_matrix | None = None) -> int:
    """Number of edge-disjoint ``u``-``v`` paths, via unit-capacity max-flow."""
    if u == v:
        raise ValueError("edge connectivity needs two distinct vertices")
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise ValueError("vertex out of range")
    cap = _unit_capacity_matrix(g) if _cap is None else _cap
    return int(maximum_flow(cap, u, v).flow_value)


def min_pairwise_connectivity(g: UndirectedGraph) -> tuple[int, tuple[int, int]]:
    """Minimum edge connectivity over all vertex pairs, with the first pair attaining it."""
    cap = _unit_capacity_matrix(g)
    best = (math.inf, (0, 1))
    for u in range(g.n):
        for v in range(u + 1, g.n):
            c = edge_connectivity(g, u, v, cap)
            if c < best[0]:
                best = (c, (u, v))
    return int(best[0]), best[1]
