"""Undirected test graphs with known minimum cut."""

from __future__ import annotations

import numpy as np

from .graph import UndirectedGraph

CHORD_REACH = 9  # each half is 2*CHORD_REACH = 18 edge-connected


def _relabel(n: int, pairs, rng: np.random.Generator) -> UndirectedGraph:
    perm = rng.permutation(n)
    return UndirectedGraph(n, tuple((int(perm[u]), int(perm[v])) for u, v in pairs))


def circulant_pairs(nodes, reach: int) -> list[tuple[int, int]]:
    """Cycle on ``nodes`` plus chords to the next ``reach - 1`` vertices along it."""
    h = len(nodes)
    if h <= 2 * reach:
        raise ValueError(f"circulant on {h} vertices needs more than {2 * reach} vertices")
    return [(nodes[i], nodes[(i + s) % h]) for i in range(h) for s in range(1, reach + 1)]


def planted_cycle_chords(n: int, k: int, seed: int, reach: int = CHORD_REACH) -> UndirectedGraph:
    """Two dense circulant halves joined by ``k`` vertex-disjoint crossing chords; min cut exactly ``k``.

    Each half is ``2*reach``-edge-connected, so for ``k < 2*reach`` the only
    minimum cut separates the halves. ``m = n*reach + k``.
    """
    if n % 2:
        raise ValueError("n must be even")
    if not 1 <= k < 2 * reach:
        raise ValueError(f"planted k must lie in 1..{2 * reach - 1}")
    h = n // 2
    if k > h:
        raise ValueError("more crossing chords than vertices per half")
    rng = np.random.default_rng(seed)
    left, right = list(range(h)), list(range(h, n))
    pairs = circulant_pairs(left, reach) + circulant_pairs(right, reach)
    a = rng.choice(h, size=k, replace=False)
    b = rng.choice(h, size=k, replace=False) + h
    pairs += [(int(u), int(v)) for u, v in zip(a, b)]
    return _relabel(n, pairs, rng)


def cycle_with_chords(n: int, chords: int, seed: int) -> UndirectedGraph:
    """Cycle ``C_n`` plus ``chords`` distinct random non-cycle edges."""
    rng = np.random.default_rng(seed)
    edges = {(i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i) for i in range(n)}
    target = len(edges) + chords
    while len(edges) < target:
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        edges.add((min(u, v), max(u, v)))
    return UndirectedGraph(n, tuple(sorted(edges)))


def complete_graph(n: int) -> UndirectedGraph:
    return UndirectedGraph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> UndirectedGraph:
    return UndirectedGraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def clique_bridge(n: int, k: int = 1, seed: int = 0) -> UndirectedGraph:
    """Two cliques on ``n/2`` vertices joined by ``k`` vertex-disjoint edges; min cut ``k`` when ``k < n/2 - 1``."""
    if n % 2:
        raise ValueError("n must be even")
    h = n // 2
    if not 1 <= k < h - 1:
        raise ValueError(f"k must lie in 1..{h - 2}")
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u in range(h) for v in range(u + 1, h)]
    pairs += [(u + h, v + h) for u, v in pairs]
    pairs += [(i, h + i) for i in range(k)]
    return _relabel(n, pairs, rng)


FAMILIES = {
    "cycle-chords": planted_cycle_chords,
    "clique-bridge": clique_bridge,
}


def make_family(name: str, n: int, k: int, seed: int) -> UndirectedGraph:
    try:
        fn = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return fn(n, k, seed)
