"""Graph containers, directed cut evaluation and balance checks.

Vertex ids are dense integers ``0..n-1``. A cut side is a canonical
``NodeSet``: a sorted tuple of distinct vertex ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

NodeSet = tuple[int, ...]

REL_TOL = 1e-9
BALANCE_MAX_N = 20


class GraphError(ValueError):
    """Raised when a graph violates its structural invariants."""


class CutPreconditionError(ValueError):
    """Raised when a cut side is empty, full, or out of range."""


def node_set(members: Iterable[int]) -> NodeSet:
    return tuple(sorted(set(int(v) for v in members)))


def complement(s: Iterable[int], n: int) -> NodeSet:
    inside = set(s)
    return tuple(v for v in range(n) if v not in inside)


def membership_mask(s: Iterable[int], n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter((int(v) for v in s), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise CutPreconditionError(f"cut side has a vertex outside 0..{n - 1}")
    mask[idx] = True
    return mask


def _check_proper(mask: np.ndarray) -> None:
    inside = int(mask.sum())
    if inside == 0 or inside == mask.size:
        raise CutPreconditionError("cut side must be a proper nonempty subset of V")


@dataclass(frozen=True)
class DirectedWeightedGraph:
    """Directed graph with strictly positive finite weights, at most one edge per ordered pair."""

    n: int
    edges: tuple[tuple[int, int, float], ...]
    src: np.ndarray = field(init=False, repr=False, compare=False)
    dst: np.ndarray = field(init=False, repr=False, compare=False)
    weight: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        edges = tuple((int(u), int(v), float(w)) for u, v, w in self.edges)
        object.__setattr__(self, "edges", edges)
        seen: set[tuple[int, int]] = set()
        for u, v, w in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (math.isfinite(w) and w > 0):
                raise GraphError(f"edge ({u},{v}) has weight {w}; weights must be finite and > 0")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
        src = np.array([e[0] for e in edges], dtype=np.int64)
        dst = np.array([e[1] for e in edges], dtype=np.int64)
        wts = np.array([e[2] for e in edges], dtype=np.float64)
        for arr in (src, dst, wts):
            arr.setflags(write=False)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "weight", wts)

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight_map(self) -> dict[tuple[int, int], float]:
        return {(u, v): w for u, v, w in self.edges}

    def is_symmetric(self) -> bool:
        wm = self.weight_map()
        return all(wm.get((v, u)) == w for (u, v), w in wm.items())


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple undirected graph; edges are stored as ``(min, max)`` pairs in sorted order."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        canon = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {{{u},{v}}} has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            pair = (u, v) if u < v else (v, u)
            if pair in canon:
                raise GraphError(f"multi-edge {{{u},{v}}}")
            canon.add(pair)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def to_directed(self, weight: float = 1.0) -> DirectedWeightedGraph:
        arcs = [(u, v, weight) for u, v in self.edges] + [(v, u, weight) for u, v in self.edges]
        return DirectedWeightedGraph(self.n, tuple(arcs))


def cut_weight(g: DirectedWeightedGraph, s: Iterable[int]) -> float:
    """Total weight of edges leaving ``s``.

    Edges are accumulated strictly left to right in ascending edge index (a
    running sum, not numpy's pairwise reduction), the same order
    ``cut_weights`` uses per row, so both agree bit for bit.
    """
    mask = membership_mask(s, g.n)
    _check_proper(mask)
    return float(_ordered_sum(mask[None, :], g)[0])


def cut_weights(g: DirectedWeightedGraph, masks: np.ndarray) -> np.ndarray:
    """Vectorised ``cut_weight`` over a ``(q, n)`` boolean membership matrix."""
    masks = np.asarray(masks, dtype=bool)
    if masks.ndim != 2 or masks.shape[1] != g.n:
        raise CutPreconditionError(f"expected a (q, {g.n}) membership matrix")
    sizes = masks.sum(axis=1)
    if np.any(sizes == 0) or np.any(sizes == g.n):
        raise CutPreconditionError("cut side must be a proper nonempty subset of V")
    return _ordered_sum(masks, g)


def _ordered_sum(masks: np.ndarray, g: DirectedWeightedGraph) -> np.ndarray:
    if g.m == 0:
        return np.zeros(masks.shape[0])
    crossing = masks[:, g.src] & ~masks[:, g.dst]
    return np.cumsum(np.where(crossing, g.weight, 0.0), axis=1)[:, -1]


def _all_cut_masks(n: int, chunk: int = 1 << 16):
    shifts = np.arange(n, dtype=np.int64)
    total = (1 << n) - 1
    for start in range(1, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield ((ids[:, None] >> shifts) & 1).astype(bool)


def is_beta_balanced_exhaustive(g: DirectedWeightedGraph, beta: float) -> bool:
    """Check ``w(S, V-S) <= beta * w(V-S, S)`` over every proper nonempty ``S``."""
    if g.n > BALANCE_MAX_N:
        raise ValueError(f"exhaustive balance check is capped at n <= {BALANCE_MAX_N}, got {g.n}")
    if g.n < 2:
        return True
    for ins in _all_cut_masks(g.n):
        fwd = (ins[:, g.src] & ~ins[:, g.dst]).astype(np.float64) @ g.weight
        bwd = (~ins[:, g.src] & ins[:, g.dst]).astype(np.float64) @ g.weight
        if np.any(fwd > beta * bwd * (1.0 + REL_TOL)):
            return False
    return True


def edge_reverse_ratio(g: DirectedWeightedGraph) -> float:
    """Largest ``w(u,v)/w(v,u)`` over all edges; ``inf`` when some reverse edge is missing."""
    wm = g.weight_map()
    ratio = 0.0
    for (u, v), w in wm.items():
        back = wm.get((v, u))
        if back is None:
            return math.inf
        ratio = max(ratio, w / back)
    return ratio


# -- edge-list text format -------------------------------------------------

def write_edge_list(g: DirectedWeightedGraph | UndirectedGraph, fh: TextIO) -> None:
    if isinstance(g, DirectedWeightedGraph):
        fh.write(f"n {g.n} directed\n")
        for u, v, w in g.edges:
            fh.write(f"{u} {v} {w!r}\n")
    else:
        fh.write(f"n {g.n} undirected\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def read_edge_list(fh: TextIO) -> DirectedWeightedGraph | UndirectedGraph:
    lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise GraphError("empty edge-list file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "n" or head[2] not in ("directed", "undirected"):
        raise GraphError(f"bad header {lines[0]!r}; expected 'n <count> directed|undirected'")
    n = int(head[1])
    if head[2] == "directed":
        edges = []
        for ln in lines[1:]:
            u, v, w = ln.split()
            edges.append((int(u), int(v), float(w)))
        return DirectedWeightedGraph(n, tuple(edges))
    pairs = []
    for ln in lines[1:]:
        u, v = ln.split()
        pairs.append((int(u), int(v)))
    return UndirectedGraph(n, tuple(pairs))


def undirected_from_pairs(n: int, pairs: Sequence[tuple[int, int]]) -> UndirectedGraph:
    return UndirectedGraph(n, tuple((int(u), int(v)) for u, v in pairs))
