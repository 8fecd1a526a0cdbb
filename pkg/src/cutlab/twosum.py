"""2-SUM instances, the G_{x,y} graph and the reduction from 2-SUM to global min cut.

Vertex layout of ``G_{x,y}`` with ``ell = sqrt(N)``: ``A = 0..ell-1``,
``A' = ell..2ell-1``, ``B = 2ell..3ell-1``, ``B' = 3ell..4ell-1``. Bit
``(i, j)`` (0-based) sits at index ``i*ell + j``. An intersecting bit joins
``a_i - b'_j`` and ``b_i - a'_j``; any other bit joins ``a_i - a'_j`` and
``b_i - b'_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import UndirectedGraph
from .localquery import LocalGraphOracle
from .mincut import global_min_cut, min_pairwise_connectivity

LEMMA_MAX_N = 400
CONNECTIVITY_MAX_N = 64
PROMISE_FRACTION = 1 / 1000


class InfeasibleInstance(ValueError):
    pass


def _bits(x) -> np.ndarray:
    if isinstance(x, str):
        return np.array([int(ch) for ch in x], dtype=np.int8)
    return np.asarray(x, dtype=np.int8)


def int_count(x, y) -> int:
    x, y = _bits(x), _bits(y)
    if x.shape != y.shape:
        raise ValueError("strings must have equal length")
    return int(np.sum(x & y))


def disj(x, y) -> int:
    return int(int_count(x, y) == 0)


# -- 2-SUM instances ----------------------------------------------------------

@dataclass
class TwoSumInstance:
    t: int
    L: int
    alpha: int
    x: np.ndarray = field(repr=False)  # (t, L) Alice
    y: np.ndarray = field(repr=False)  # (t, L) Bob
    r_true: int = 0

    def ints(self) -> np.ndarray:
        return np.sum(self.x & self.y, axis=1)

    def disj_sum(self) -> int:
        return int(np.sum(self.ints() == 0))

    def promise_ok(self) -> bool:
        ints = self.ints()
        return bool(np.all((ints == 0) | (ints == self.alpha)) and self.r_true >= self.t * PROMISE_FRACTION
                    and self.r_true == int(np.sum(ints == self.alpha)))

    @property
    def total_len(self) -> int:
        return self.t * self.L


def _pair_with_int(L: int, inter: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    # non-shared positions draw uniformly from {(0,0), (1,0), (0,1)}
    kind = rng.integers(0, 3, size=L)
    x = (kind == 1).astype(np.int8)
    y = (kind == 2).astype(np.int8)
    common = rng.choice(L, size=inter, replace=False)
    x[common] = 1
    y[common] = 1
    return x, y


def sample_two_sum(t: int, L: int, alpha: int, r: int, seed: int) -> TwoSumInstance:
    if t < 1 or L < 1 or alpha < 1:
        raise InfeasibleInstance("t, L and alpha must be positive")
    if alpha > L:
        raise InfeasibleInstance(f"alpha={alpha} exceeds string length L={L}")
    if r < math.ceil(t * PROMISE_FRACTION) or r > t:
        raise InfeasibleInstance(
            f"r={r} must lie in {math.ceil(t * PROMISE_FRACTION)}..{t} (intersecting-pair promise)")
    rng = np.random.default_rng(seed)
    hit = np.zeros(t, dtype=bool)
    hit[rng.choice(t, size=r, replace=False)] = True
    xs, ys = zip(*(_pair_with_int(L, alpha if h else 0, rng) for h in hit))
    return TwoSumInstance(t, L, alpha, np.stack(xs), np.stack(ys), r)


def amplify(inst: TwoSumInstance, alpha: int) -> TwoSumInstance:
    """Concatenate every string ``alpha`` times; INT values scale from {0, 1} to {0, alpha}."""
    ints = inst.ints()
    if np.any(ints > 1):
        raise InfeasibleInstance("amplification needs INT in {0, 1} for every pair")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    return TwoSumInstance(inst.t, inst.L * alpha, alpha, np.tile(inst.x, alpha), np.tile(inst.y, alpha),
                          int(np.sum(ints == 1)))


# -- G_{x,y} ------------------------------------------------------------------

@dataclass(frozen=True)
class PairedStrings:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x, y = _bits(self.x), _bits(self.y)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be equal-length bit strings")
        ell = math.isqrt(x.size)
        if ell * ell != x.size or ell == 0:
            raise InfeasibleInstance(f"N={x.size} is not a positive perfect square")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def N(self) -> int:
        return self.x.size

    @property
    def ell(self) -> int:
        return math.isqrt(self.N)

    def hits(self) -> np.ndarray:
        """``(ell, ell)`` boolean matrix of intersecting bits."""
        return (self.x & self.y).astype(bool).reshape(self.ell, self.ell)

    @property
    def gamma(self) -> int:
        return int(self.hits().sum())


@dataclass(frozen=True)
class GxyGraph:
    strings: PairedStrings
    graph: UndirectedGraph
    order: tuple[tuple[int, ...], ...]  # neighbour lists in the j-indexed order

    @property
    def ell(self) -> int:
        return self.strings.ell

    @property
    def gamma(self) -> int:
        return self.strings.gamma

    def side_a(self) -> tuple[int, ...]:
        return tuple(range(2 * self.ell))


def gxy_neighbor_order(p: PairedStrings) -> list[list[int]]:
    """Neighbour lists where the ``j``-th neighbour of ``a_i``/``b_i`` is ``a'_j`` or ``b'_j``
    and the ``i``-th neighbour of ``a'_j``/``b'_j`` is ``a_i`` or ``b_i``."""
    ell = p.ell
    hit = p.hits()
    a, a2, b, b2 = 0, ell, 2 * ell, 3 * ell
    out: list[list[int]] = [[] for _ in range(4 * ell)]
    for i in range(ell):
        out[a + i] = [(b2 if hit[i, j] else a2) + j for j in range(ell)]
        out[b + i] = [(a2 if hit[i, j] else b2) + j for j in range(ell)]
    for j in range(ell):
        out[a2 + j] = [(b if hit[i, j] else a) + i for i in range(ell)]
        out[b2 + j] = [(a if hit[i, j] else b) + i for i in range(ell)]
    return out


def build_gxy(p: PairedStrings) -> GxyGraph:
    order = gxy_neighbor_order(p)
    pairs = [(u, v) for u, nb in enumerate(order) for v in nb if u < v]
    return GxyGraph(p, UndirectedGraph(4 * p.ell, tuple(pairs)), tuple(tuple(nb) for nb in order))


def partition_cut(g: GxyGraph) -> int:
    """Edges between ``A cup A'`` and ``B cup B'``."""
    half = 2 * g.ell
    return sum(1 for u, v in g.graph.edges if (u < half) != (v < half))


def lemma_condition(p: PairedStrings) -> bool:
    return p.ell >= 3 * p.gamma


def check_mincut_lemma(p: PairedStrings) -> dict:
    if p.N > LEMMA_MAX_N:
        raise InfeasibleInstance(f"N={p.N} exceeds the exact-check cap {LEMMA_MAX_N}")
    g = build_gxy(p)
    cut = global_min_cut(g.graph).value
    gamma = p.gamma
    met = lemma_condition(p)
    return {"holds": bool(cut == 2 * gamma) if met else None, "mincut": cut, "int": gamma,
            "condition_met": met}


def check_connectivity(p: PairedStrings) -> bool:
    """All-pairs edge connectivity of ``G_{x,y}`` equals ``2 * INT(x, y)`` exactly."""
    if p.N > CONNECTIVITY_MAX_N:
        raise InfeasibleInstance(f"N={p.N} exceeds the all-pairs cap {CONNECTIVITY_MAX_N}")
    if not lemma_condition(p):
        raise InfeasibleInstance("connectivity statement needs sqrt(N) >= 3 INT(x, y)")
    low, _ = min_pairwise_connectivity(build_gxy(p).graph)
    return low == 2 * p.gamma


def random_pair(N: int, gamma: int, rng: np.random.Generator) -> PairedStrings:
    x, y = _pair_with_int(N, gamma, rng)
    return PairedStrings(x, y)


def _check_chunk(xs: range) -> tuple[int, int, int]:
    """Lemma check for every ``x`` in ``xs`` against all ``y`` with ``INT <= 1`` (N = 9)."""
    checked = violations = 0
    cache: dict[tuple, float] = {}
    for xv in xs:
        x = np.array([(xv >> (8 - b)) & 1 for b in range(9)], dtype=np.int8)
        for yv in range(512):
            if bin(xv & yv).count("1") > 1:
                continue
            y = np.array([(yv >> (8 - b)) & 1 for b in range(9)], dtype=np.int8)
            p = PairedStrings(x, y)
            g = build_gxy(p)
            cut = cache.get(g.graph.edges)
            if cut is None:
                cut = cache[g.graph.edges] = global_min_cut(g.graph).value
            checked += 1
            if cut != 2 * p.gamma or partition_cut(g) != 2 * p.gamma or set(g.graph.degrees()) != {3}:
                violations += 1
    return checked, violations, len(cache)


def exhaustive_n9(jobs: int = 1) -> dict:
    """Every ``(x, y)`` in ``{0,1}^9 x {0,1}^9`` with ``INT <= 1``.

    Min cuts are memoised on the exact edge set of each built graph, so every
    pair is still constructed and checked individually.
    """
    chunks = [range(s, min(s + 64, 512)) for s in range(0, 512, 64)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_check_chunk, chunks))
    else:
        parts = [_check_chunk(c) for c in chunks]
    return {"checked": sum(p[0] for p in parts), "violations": sum(p[1] for p in parts),
            "distinct_graphs": sum(p[2] for p in parts)}


# -- reduction ----------------------------------------------------------------

def concat_strings(inst: TwoSumInstance) -> PairedStrings:
    return PairedStrings(inst.x.reshape(-1), inst.y.reshape(-1))


def reduction_scale(eps: float, lam: float) -> float:
    return max(eps * eps * lam, 1.0)


def reduce_two_sum(inst: TwoSumInstance, mincut_algo: Callable[[GxyGraph], float], eps: float, lam: float,
                   strict: bool = True) -> dict:
    """Estimate ``sum DISJ`` as ``1/eps^2 - A(G_{x,y}) / (2 max{eps^2 lam, 1})``.

    ``strict`` enforces the worst-case condition ``sqrt(M) >= 3 max{lam, eps^-2}``;
    otherwise only the instance-level condition ``sqrt(M) >= 3 INT(x, y)`` that the
    min-cut identity needs is required.
    """
    inv_eps2 = 1.0 / (eps * eps)
    if abs(inst.t - inv_eps2) > 1e-9 * inv_eps2:
        raise InfeasibleInstance(f"pair count t={inst.t} must equal eps^-2={inv_eps2:g}")
    scale = reduction_scale(eps, lam)
    if inst.alpha != scale:
        raise InfeasibleInstance(f"alpha={inst.alpha} must equal max(eps^2 lam, 1)={scale:g}")
    p = concat_strings(inst)
    root = p.ell
    if strict:
        need = 3 * max(lam, inv_eps2)
        if root < need:
            raise InfeasibleInstance(f"sqrt(M)={root} < 3 max(lam, eps^-2)={need:g}")
    elif not lemma_condition(p):
        raise InfeasibleInstance(f"sqrt(M)={root} < 3 INT(x, y)={3 * p.gamma}")
    g = build_gxy(p)
    a = float(mincut_algo(g))
    estimate = inv_eps2 - a / (2.0 * scale)
    truth = inst.disj_sum()
    return {"estimate": estimate, "truth": truth, "error": estimate - truth, "mincut_estimate": a,
            "r": inst.r_true, "total_len": inst.total_len}


def exact_mincut_algo(g: GxyGraph) -> float:
    return global_min_cut(g.graph).value


# -- split oracle and communication ------------------------------------------

class SplitGxyOracle(LocalGraphOracle):
    """Local-query access to ``G_{x,y}`` where Alice holds ``x`` and Bob holds ``y``.

    Each neighbour or adjacency query is answered by exchanging ``x_{i,j}``
    and ``y_{i,j}`` (2 bits); degree queries are free since every degree is
    ``ell``. ``bits_exchanged`` is tallied per answered query, independently
    of the query counters.
    """

    BITS_PER_QUERY = 2

    def __init__(self, g: GxyGraph) -> None:
        super().__init__(g.graph, order=g.order)
        self.gxy = g
        self.bits_exchanged = 0

    def _exchange(self, queries: int) -> None:
        with self._lock:
            self.bits_exchanged += self.BITS_PER_QUERY * queries

    def neighbor(self, v: int, i: int) -> int | None:
        self._exchange(1)
        return super().neighbor(v, i)

    def neighbor_many(self, vs, idx):
        out = super().neighbor_many(vs, idx)
        self._exchange(len(out))
        return out

    def adjacent(self, u: int, v: int) -> bool:
        self._exchange(1)
        return super().adjacent(u, v)


def communication_account(o: LocalGraphOracle) -> int:
    """Bits implied by the query counters: ``2 * (neighbor + adjacency)``, degree queries free."""
    return SplitGxyOracle.BITS_PER_QUERY * (o.counts["neighbor"] + o.counts["adjacency"])
