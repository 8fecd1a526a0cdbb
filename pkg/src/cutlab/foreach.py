"""For-each gadget: sign strings packed into a balanced directed chain graph.

Layout: ``n`` vertices split into ``ell`` consecutive blocks ``V_0..V_{ell-1}``
of ``k_block = sqrt(beta) * 2**k`` vertices. Each block is cut into
``sqrt(beta)`` clusters of ``2**k`` vertices. Chain block ``b`` encodes its
share of the string on the complete bipartite graph ``V_b -> V_{b+1}``;
cluster pair ``(i, j)`` (left cluster ``i`` of ``V_b``, right cluster ``j``
of ``V_{b+1}``) carries one substring of ``(2**k - 1)**2`` signs. Every
forward edge has a backward partner of weight ``1/beta``.

Bits are numbered chain-block major, then cluster pair ``(i, j)`` row-major,
then encoding-matrix row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graph import DirectedWeightedGraph, NodeSet
from .hadamard import EncodingMatrix, encoding_row
from .oracles import CutOracle

QUERY_SIGNS = (1, -1, -1, 1)
QUERY_LABELS = ("A,B", "~A,B", "A,~B", "~A,~B")


class InfeasibleParams(ValueError):
    """Parameters outside the construction's legal grid; ``suggestion`` names the nearest legal values."""

    def __init__(self, message: str, suggestion: str = "") -> None:
        super().__init__(message + (f" (nearest legal: {suggestion})" if suggestion else ""))
        self.suggestion = suggestion


class EncodingFailed(Exception):
    """The requested bit lives in a block whose encoding fell back to the constant vector."""


def nearest_square(x: int) -> int:
    r = max(1, round(math.sqrt(max(x, 1))))
    return r * r


@dataclass(frozen=True)
class ForEachParams:
    k: int
    beta: int
    n: int
    c1: float = 2.0
    c2: float = 0.05

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InfeasibleParams(f"k must be >= 1 (eps = 2**-k), got {self.k}", "k=1")
        if self.beta < 1 or math.isqrt(self.beta) ** 2 != self.beta:
            raise InfeasibleParams(f"beta must be a perfect square, got {self.beta}",
                                   f"beta={nearest_square(self.beta)}")
        kb = self.k_block
        if self.n % kb != 0 or self.n // kb < 2:
            legal = max(2, round(self.n / kb)) * kb
            raise InfeasibleParams(
                f"n must be a multiple of k_block={kb} with at least 2 blocks, got n={self.n}",
                f"n={legal}")
        if self.c1 <= 0:
            raise InfeasibleParams(f"c1 must be positive, got {self.c1}")

    @property
    def inv_eps(self) -> int:
        return 1 << self.k

    @property
    def eps(self) -> float:
        return 1.0 / self.inv_eps

    @property
    def sqrt_beta(self) -> int:
        return math.isqrt(self.beta)

    @property
    def k_block(self) -> int:
        return self.sqrt_beta * self.inv_eps

    @property
    def ell(self) -> int:
        return self.n // self.k_block

    @property
    def sub_len(self) -> int:
        return (self.inv_eps - 1) ** 2

    @property
    def bits_per_chain_block(self) -> int:
        return self.beta * self.sub_len

    @property
    def capacity(self) -> int:
        return self.bits_per_chain_block * (self.ell - 1)

    @property
    def log_inv_eps(self) -> float:
        return self.k * math.log(2.0)

    @property
    def x_bound(self) -> float:
        return self.c1 * self.log_inv_eps * self.inv_eps

    @property
    def offset(self) -> float:
        return 2.0 * self.c1 * self.log_inv_eps

    @property
    def half(self) -> int:
        return self.inv_eps // 2

    def balance_bound(self) -> float:
        return 3.0 * self.c1 * self.beta * self.log_inv_eps

    def left_cluster(self, block: int, i: int) -> np.ndarray:
        return block * self.k_block + i * self.inv_eps + np.arange(self.inv_eps)

    def right_cluster(self, block: int, j: int) -> np.ndarray:
        return (block + 1) * self.k_block + j * self.inv_eps + np.arange(self.inv_eps)

    def block_nodes(self, block: int) -> np.ndarray:
        return block * self.k_block + np.arange(self.k_block)

    def address(self, q: int) -> tuple[int, int, int, int]:
        """Bit ``q`` -> ``(chain block, i, j, t)`` with ``t`` the 1-based matrix row."""
        if not 0 <= q < self.capacity:
            raise IndexError(f"bit index {q} outside 0..{self.capacity - 1}")
        block, rem = divmod(q, self.bits_per_chain_block)
        pair, t0 = divmod(rem, self.sub_len)
        i, j = divmod(pair, self.sqrt_beta)
        return block, i, j, t0 + 1


@dataclass
class ForEachEncoding:
    params: ForEachParams
    graph: DirectedWeightedGraph
    block_success: dict[tuple[int, int, int], bool]
    weight_vectors: dict[tuple[int, int, int], np.ndarray] = field(repr=False)

    @property
    def failures(self) -> int:
        return sum(1 for ok in self.block_success.values() if not ok)


def encode_block(z: Sequence[int], p: ForEachParams, force_fail: bool = False) -> tuple[np.ndarray, bool]:
    z = np.asarray(z, dtype=np.int64)
    if z.shape != (p.sub_len,):
        raise ValueError(f"substring must have length {p.sub_len}, got {z.size}")
    if np.any(np.abs(z) != 1):
        raise ValueError("substring entries must be +1 or -1")
    x = EncodingMatrix(p.k).combine(z)
    if force_fail or np.max(np.abs(x)) > p.x_bound:
        return np.full(p.inv_eps ** 2, p.offset), False
    return p.eps * x + p.offset, True


def build_graph(s: Sequence[int], p: ForEachParams,
                force_fail: frozenset[tuple[int, int, int]] = frozenset()) -> ForEachEncoding:
    s = np.asarray(s, dtype=np.int64)
    if s.shape != (p.capacity,):
        raise ValueError(f"string must have length {p.capacity}, got {s.size}")
    back = 1.0 / p.beta
    forward: list[tuple[int, int, float]] = []
    backward: list[tuple[int, int, float]] = []
    success: dict[tuple[int, int, int], bool] = {}
    vectors: dict[tuple[int, int, int], np.ndarray] = {}
    q = 0
    for block in range(p.ell - 1):
        for i in range(p.sqrt_beta):
            for j in range(p.sqrt_beta):
                key = (block, i, j)
                w, ok = encode_block(s[q:q + p.sub_len], p, key in force_fail)
                q += p.sub_len
                success[key] = ok
                vectors[key] = w
                left, right = p.left_cluster(block, i), p.right_cluster(block, j)
                for a, u in enumerate(left):
                    for b, v in enumerate(right):
                        forward.append((int(u), int(v), float(w[a * p.inv_eps + b])))
                        backward.append((int(v), int(u), back))
    return ForEachEncoding(p, DirectedWeightedGraph(p.n, tuple(forward + backward)), success, vectors)


@dataclass(frozen=True)
class DecoderQuery:
    sets: tuple[NodeSet, NodeSet, NodeSet, NodeSet]
    backward_weight: float
    block: int
    cluster_pair: tuple[int, int]
    row: int


def backward_weight(p: ForEachParams, block: int) -> float:
    """Fixed backward weight leaving every decoder query set of chain block ``block``.

    Three groups cross: ``V_{b+1} - Y -> V_b - X`` inside the block pair,
    ``X -> V_{b-1}`` when a previous block exists, and ``V_{b+2} -> Y`` when a
    later block exists. ``|X| = |Y| = 2**k / 2``.
    """
    kb, h = p.k_block, p.half
    total = (kb - h) ** 2 / p.beta
    if block >= 1:
        total += h * kb / p.beta
    if block + 2 <= p.ell - 1:
        total += kb * h / p.beta
    return total


def decoder_cut_set(p: ForEachParams, q: int) -> DecoderQuery:
    block, i, j, t = p.address(q)
    _, h_a, h_b = encoding_row(p.k, t)
    left, right = p.left_cluster(block, i), p.right_cluster(block, j)
    a_set, a_bar = left[h_a == 1], left[h_a == -1]
    b_set, b_bar = right[h_b == 1], right[h_b == -1]
    later = np.arange((block + 2) * p.k_block, p.n)
    next_block = p.block_nodes(block + 1)
    sets = []
    for x_side, y_side in ((a_set, b_set), (a_bar, b_set), (a_set, b_bar), (a_bar, b_bar)):
        rest = np.setdiff1d(next_block, y_side)
        sets.append(tuple(sorted(int(v) for v in np.concatenate([x_side, rest, later]))))
    return DecoderQuery(tuple(sets), backward_weight(p, block), block, (i, j), t)


def estimate_inner_product(oracle: CutOracle, q: int, p: ForEachParams) -> float:
    """Estimate ``<w, M_t>`` for bit ``q`` from four cut queries."""
    dq = decoder_cut_set(p, q)
    masks = np.zeros((4, p.n), dtype=bool)
    for r, s in enumerate(dq.sets):
        masks[r, list(s)] = True
    values = oracle.query_many(masks)
    return float(sum(sg * (v - dq.backward_weight) for sg, v in zip(QUERY_SIGNS, values)))


def decode_bit(oracle: CutOracle, q: int, p: ForEachParams,
               block_success: Mapping[tuple[int, int, int], bool]) -> int:
    block, i, j, _ = p.address(q)
    if not block_success[(block, i, j)]:
        raise EncodingFailed(f"bit {q} lies in failed block {(block, i, j)}")
    return 1 if estimate_inner_product(oracle, q, p) > 0 else -1


def max_query_value(p: ForEachParams, block: int) -> float:
    """Closed-form upper bound on any decoder query value for chain block ``block``."""
    return 3.0 * p.c1 * p.log_inv_eps * p.half ** 2 + backward_weight(p, block)


def guaranteed_noise_budget(p: ForEachParams, block: int) -> float:
    """Largest eps' (exclusive) with ``4 eps' V_max < 1/eps``: recovery is then certain."""
    return p.inv_eps / (4.0 * max_query_value(p, block))


def roundtrip(p: ForEachParams, s: Sequence[int], oracle_factory,
              force_fail: frozenset[tuple[int, int, int]] = frozenset()) -> dict:
    """Encode ``s``, build an oracle over the graph, decode every bit.

    ``oracle_factory`` maps the encoded graph to a ``CutOracle``.
    """
    enc = build_graph(s, p, force_fail)
    oracle = oracle_factory(enc.graph)
    s = np.asarray(s)
    failures = correct = 0
    for q in range(p.capacity):
        try:
            bit = decode_bit(oracle, q, p, enc.block_success)
        except EncodingFailed:
            failures += 1
            continue
        correct += int(bit == s[q])
    return {
        "bit_count": p.capacity,
        "failures": failures,
        "correct": correct,
        "failed_blocks": enc.failures,
        "queries": oracle.query_count,
    }
