"""For-all gadget: Gap-Hamming strings as edge weights of a (2 beta)-balanced chain.

Everything is parametrised by the integer ``d = 1/eps**2``. Blocks hold
``k = beta * d`` vertices. In chain block ``b`` the left nodes are the
vertices of ``V_b`` and the right side ``V_{b+1}`` is split into ``beta``
clusters ``R_j`` of ``d`` vertices. String ``s[b, i, j]`` sets the weights of
the forward edges from left node ``i`` into ``R_j`` (weight ``bit + 1``);
every forward edge has a backward partner of weight ``1/beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .graph import DirectedWeightedGraph
from .oracles import CutOracle

REJECTION_CAP = 10**6
ARGMAX_TOL = 1e-9


class InfeasibleParams(ValueError):
    pass


@dataclass(frozen=True)
class ForAllParams:
    d: int
    beta: int
    n: int
    c: float = 0.05
    c1: float = 0.05
    c2: float = 0.02
    enum_cap: int = 20_000

    def __post_init__(self) -> None:
        if self.d < 2 or self.d % 2:
            raise InfeasibleParams(f"d = 1/eps^2 must be even and >= 2, got {self.d}")
        if self.beta < 1:
            raise InfeasibleParams(f"beta must be a positive integer, got {self.beta}")
        k = self.k
        if self.n % k or self.n // k < 2:
            raise InfeasibleParams(
                f"n must be a multiple of k=beta*d={k} with at least 2 blocks, got {self.n} "
                f"(nearest legal: n={max(2, round(self.n / k)) * k})")
        if self.c <= 0 or self.gap > self.d / 2:
            raise InfeasibleParams(f"gap c/eps = {self.gap:.4g} must lie in (0, d/2]")
        if self.subset_count > self.enum_cap:
            raise InfeasibleParams(
                f"C({k},{k // 2}) = {self.subset_count} subsets exceeds enum_cap={self.enum_cap}")

    @property
    def eps(self) -> float:
        return 1.0 / math.sqrt(self.d)

    @property
    def k(self) -> int:
        return self.beta * self.d

    @property
    def ell(self) -> int:
        return self.n // self.k

    @property
    def gap(self) -> float:
        """``c/eps`` in units of Hamming distance."""
        return self.c * math.sqrt(self.d)

    @property
    def string_count(self) -> int:
        return (self.ell - 1) * self.k * self.beta

    @property
    def subset_count(self) -> int:
        return math.comb(self.k, self.k // 2)

    @property
    def noise(self) -> float:
        """Oracle error rate ``c2 * eps``."""
        return self.c2 * self.eps

    def left_node(self, block: int, i: int) -> int:
        return block * self.k + i

    def cluster(self, block: int, j: int) -> np.ndarray:
        return (block + 1) * self.k + j * self.d + np.arange(self.d)


def hamming_intersection_identity(s, t) -> tuple[int, int]:
    s = np.asarray(s, dtype=np.int64)
    t = np.asarray(t, dtype=np.int64)
    d = s.size
    if t.size != d or d % 2:
        raise ValueError("strings must share an even length")
    if s.sum() != d // 2 or t.sum() != d // 2:
        raise ValueError("both strings must have Hamming weight d/2")
    delta = int(np.sum(s != t))
    inter = int(np.sum(s & t))
    assert delta == d - 2 * inter
    return delta, inter


def _weight_half_strings(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    keys = rng.random((count, d))
    order = np.argsort(keys, axis=1)
    out = np.zeros((count, d), dtype=np.int8)
    np.put_along_axis(out, order[:, : d // 2], 1, axis=1)
    return out


def gap_accepts(delta: int, d: int, gap: float, side: str) -> bool:
    if side == "high":
        return delta >= d / 2 + gap
    return delta <= d / 2 - gap


@dataclass
class GapHammingInstance:
    params: ForAllParams
    strings: np.ndarray = field(repr=False)  # (ell-1, k, beta, d) in {0,1}
    bob_index: tuple[int, int, int]
    bob_string: np.ndarray = field(repr=False)
    promise_side: str  # "high" or "low" Hamming distance
    draws: int = 0

    def intersections(self) -> np.ndarray:
        """``|N(l) cap T|`` for every left node of Bob's block against Bob's cluster."""
        b, _, j = self.bob_index
        return self.strings[b, :, j, :].astype(np.int64) @ self.bob_string.astype(np.int64)

    def high_fraction(self) -> float:
        """``|L_high| / |L|``: left nodes whose overlap with ``T`` clears ``d/4 + gap/2``."""
        p = self.params
        return float(np.mean(self.intersections() >= p.d / 4 + p.gap / 2))

    def low_fraction(self) -> float:
        p = self.params
        return float(np.mean(self.intersections() <= p.d / 4 - p.gap / 2))


def sample_gap_hamming(p: ForAllParams, seed: int) -> GapHammingInstance:
    rng = np.random.default_rng(seed)
    blocks = p.ell - 1
    strings = _weight_half_strings(rng, blocks * p.k * p.beta, p.d).reshape(blocks, p.k, p.beta, p.d)
    bob = (int(rng.integers(blocks)), int(rng.integers(p.k)), int(rng.integers(p.beta)))
    side = "high" if rng.random() < 0.5 else "low"
    draws = 0
    batch = 256
    while draws < REJECTION_CAP:
        s = _weight_half_strings(rng, batch, p.d)
        t = _weight_half_strings(rng, batch, p.d)
        delta = np.sum(s != t, axis=1)
        ok = delta >= p.d / 2 + p.gap if side == "high" else delta <= p.d / 2 - p.gap
        hits = np.nonzero(ok)[0]
        if hits.size:
            draws += int(hits[0]) + 1
            strings[bob[0], bob[1], bob[2]] = s[hits[0]]
            return GapHammingInstance(p, strings, bob, t[hits[0]], side, draws)
        draws += batch
    raise InfeasibleParams(f"no {side}-distance pair within {REJECTION_CAP} draws; gap too large")


@dataclass
class ForAllEncoding:
    params: ForAllParams
    graph: DirectedWeightedGraph


def encode(strings, p: ForAllParams) -> ForAllEncoding:
    strings = np.asarray(strings)
    if strings.size != p.string_count * p.d:
        raise ValueError(f"expected {p.string_count} strings of length {p.d}")
    strings = strings.reshape(p.ell - 1, p.k, p.beta, p.d)
    if np.any((strings != 0) & (strings != 1)):
        raise ValueError("strings must be 0/1")
    back = 1.0 / p.beta
    forward, backward = [], []
    for b in range(p.ell - 1):
        for i in range(p.k):
            u = p.left_node(b, i)
            for j in range(p.beta):
                for v, bit in zip(p.cluster(b, j), strings[b, i, j]):
                    forward.append((u, int(v), float(bit) + 1.0))
                    backward.append((int(v), u, back))
    return ForAllEncoding(p, DirectedWeightedGraph(p.n, tuple(forward + backward)))


def backward_weight(p: ForAllParams, block: int) -> float:
    """Fixed backward weight leaving every decoder query set of chain block ``block``.

    ``V_{b+1} - T -> V_b - U`` always; ``U -> V_{b-1}`` when a previous block
    exists; ``V_{b+2} -> T`` when a later block exists.
    """
    k, half_d = p.k, p.d // 2
    total = (k - half_d) * (k // 2) / p.beta
    if block >= 1:
        total += k * (k // 2) / p.beta
    if block + 2 <= p.ell - 1:
        total += k * half_d / p.beta
    return total


def subset_masks(p: ForAllParams, block: int, j: int, t) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Membership rows for ``U cup (V_{b+1} - T) cup V_{b+2..}`` over all ``|U| = k/2``, lexicographic."""
    t = np.asarray(t)
    tset = p.cluster(block, j)[t == 1]
    base = np.zeros(p.n, dtype=bool)
    base[(block + 1) * p.k:] = True
    base[tset] = False
    subsets = list(combinations(range(p.k), p.k // 2))
    masks = np.repeat(base[None, :], len(subsets), axis=0)
    idx = np.asarray(subsets, dtype=np.int64) + block * p.k
    np.put_along_axis(masks, idx, True, axis=1)
    return masks, subsets


def first_argmax(values: np.ndarray) -> int:
    """Index of the first value within ``ARGMAX_TOL`` (relative) of the maximum."""
    top = float(np.max(values))
    return int(np.nonzero(values >= top - ARGMAX_TOL * max(1.0, abs(top)))[0][0])


@dataclass(frozen=True)
class Decision:
    side: str
    chosen: tuple[int, ...]
    subsets_enumerated: int
    estimates: np.ndarray = field(repr=False, compare=False)


def decode(oracle: CutOracle, bob: tuple[int, int, int, np.ndarray], p: ForAllParams) -> Decision:
    """Bob's decision for ``(block, i, j, t)``: ``low`` distance iff left node ``i`` is in ``Q``."""
    block, i, j, t = bob
    if p.subset_count > p.enum_cap:
        raise InfeasibleParams(f"C({p.k},{p.k // 2}) exceeds enum_cap={p.enum_cap}")
    masks, subsets = subset_masks(p, block, j, t)
    est = oracle.query_many(masks) - backward_weight(p, block)
    q = subsets[first_argmax(est)]
    return Decision("low" if i in q else "high", q, len(subsets), est)


def roundtrip(p: ForAllParams, seed: int, oracle_factory) -> dict:
    inst = sample_gap_hamming(p, seed)
    enc = encode(inst.strings, p)
    oracle = oracle_factory(enc.graph)
    b, i, j = inst.bob_index
    dec = decode(oracle, (b, i, j, inst.bob_string), p)
    return {
        "side_truth": inst.promise_side,
        "side_decided": dec.side,
        "correct": dec.side == inst.promise_side,
        "subsets_enumerated": dec.subsets_enumerated,
        "queries": oracle.query_count,
        "high_fraction": inst.high_fraction(),
    }
