"""Cut-query oracles standing in for (1 +- eps) cut sketches.

Every oracle counts each answered query. ``query_many`` answers a batch given
as a boolean membership matrix and counts one query per row.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import DirectedWeightedGraph, cut_weight, cut_weights, membership_mask

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def _splitmix64_np(x: np.ndarray) -> np.ndarray:
    z = x + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    return z ^ (z >> np.uint64(31))


def set_hash(seed: int, members: Iterable[int]) -> int:
    """Seeded 64-bit hash of a vertex set.

    Members are sorted and read as little-endian 64-bit words, so the result
    does not depend on insertion order.
    """
    h = splitmix64(seed & MASK64)
    for m in sorted(set(int(v) for v in members)):
        h = splitmix64(h ^ (m & MASK64))
    return h


def set_hash_rows(seed: int, masks: np.ndarray) -> np.ndarray:
    """``set_hash`` for every row of a boolean membership matrix."""
    masks = np.asarray(masks, dtype=bool)
    out = np.empty(masks.shape[0], dtype=np.uint64)
    sizes = masks.sum(axis=1)
    start = np.uint64(splitmix64(seed & MASK64))
    with np.errstate(over="ignore"):
        for size in np.unique(sizes):
            rows = np.nonzero(sizes == size)[0]
            cols = np.nonzero(masks[rows])[1].reshape(rows.size, int(size)).astype(np.uint64)
            h = np.full(rows.size, start, dtype=np.uint64)
            for c in range(int(size)):
                h = _splitmix64_np(h ^ cols[:, c])
            out[rows] = h
    return out


def _unit_interval(h: np.ndarray | int):
    # top 53 bits -> [0, 1)
    if isinstance(h, np.ndarray):
        return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
    return (h >> 11) * (1.0 / (1 << 53))


class CutOracle:
    """Answers directed cut queries ``w(S, V - S)`` and counts them."""

    name = "oracle"

    def __init__(self, graph: DirectedWeightedGraph) -> None:
        self.graph = graph
        self._count = 0
        self._lock = threading.Lock()

    @property
    def query_count(self) -> int:
        return self._count

    def _tick(self, k: int = 1) -> int:
        with self._lock:
            first = self._count
            self._count += k
        return first

    def query(self, s: Iterable[int]) -> float:
        s = tuple(s)
        value = cut_weight(self.graph, s)
        idx = self._tick()
        return self._perturb_one(value, s, idx)

    def query_many(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=bool)
        values = cut_weights(self.graph, masks)
        first = self._tick(masks.shape[0])
        return self._perturb_many(values, masks, first)

    def _perturb_one(self, value: float, s: tuple[int, ...], idx: int) -> float:
        return value

    def _perturb_many(self, values: np.ndarray, masks: np.ndarray, first: int) -> np.ndarray:
        return values

    def describe(self) -> str:
        return self.name


class ExactOracle(CutOracle):
    name = "exact"


def exact_oracle(g: DirectedWeightedGraph) -> ExactOracle:
    return ExactOracle(g)


@dataclass(frozen=True)
class NoiseSpec:
    eps_prime: float
    mode: str = "hashed"
    signs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 <= self.eps_prime < 1.0:
            raise ValueError(f"eps' must lie in [0, 1), got {self.eps_prime}")
        if self.mode not in ("fresh", "hashed", "signs"):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if self.mode == "signs":
            if not self.signs or any(s not in (-1, 1) for s in self.signs):
                raise ValueError("signs mode needs a nonempty +1/-1 sequence")


class NoisyOracle(CutOracle):
    """Multiplicative noise: every answer lies in ``[(1-eps') w, (1+eps') w]``.

    ``fresh`` draws a new uniform factor per call and is not reproducible when
    queries are issued concurrently. ``hashed`` derives the factor from the
    seed and the canonical set, so repeated queries agree. ``signs`` applies
    ``1 + eps' * sigma_i`` to the i-th query, cycling through the sequence.
    """

    def __init__(self, graph: DirectedWeightedGraph, spec: NoiseSpec, seed: int = 0) -> None:
        super().__init__(graph)
        self.spec = spec
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)
        self._rng_lock = threading.Lock()
        self.name = f"noise:{spec.eps_prime}:{spec.mode}"

    def _factors(self, n: int, masks: np.ndarray | None, first: int, members=None) -> np.ndarray:
        e = self.spec.eps_prime
        if self.spec.mode == "fresh":
            with self._rng_lock:
                return self._rng.uniform(1.0 - e, 1.0 + e, size=n)
        if self.spec.mode == "hashed":
            if members is not None:
                u = np.array([_unit_interval(set_hash(self.seed, members))])
            else:
                u = _unit_interval(set_hash_rows(self.seed, masks))
            return 1.0 - e + 2.0 * e * u
        sig = np.array(self.spec.signs, dtype=np.float64)
        idx = (first + np.arange(n)) % sig.size
        return 1.0 + e * sig[idx]

    def _perturb_one(self, value, s, idx):
        if self.spec.eps_prime == 0.0:
            return value
        return float(value * self._factors(1, None, idx, members=s)[0])

    def _perturb_many(self, values, masks, first):
        if self.spec.eps_prime == 0.0:
            return values
        return values * self._factors(values.size, masks, first)


def noisy_oracle(g: DirectedWeightedGraph, spec: NoiseSpec, seed: int = 0) -> NoisyOracle:
    return NoisyOracle(g, spec, seed)


class SparsifierOracle(CutOracle):
    """Answers from an importance-sampled subgraph: each edge kept with prob. ``p`` at weight ``w/p``."""

    def __init__(self, graph: DirectedWeightedGraph, p: float, seed: int = 0) -> None:
        if not 0.0 < p <= 1.0:
            raise ValueError(f"keep probability must lie in (0, 1], got {p}")
        rng = np.random.default_rng(seed)
        keep = rng.random(graph.m) < p
        kept = tuple((u, v, w / p) for (u, v, w), k in zip(graph.edges, keep) if k)
        super().__init__(DirectedWeightedGraph(graph.n, kept))
        self.original = graph
        self.p = p
        self.kept_edges = int(keep.sum())
        self.name = f"sparsifier:{p}"


def sparsifier_oracle(g: DirectedWeightedGraph, p: float, seed: int = 0) -> SparsifierOracle:
    return SparsifierOracle(g, p, seed)


def parse_oracle(spec: str, g: DirectedWeightedGraph, seed: int = 0) -> CutOracle:
    """Build an oracle from ``exact | noise:<eps'>[:fresh|hashed|signs=<+-..>] | sparsifier:<p>``."""
    parts = spec.strip().split(":")
    kind = parts[0]
    if kind == "exact" and len(parts) == 1:
        return ExactOracle(g)
    if kind == "noise" and len(parts) in (2, 3):
        eps = float(parts[1])
        mode, signs = "hashed", ()
        if len(parts) == 3:
            tail = parts[2]
            if tail.startswith("signs="):
                mode = "signs"
                signs = tuple(+1 if ch == "+" else -1 if ch == "-" else 0 for ch in tail[len("signs="):])
            else:
                mode = tail
        return NoisyOracle(g, NoiseSpec(eps, mode, signs), seed)
    if kind == "sparsifier" and len(parts) == 2:
        return SparsifierOracle(g, float(parts[1]), seed)
    raise ValueError(f"bad oracle spec {spec!r}")


def validate_oracle_spec(spec: str) -> None:
    """Parse-check an oracle string without a graph (used by the CLI before building instances)."""
    dummy = DirectedWeightedGraph(2, ((0, 1, 1.0), (1, 0, 1.0)))
    parse_oracle(spec, dummy, 0)


def masks_from_sets(sets: Sequence[Iterable[int]], n: int) -> np.ndarray:
    return np.stack([membership_mask(s, n) for s in sets])
