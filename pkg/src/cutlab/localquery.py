"""Local query model and the sampling-based global min-cut estimator.

The estimator fetches all degrees, then runs a coarse halving search over
guesses ``t = n/2, n/4, ...`` at constant accuracy ``beta0`` and finishes
with a single call at the target accuracy ``eps`` on a smaller guess.
``verify_guess`` keeps every ordered neighbour slot independently, so an
edge survives with probability ``1 - (1 - q)**2``, and computes the exact
minimum cut of the kept edges.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .graph import UndirectedGraph
from .mincut import min_cut_edges


class InconsistentOracleError(RuntimeError):
    pass


class LocalGraphOracle:
    """Degree / i-th neighbour / adjacency access to a hidden simple graph, with per-type counters."""

    def __init__(self, g: UndirectedGraph, order=None) -> None:
        """``order`` overrides the ascending neighbour order (it must list the same neighbours)."""
        self.n = g.n
        adj = g.adjacency()
        if order is not None:
            if [sorted(a) for a in order] != adj:
                raise ValueError("custom neighbour order does not match the graph")
            adj = [list(a) for a in order]
        self._adj = adj
        self._adj_sets = [set(a) for a in adj]
        deg = np.array([len(a) for a in adj], dtype=np.int64)
        self._offsets = np.concatenate([[0], np.cumsum(deg)])
        self._flat = np.array([v for a in adj for v in a], dtype=np.int64)
        self.counts = {"degree": 0, "neighbor": 0, "adjacency": 0}
        self._lock = threading.Lock()

    def _count(self, kind: str, k: int = 1) -> None:
        with self._lock:
            self.counts[kind] += k

    def degree(self, v: int) -> int:
        self._count("degree")
        return len(self._adj[v])

    def neighbor(self, v: int, i: int) -> int | None:
        """1-based ``i``-th neighbour in ascending order, ``None`` past the degree."""
        self._count("neighbor")
        a = self._adj[v]
        return a[i - 1] if 1 <= i <= len(a) else None

    def neighbor_many(self, vs: np.ndarray, idx: np.ndarray) -> np.ndarray:
        """Vectorised ``neighbor`` for slots already known to be in range (1-based ``idx``)."""
        vs = np.asarray(vs, dtype=np.int64)
        idx = np.asarray(idx, dtype=np.int64)
        if np.any(idx < 1) or np.any(idx > self._offsets[vs + 1] - self._offsets[vs]):
            raise IndexError("neighbour slot out of range")
        self._count("neighbor", int(vs.size))
        return self._flat[self._offsets[vs] + idx - 1]

    def adjacent(self, u: int, v: int) -> bool:
        self._count("adjacency")
        return v in self._adj_sets[u]


def oracle_from_graph(g: UndirectedGraph) -> LocalGraphOracle:
    return LocalGraphOracle(g)


def query_cost_report(o: LocalGraphOracle) -> dict[str, int]:
    return dict(o.counts)


@dataclass(frozen=True)
class EstimatorConfig:
    eps: float = 0.2
    beta0: float = 0.25
    C_kappa: float = 8.0
    C_sample: float = 1.0
    C_final: float = 2.0
    final_rule: str = "clog"  # "clog": t/(C_final ln n); "kappa": t/kappa
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not 0 < self.beta0 < 1:
            raise ValueError(f"beta0 must lie in (0, 1), got {self.beta0}")
        if self.C_kappa < 1:
            raise ValueError("C_kappa must be >= 1")
        if self.C_sample <= 0 or self.C_final <= 0:
            raise ValueError("C_sample and C_final must be positive")
        if self.final_rule not in ("clog", "kappa"):
            raise ValueError(f"final_rule must be 'clog' or 'kappa', got {self.final_rule!r}")

    def kappa(self, n: int) -> float:
        return self.C_kappa * math.log(n) / self.eps ** 2


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    k_hat: float
    t: float
    eps: float
    p_hat: float
    p_eff: float
    sampled_edges: int
    neighbor_queries: int
    phase: str = "coarse"


def sample_rate(n: int, t: float, eps: float, c_sample: float) -> float:
    return min(1.0, c_sample * math.log(n) / (eps ** 2 * t))


def verify_guess(o: LocalGraphOracle, degrees, t: float, eps: float, cfg: EstimatorConfig,
                 rng: np.random.Generator, phase: str = "coarse") -> VerifyResult:
    if t < 1:
        raise ValueError(f"guess t must be >= 1, got {t}")
    degrees = np.asarray(degrees, dtype=np.int64)
    n = degrees.size
    return _sample_and_cut(o, degrees, t, eps, sample_rate(n, t, eps, cfg.C_sample), rng, phase)


def _sample_and_cut(o, degrees, t, eps, p_hat, rng, phase) -> VerifyResult:
    n = degrees.size
    q = 1.0 - math.sqrt(1.0 - p_hat)
    p_eff = 1.0 - (1.0 - q) ** 2
    owners = np.repeat(np.arange(n), degrees)
    slots = np.arange(owners.size) - np.repeat(np.concatenate([[0], np.cumsum(degrees)[:-1]]), degrees) + 1
    keep = np.ones(owners.size, dtype=bool) if q >= 1.0 else rng.random(owners.size) < q
    vs, idx = owners[keep], slots[keep]
    nbrs = o.neighbor_many(vs, idx)
    lo, hi = np.minimum(vs, nbrs), np.maximum(vs, nbrs)
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0) if vs.size else np.empty((0, 2), dtype=np.int64)
    edges = [(int(u), int(v), 1.0) for u, v in pairs]
    c_hat = min_cut_edges(n, edges).value if n >= 2 else 0.0
    k_hat = c_hat / p_eff
    return VerifyResult(k_hat >= t / 2, k_hat, t, eps, p_hat, p_eff, len(edges), int(vs.size), phase)


@dataclass
class EstimateResult:
    k_hat: float
    calls: list[VerifyResult] = field(default_factory=list)
    queries: dict[str, int] = field(default_factory=dict)

    def calls_in(self, phase: str) -> list[VerifyResult]:
        return [c for c in self.calls if c.phase == phase]


def estimate_min_cut(o: LocalGraphOracle, cfg: EstimatorConfig) -> EstimateResult:
    rng = np.random.default_rng(cfg.seed)
    n = o.n
    degrees = np.array([o.degree(v) for v in range(n)], dtype=np.int64)
    res = EstimateResult(0.0)
    t = n / 2
    accepted = None
    while t >= 1:
        r = verify_guess(o, degrees, t, cfg.beta0, cfg, rng)
        res.calls.append(r)
        if r.accepted:
            accepted = r
            break
        t /= 2
    if accepted is None:
        # Every guess rejected: only a disconnected graph is consistent with that.
        r = _sample_and_cut(o, degrees, 1.0, cfg.eps, 1.0, rng, "exact")
        res.calls.append(r)
        if r.k_hat == 0.0:
            res.queries = query_cost_report(o)
            return res
        raise InconsistentOracleError("all guesses down to t=1 rejected on a connected graph")
    denom = cfg.kappa(n) if cfg.final_rule == "kappa" else cfg.C_final * math.log(n)
    t_final = max(1.0, t / denom)
    while True:
        r = verify_guess(o, degrees, t_final, cfg.eps, cfg, rng, phase="final")
        res.calls.append(r)
        if r.accepted or t_final <= 1.0:
            break
        t_final = max(1.0, t_final / 2)
    res.k_hat = r.k_hat
    res.queries = query_cost_report(o)
    return res
