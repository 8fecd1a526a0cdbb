"""Acceptance criteria 1-9 as library functions.

Each ``criterion_N(quick=False)`` returns a ``CriterionResult``; ``quick``
shrinks trial counts for ``selftest --quick``. Criterion 8's query-scaling
clauses are only evaluated in the full run.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import forall, foreach
from .families import planted_cycle_chords
from .graph import edge_reverse_ratio, is_beta_balanced_exhaustive
from .hadamard import check_rows_explicit, check_rows_factored
from .localquery import estimate_min_cut, oracle_from_graph, query_cost_report
from .oracles import NoiseSpec, NoisyOracle, exact_oracle
from .presets import ConstantPreset, load_preset
from .twosum import (
    SplitGxyOracle, build_gxy, check_connectivity, check_mincut_lemma, communication_account,
    concat_strings, exact_mincut_algo, exhaustive_n9, random_pair, reduce_two_sum, sample_two_sum,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    budget: float = math.inf

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number}: {status} [{self.seconds:.1f}s / {self.budget:.0f}s] {self.title}"


def _timed(number: int, title: str, budget: float):
    def wrap(fn):
        def run(quick: bool = False, preset: ConstantPreset | None = None) -> CriterionResult:
            t0 = time.perf_counter()
            passed, detail = fn(quick, preset or load_preset("desk"))
            secs = time.perf_counter() - t0
            in_time = secs < budget
            detail["within_time_budget"] = in_time
            return CriterionResult(number, title, bool(passed and in_time), detail, secs, budget)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def foreach_grid(preset: ConstantPreset):
    for k, beta in product((1, 2, 3), (1, 4)):
        kb = math.isqrt(beta) << k
        yield foreach.ForEachParams(k, beta, 2 * kb, c1=preset.c1)


def forall_grid(preset: ConstantPreset):
    for beta, d in ((1, 16), (2, 8), (4, 4)):
        yield forall.ForAllParams(d, beta, 2 * beta * d, c=preset.c, c1=preset.c1_forall, c2=preset.c2,
                                  enum_cap=preset.enum_cap)


@_timed(1, "encoding matrix orthogonality (explicit k<=4, factored k=5,6)", 30)
def criterion_1(quick, preset):
    explicit = {k: check_rows_explicit(k) for k in ((1, 2, 3) if quick else (1, 2, 3, 4))}
    factored = {k: check_rows_factored(k) for k in ((5,) if quick else (5, 6))}
    return all(explicit.values()) and all(factored.values()), {"explicit": explicit, "factored": factored}


@_timed(2, "for-each exact roundtrip, failure rate < 5%", 60)
def criterion_2(quick, preset):
    trials = 5 if quick else 50
    rows = []
    ok = True
    for p in foreach_grid(preset):
        rng = np.random.default_rng(1000 + 10 * p.k + p.beta)
        bits = correct = failures = blocks = failed_blocks = 0
        for _ in range(trials):
            s = rng.choice([-1, 1], size=p.capacity)
            rec = foreach.roundtrip(p, s, exact_oracle)
            bits += rec["bit_count"] - rec["failures"]
            correct += rec["correct"]
            failures += rec["failures"]
            blocks += p.beta * (p.ell - 1)
            failed_blocks += rec["failed_blocks"]
        rate = failed_blocks / blocks
        rows.append({"k": p.k, "beta": p.beta, "decoded": bits, "correct": correct, "failure_rate": rate})
        ok &= correct == bits and rate < 0.05
    return ok, {"cells": rows}


def _signs_oracle(g, eps_prime: float, pattern):
    return NoisyOracle(g, NoiseSpec(eps_prime, "signs", tuple(pattern)), 0)


def _adversarial_sweep(p: foreach.ForEachParams, enc, s, eps_prime: float) -> tuple[int, int]:
    patterns = list(product((1, -1), repeat=4))
    wrong = total = 0
    for q in range(p.capacity):
        if not enc.block_success[p.address(q)[:3]]:
            continue
        for pat in patterns:
            bit = foreach.decode_bit(_signs_oracle(enc.graph, eps_prime, pat), q, p, enc.block_success)
            total += 1
            wrong += int(bit != s[q])
    return wrong, total


@_timed(3, "for-each guaranteed recovery under adversarial signs, tight at 2x budget", 10)
def criterion_3(quick, preset):
    rows = []
    ok = True
    grid = list(foreach_grid(preset))
    for p in grid[:2] if quick else grid:
        rng = np.random.default_rng(3000 + 10 * p.k + p.beta)
        s = rng.choice([-1, 1], size=p.capacity)
        enc = foreach.build_graph(s, p)
        budget = min(foreach.guaranteed_noise_budget(p, b) for b in range(p.ell - 1))
        inside = 0.95 * budget
        wrong_in, total = _adversarial_sweep(p, enc, s, inside)
        wrong_out, _ = _adversarial_sweep(p, enc, s, 2 * inside)
        rows.append({"k": p.k, "beta": p.beta, "eps_prime": inside, "checked": total,
                     "wrong_inside": wrong_in, "wrong_doubled": wrong_out})
        ok &= wrong_in == 0 and wrong_out > 0
    return ok, {"cells": rows}


@_timed(4, "balance: for-each ratio bound, for-all ratio 2 beta, exhaustive n=8", 30)
def criterion_4(quick, preset):
    rng = np.random.default_rng(4000)
    fe = []
    for p in foreach_grid(preset):
        enc = foreach.build_graph(rng.choice([-1, 1], size=p.capacity), p)
        fe.append(edge_reverse_ratio(enc.graph) <= p.balance_bound() * (1 + 1e-9))
    fa = []
    for p in forall_grid(preset):
        inst = forall.sample_gap_hamming(p, int(rng.integers(2**31)))
        fa.append(edge_reverse_ratio(forall.encode(inst.strings, p).graph) == 2 * p.beta)
    p8 = foreach.ForEachParams(1, 4, 8, c1=preset.c1)
    g8 = foreach.build_graph(rng.choice([-1, 1], size=p8.capacity), p8).graph
    q8 = forall.ForAllParams(4, 1, 8, c=preset.c)
    h8 = forall.encode(forall.sample_gap_hamming(q8, 4001).strings, q8).graph
    ex_fe = is_beta_balanced_exhaustive(g8, p8.balance_bound())
    ex_fa = is_beta_balanced_exhaustive(h8, 2 * q8.beta)
    detail = {"foreach_ratio_ok": fe, "forall_ratio_exact": fa, "exhaustive_foreach": ex_fe,
              "exhaustive_forall": ex_fa}
    return all(fe) and all(fa) and ex_fe and ex_fa, detail


@_timed(5, "for-all decode: exact >= 95%, hashed noise at c2*eps >= 2/3", 300)
def criterion_5(quick, preset):
    trials = 20 if quick else 100
    grid = list(forall_grid(preset))
    rows = []
    ok = True
    for p in grid[2:] if quick else grid:
        exact_ok = noisy_ok = 0
        for i in range(trials):
            seed = 5000 + 1000 * p.beta + i
            exact_ok += forall.roundtrip(p, seed, exact_oracle)["correct"]
            noisy_ok += forall.roundtrip(
                p, seed, lambda g, s=seed: NoisyOracle(g, NoiseSpec(p.noise, "hashed"), s + 7))["correct"]
        rows.append({"beta": p.beta, "d": p.d, "exact": exact_ok / trials, "noisy": noisy_ok / trials,
                     "eps_prime": p.noise})
        ok &= exact_ok >= 0.95 * trials and noisy_ok >= 2 / 3 * trials
    return ok, {"cells": rows, "c2": preset.c2}


@_timed(6, "MINCUT(G_xy) = 2 INT: exhaustive N=9, random N=16/25/36, connectivity N=25", 600)
def criterion_6(quick, preset):
    ex = exhaustive_n9()
    rng = np.random.default_rng(6000)
    per_n = 50 if quick else 500
    random_viol = {}
    for N in (16, 25, 36):
        cap = math.isqrt(N) // 3
        bad = 0
        for _ in range(per_n):
            rec = check_mincut_lemma(random_pair(N, int(rng.integers(0, cap + 1)), rng))
            bad += not rec["holds"]
        random_viol[N] = bad
    conn_trials = 5 if quick else 20
    conn = [check_connectivity(random_pair(25, 1, rng)) for _ in range(conn_trials)]
    ok = ex["violations"] == 0 and not any(random_viol.values()) and all(conn)
    return ok, {"exhaustive": ex, "random_violations": random_viol, "connectivity_ok": sum(conn),
                "connectivity_trials": conn_trials}


def reduction_instances(count: int, seed: int):
    """Feasible 2-SUM(16, 16, alpha) instances: t = eps^-2 with eps = 1/4 and r*alpha <= 5."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        alpha = 1 + i % 2
        r = int(rng.integers(1, 16 // (3 * alpha) + 1))
        lam = 16.0 * alpha
        yield sample_two_sum(16, 16, alpha, r, int(rng.integers(2**31))), lam


@_timed(7, "2-SUM reduction exact with exact min cut, error <= 1/eps with (1 +- eps) min cut", 120)
def criterion_7(quick, preset):
    eps = 0.25
    count = 20 if quick else 100
    rng = np.random.default_rng(7001)
    exact_err = []
    noisy_err = []
    for inst, lam in reduction_instances(count, 7000):
        exact_err.append(reduce_two_sum(inst, exact_mincut_algo, eps, lam, strict=False)["error"])
        for sigma in (-1.0, 1.0, float(rng.uniform(-1, 1))):
            algo = lambda g, s=sigma: exact_mincut_algo(g) * (1 + s * eps)
            noisy_err.append(reduce_two_sum(inst, algo, eps, lam, strict=False)["error"])
    worst = max(abs(e) for e in noisy_err)
    ok = all(e == 0 for e in exact_err) and worst <= 1 / eps
    return ok, {"instances": count, "exact_nonzero": sum(e != 0 for e in exact_err),
                "worst_wrapped_error": worst, "bound": 1 / eps}


def _mincut_cell(n: int, k: int, eps: float, runs: int, preset: ConstantPreset) -> dict:
    g = planted_cycle_chords(n, k, seed=8000 + n + k)
    errs, neigh = [], []
    for r in range(runs):
        o = oracle_from_graph(g)
        res = estimate_min_cut(o, preset.estimator(eps, seed=r))
        errs.append(abs(res.k_hat - k) / k)
        neigh.append(query_cost_report(o)["neighbor"])
    return {"n": n, "m": g.m, "k": k, "eps": eps, "within_eps": float(np.mean(np.array(errs) <= eps)),
            "median_neighbor": float(np.median(neigh))}


@_timed(8, "local min-cut estimator: accuracy and query scaling", 600)
def criterion_8(quick, preset):
    ns = (200,) if quick else (200, 500, 1000)
    ks = (2, 4, 8, 16)
    runs = 10 if quick else 50
    cells = {(n, k): _mincut_cell(n, k, 0.2, runs, preset) for n in ns for k in ks}
    accuracy_ok = all(c["within_eps"] >= 0.9 for c in cells.values())
    detail = {"cells": list(cells.values()), "accuracy_ok": accuracy_ok}
    if quick:
        detail["scaling"] = "skipped in quick mode"
        return accuracy_ok, detail
    k_ratios = [cells[(n, 2 * k)]["median_neighbor"] / cells[(n, k)]["median_neighbor"]
                for n in ns for k in ks[:-1]]
    half = {k: _mincut_cell(500, k, 0.1, runs, preset) for k in ks}
    eps_ratios = [half[k]["median_neighbor"] / cells[(500, k)]["median_neighbor"] for k in ks]
    k_ok = all(0.3 <= r <= 0.8 for r in k_ratios)
    eps_ok = all(2.5 <= r <= 6 for r in eps_ratios)
    detail.update({"k_doubling_ratios": k_ratios, "k_scaling_ok": k_ok,
                   "eps_halving_ratios": eps_ratios, "eps_scaling_ok": eps_ok,
                   "eps_half_cells": list(half.values())})
    return accuracy_ok and k_ok and eps_ok, detail


@_timed(9, "communication: bits = 2 (neighbor + adjacency), degree queries free", 60)
def criterion_9(quick, preset):
    inst, _ = next(reduction_instances(1, 9000))
    g = build_gxy(concat_strings(inst))
    o = SplitGxyOracle(g)
    before = o.bits_exchanged
    for v in range(g.graph.n):
        o.degree(v)
    degree_free = o.bits_exchanged == before
    estimate_min_cut(o, preset.estimator(0.25, seed=9))
    rng = np.random.default_rng(9001)
    for u, v in rng.integers(0, g.graph.n, size=(50, 2)):
        o.adjacent(int(u), int(v))
    counts = query_cost_report(o)
    ok = degree_free and o.bits_exchanged == communication_account(o) == 2 * (counts["neighbor"] + counts["adjacency"])
    return ok, {"counts": counts, "bits_exchanged": o.bits_exchanged, "degree_free": degree_free}


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9)


def run_all(quick: bool = False, preset: ConstantPreset | None = None, only=None):
    for fn in CRITERIA:
        if only and int(fn.__name__.split("_")[1]) not in only:
            continue
        yield fn(quick=quick, preset=preset)
