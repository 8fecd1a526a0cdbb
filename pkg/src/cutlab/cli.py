"""Command-line entry point: ``cutlab <command> ...``.

Single runs emit JSON lines; ``sweep`` and ``mincut sweep`` emit CSV. Exit
codes: 0 ok, 1 usage, 2 infeasible parameters, 3 selftest failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Callable, Iterable

import numpy as np

from . import acceptance, forall, foreach
from .families import FAMILIES, make_family
from .graph import GraphError, read_edge_list, write_edge_list
from .localquery import estimate_min_cut, oracle_from_graph, query_cost_report
from .mincut import global_min_cut
from .oracles import MASK64, parse_oracle, splitmix64, validate_oracle_spec
from .presets import PRESETS, load_preset
from .twosum import (
    InfeasibleInstance, SplitGxyOracle, check_mincut_lemma, exact_mincut_algo, exhaustive_n9, random_pair, reduce_two_sum, sample_two_sum,
)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_SELFTEST = 0, 1, 2, 3
SWEEP_CAP = 100_000


class UsageError(Exception):
    pass


class Infeasible(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def derive_seed(master: int, index: int) -> int:
    return splitmix64((master & MASK64) ^ splitmix64(index & MASK64))


# -- parameter helpers --------------------------------------------------------

def _k_from(args) -> int:
    if args.k is not None:
        return args.k
    if args.eps is None:
        raise UsageError("give --k or --eps")
    k = -math.log2(args.eps)
    if args.eps <= 0 or args.eps >= 1 or abs(k - round(k)) > 1e-12:
        near = max(1, round(-math.log2(args.eps))) if 0 < args.eps < 1 else 1
        raise Infeasible(f"eps must be a power 2^-k; nearest legal: eps={2.0 ** -near} (k={near})")
    return int(round(k))


def _d_from(args) -> int:
    if args.d is not None:
        return args.d
    if args.eps is None:
        raise UsageError("give --d or --eps")
    d = 1 / args.eps ** 2
    if abs(d - round(d)) > 1e-9 or round(d) % 2:
        near = max(2, 2 * round(d / 2))
        raise Infeasible(f"1/eps^2 must be an even integer; nearest legal: eps={1 / math.sqrt(near):.6g} (d={near})")
    return int(round(d))


def _oracle_factory(spec: str, seed: int) -> Callable:
    try:
        validate_oracle_spec(spec)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return lambda g: parse_oracle(spec, g, seed)


def _base(args, command: str, params: dict) -> dict:
    preset = args.preset_obj
    return {"command": command, "params": params, "preset": preset.name, "constants": preset.as_dict(),
            "seed": args.seed}


# -- commands -----------------------------------------------------------------

def cmd_foreach(args) -> Iterable[dict]:
    k = _k_from(args)
    c1 = args.c1 if args.c1 is not None else args.preset_obj.c1
    try:
        p = foreach.ForEachParams(k, args.beta, args.n, c1=c1)
    except foreach.InfeasibleParams as e:
        raise Infeasible(str(e)) from None
    params = {"k": k, "eps": p.eps, "beta": p.beta, "n": p.n, "c1": c1, "oracle": args.oracle}
    for trial in range(args.trials):
        seed = derive_seed(args.seed, trial)
        s = np.random.default_rng(seed).choice([-1, 1], size=p.capacity)
        rec = _base(args, f"foreach {args.action}", params) | {"trial": trial, "trial_seed": seed}
        if args.action == "encode":
            enc = foreach.build_graph(s, p)
            rec |= {"bit_count": p.capacity, "failed_blocks": enc.failures, "edges": enc.graph.m}
            if args.graph_out:
                with open(args.graph_out, "w") as fh:
                    write_edge_list(enc.graph, fh)
        elif args.action == "decode":
            enc = foreach.build_graph(s, p)
            oracle = _oracle_factory(args.oracle, derive_seed(seed, 1))(enc.graph)
            bits = range(p.capacity) if args.bits is None else [int(b) for b in args.bits.split(",")]
            decoded = []
            for q in bits:
                try:
                    decoded.append(foreach.decode_bit(oracle, q, p, enc.block_success))
                except foreach.EncodingFailed:
                    decoded.append(None)
                except IndexError as e:
                    raise UsageError(str(e)) from None
            rec |= {"bits": list(bits), "decoded": decoded, "truth": [int(s[q]) for q in bits],
                    "queries": oracle.query_count}
        else:
            rec |= foreach.roundtrip(p, s, _oracle_factory(args.oracle, derive_seed(seed, 1)))
        yield rec


def cmd_forall(args) -> Iterable[dict]:
    d = _d_from(args)
    pr = args.preset_obj
    c = args.c if args.c is not None else pr.c
    try:
        p = forall.ForAllParams(d, args.beta, args.n, c=c, c1=pr.c1_forall, c2=pr.c2, enum_cap=pr.enum_cap)
    except forall.InfeasibleParams as e:
        raise Infeasible(str(e)) from None
    oracle = args.oracle or f"noise:{p.noise!r}:hashed"
    params = {"d": d, "beta": p.beta, "n": p.n, "c": c, "oracle": oracle}
    for trial in range(args.trials):
        seed = derive_seed(args.seed, trial)
        try:
            rec = forall.roundtrip(p, seed, _oracle_factory(oracle, derive_seed(seed, 1)))
        except forall.InfeasibleParams as e:
            raise Infeasible(str(e)) from None
        yield _base(args, "forall roundtrip", params) | {"trial": trial, "trial_seed": seed} | rec


def _estimate_record(g, eps: float, seed: int, preset, k_true: float | int | None = None) -> dict:
    o = oracle_from_graph(g)
    res = estimate_min_cut(o, preset.estimator(eps, seed))
    q = query_cost_report(o)
    rec = {"n": g.n, "m": g.m, "k": k_true, "eps": eps, "k_hat": res.k_hat, "degree_q": q["degree"],
           "neighbor_q": q["neighbor"], "adjacency_q": q["adjacency"],
           "verify_calls": len(res.calls), "final_calls": len(res.calls_in("final"))}
    if k_true is not None:
        rec["correct"] = abs(res.k_hat - k_true) <= eps * k_true
    return rec


def cmd_mincut(args) -> Iterable[dict]:
    pr = args.preset_obj
    if args.final_rule:
        from dataclasses import replace
        pr = replace(pr, final_rule=args.final_rule)
        args.preset_obj = pr
    if args.action == "estimate":
        if args.graph is None:
            ns, ks = _nums(args.n, int), _nums(args.k, int)
            if len(ns) != 1 or len(ks) != 1:
                raise UsageError("estimate needs --graph, or a single --n and --k for --family")
            try:
                g = make_family(args.family, ns[0], ks[0], derive_seed(args.seed, ns[0] * 1000 + ks[0]))
            except ValueError as e:
                raise Infeasible(str(e)) from None
        else:
            try:
                with open(args.graph) as fh:
                    g = read_edge_list(fh)
            except (OSError, GraphError, ValueError) as e:
                raise UsageError(f"cannot read graph: {e}") from None
        if hasattr(g, "weight"):
            raise UsageError("mincut estimate needs an undirected graph file")
        for trial in range(args.trials):
            seed = derive_seed(args.seed, trial)
            k_true = global_min_cut(g).value if args.check else None
            source = {"graph": args.graph} if args.graph else {"family": args.family, "n": args.n, "k": args.k}
            yield _base(args, "mincut estimate", source | {"eps": args.eps}) | {
                "trial": trial, "trial_seed": seed} | _estimate_record(g, args.eps, seed, pr, k_true)
        return
    # sweep
    cells = list(product(_nums(args.n, int), _nums(args.k, int), _nums(args.eps_list, float) or [args.eps],
                         range(args.runs)))
    if not cells:
        raise UsageError("empty grid")
    if len(cells) > SWEEP_CAP:
        raise UsageError(f"grid has {len(cells)} cells; cap is {SWEEP_CAP}")
    for idx, (n, k, eps, run) in enumerate(cells):
        seed = derive_seed(args.seed, idx)
        try:
            g = make_family(args.family, n, k, derive_seed(args.seed, n * 1000 + k))
        except ValueError as e:
            raise Infeasible(str(e)) from None
        yield {"family": args.family, "run": run, "seed": seed} | _estimate_record(g, eps, seed, pr, k)


def _nums(text: str | None, kind) -> list:
    if text is None:
        return []
    return [kind(v) for v in str(text).split(",") if v.strip()]


def cmd_twosum(args) -> Iterable[dict]:
    pr = args.preset_obj
    if args.action == "lemma-check":
        if args.exhaustive:
            if args.N != 9:
                raise UsageError("--exhaustive is defined for N=9")
            yield _base(args, "twosum lemma-check", {"N": 9, "exhaustive": True}) | exhaustive_n9(args.jobs)
            return
        root = math.isqrt(args.N)
        if root * root != args.N:
            raise Infeasible(f"N must be a perfect square; nearest legal: N={round(math.sqrt(args.N)) ** 2}")
        rng = np.random.default_rng(args.seed)
        for trial in range(args.trials):
            p = random_pair(args.N, int(rng.integers(0, root // 3 + 1)), rng)
            try:
                rec = check_mincut_lemma(p)
            except InfeasibleInstance as e:
                raise Infeasible(str(e)) from None
            yield _base(args, "twosum lemma-check", {"N": args.N}) | {"trial": trial} | rec
        return
    # reduce
    algo_name = args.algo
    for trial in range(args.trials):
        seed = derive_seed(args.seed, trial)
        try:
            inst = sample_two_sum(args.t, args.L, args.alpha, args.r, seed)
        except InfeasibleInstance as e:
            raise Infeasible(str(e)) from None
        runs = []
        for rep in range(pr.repetitions if algo_name != "exact" else 1):
            counters = {}

            def algo(g, rep=rep):
                if algo_name == "exact":
                    return exact_mincut_algo(g)
                o = SplitGxyOracle(g)
                preset = load_preset(algo_name.split(":", 1)[1]) if ":" in algo_name else pr
                res = estimate_min_cut(o, preset.estimator(args.eps, derive_seed(seed, rep + 1)))
                counters.update(query_cost_report(o), bits=o.bits_exchanged)
                return res.k_hat

            try:
                out = reduce_two_sum(inst, algo, args.eps, args.lam, strict=args.strict)
            except InfeasibleInstance as e:
                raise Infeasible(str(e)) from None
            runs.append(out | counters)
        estimates = [r["estimate"] for r in runs]
        yield _base(args, "twosum reduce", {"t": args.t, "L": args.L, "alpha": args.alpha, "r": args.r,
                                            "eps": args.eps, "lam": args.lam, "algo": algo_name,
                                            "strict": args.strict}) | {
            "trial": trial, "trial_seed": seed, "truth": inst.disj_sum(), "estimate": float(np.median(estimates)),
            "runs": runs}


def cmd_selftest(args) -> Iterable[dict]:
    only = _nums(args.only, int) or None
    for res in acceptance.run_all(quick=args.quick, preset=args.preset_obj, only=only):
        print(res.line(), file=sys.stderr)
        args.selftest_failed |= not res.passed
        yield {"command": "selftest", "criterion": res.number, "title": res.title, "passed": res.passed,
               "seconds": round(res.seconds, 3), "detail": _jsonable(res.detail), "preset": args.preset_obj.name}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# -- generic sweep ------------------------------------------------------------

def parse_grid(items: list[str]) -> list[tuple[str, list[str]]]:
    grid = []
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"grid entry {item!r} must look like flag=v1,v2")
        key, values = item.split("=", 1)
        vals = [v for v in values.split(",") if v]
        if not vals:
            raise UsageError(f"grid entry {key!r} has no values")
        grid.append((key.lstrip("-"), vals))
    if not grid:
        raise UsageError("empty grid")
    return grid


def _flatten(rec: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out |= _flatten(v, key + ".")
        elif isinstance(v, list):
            out[key] = json.dumps(_jsonable(v))
        else:
            out[key] = v
    return out


def _run_cell(argv: list[str]) -> list[dict]:
    parser = build_parser()
    args = parser.parse_args(argv)
    _prepare(args)
    return [_jsonable(r) for r in args.func(args)]


def cmd_sweep(args) -> Iterable[dict]:
    grid = parse_grid(args.grid)
    base = [a for a in args.rest if a != "--"]
    if not base:
        raise UsageError("sweep needs a command after '--'")
    total = math.prod(len(v) for _, v in grid)
    if total > SWEEP_CAP:
        raise UsageError(f"grid has {total} cells; cap is {SWEEP_CAP}")
    keys = [k for k, _ in grid]
    argvs = []
    for idx, combo in enumerate(product(*(v for _, v in grid))):
        argv = list(base)
        for k, v in zip(keys, combo):
            argv += [f"--{k}", v]
        argv += ["--seed", str(derive_seed(args.seed, idx)), "--preset", args.preset]
        if args.constants:
            argv += ["--constants", args.constants]
        argvs.append(argv)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_run_cell, argvs))
    else:
        results = [_run_cell(a) for a in argvs]
    for idx, (combo, recs) in enumerate(zip(product(*(v for _, v in grid)), results)):
        for rec in recs:
            yield {"cell": idx} | dict(zip(keys, combo)) | _flatten(rec)


# -- parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    p.add_argument("--constants", help="flat key=value file overriding preset constants")
    p.add_argument("--out", help="write records here instead of stdout")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add wall_time to records (breaks byte-identical replay)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="cutlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fe = sub.add_parser("foreach", parents=[common], help="for-each gadget")
    fe.add_argument("action", choices=["encode", "decode", "roundtrip"])
    fe.add_argument("--k", type=int)
    fe.add_argument("--eps", type=float)
    fe.add_argument("--beta", type=int, required=True)
    fe.add_argument("--n", type=int, required=True)
    fe.add_argument("--c1", type=float)
    fe.add_argument("--oracle", default="exact")
    fe.add_argument("--trials", type=int, default=1)
    fe.add_argument("--bits", help="comma-separated bit indices for decode")
    fe.add_argument("--graph-out", help="edge-list file for encode")
    fe.set_defaults(func=cmd_foreach, csv=False)

    fa = sub.add_parser("forall", parents=[common], help="for-all gadget")
    fa.add_argument("action", choices=["roundtrip"])
    fa.add_argument("--d", type=int)
    fa.add_argument("--eps", type=float)
    fa.add_argument("--beta", type=int, required=True)
    fa.add_argument("--n", type=int, required=True)
    fa.add_argument("--c", type=float)
    fa.add_argument("--oracle", help="default: hashed noise at c2*eps")
    fa.add_argument("--trials", type=int, default=1)
    fa.set_defaults(func=cmd_forall, csv=False)

    mc = sub.add_parser("mincut", parents=[common], help="local-query min-cut estimator")
    mc.add_argument("action", choices=["estimate", "sweep"])
    mc.add_argument("--graph")
    mc.add_argument("--eps", type=float, default=0.2)
    mc.add_argument("--eps-list", dest="eps_list", help="sweep: comma-separated eps values")
    mc.add_argument("--family", choices=sorted(FAMILIES), default="cycle-chords")
    mc.add_argument("--n", help="sweep: comma-separated vertex counts")
    mc.add_argument("--k", help="sweep: comma-separated planted cut sizes")
    mc.add_argument("--runs", type=int, default=1)
    mc.add_argument("--trials", type=int, default=1)
    mc.add_argument("--check", action="store_true", help="estimate: also compute the exact min cut")
    mc.add_argument("--final-rule", choices=["clog", "kappa"])
    mc.set_defaults(func=cmd_mincut, csv=None)

    ts = sub.add_parser("twosum", parents=[common], help="2-SUM and G_xy")
    ts.add_argument("action", choices=["lemma-check", "reduce"])
    ts.add_argument("--N", type=int, default=9)
    ts.add_argument("--exhaustive", action="store_true")
    ts.add_argument("--trials", type=int, default=1)
    ts.add_argument("--t", type=int, default=16)
    ts.add_argument("--L", type=int, default=16)
    ts.add_argument("--alpha", type=int, default=1)
    ts.add_argument("--r", type=int, default=1)
    ts.add_argument("--eps", type=float, default=0.25)
    ts.add_argument("--lam", type=float, default=16.0)
    ts.add_argument("--algo", default="exact", help="exact | local[:paper|desk]")
    ts.add_argument("--strict", action="store_true", help="enforce sqrt(M) >= 3 max(lam, eps^-2)")
    ts.set_defaults(func=cmd_twosum, csv=False)

    sw = sub.add_parser("sweep", parents=[common], help="cross-product over a command's flags (CSV)")
    sw.add_argument("--grid", action="append", help="flag=v1,v2,... (repeatable)")
    sw.add_argument("rest", nargs=argparse.REMAINDER, help="-- <command> <fixed flags>")
    sw.set_defaults(func=cmd_sweep, csv=True)

    st = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    st.add_argument("--quick", action="store_true")
    st.add_argument("--only", help="comma-separated criterion numbers")
    st.set_defaults(func=cmd_selftest, csv=False)
    return parser


def _prepare(args) -> None:
    try:
        args.preset_obj = load_preset(args.preset, args.constants)
    except (ValueError, OSError) as e:
        raise UsageError(str(e)) from None
    args.selftest_failed = False
    if args.csv is None:
        args.csv = args.action == "sweep"


def _emit(records: Iterable[dict], fh, as_csv: bool, timing: bool) -> None:
    t0 = time.perf_counter()
    if not as_csv:
        for rec in records:
            if timing:
                rec = rec | {"wall_time": time.perf_counter() - t0}
            fh.write(json.dumps(_jsonable(rec)) + "\n")
        return
    rows = [_flatten(_jsonable(r)) for r in records]
    cols: list[str] = []
    for r in rows:
        cols += [c for c in r if c not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    fh.write(buf.getvalue())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _prepare(args)
        records = args.func(args)
        if args.out:
            with open(args.out, "w") as fh:
                _emit(records, fh, args.csv, args.timing)
        else:
            _emit(records, sys.stdout, args.csv, args.timing)
    except UsageError as e:
        print(f"cutlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Infeasible as e:
        print(f"cutlab: infeasible parameters: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.selftest_failed:
        return EXIT_SELFTEST
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
