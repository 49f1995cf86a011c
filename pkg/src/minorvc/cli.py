"""Command-line entry point: ``python -m minorvc <command> ...``.

Exit codes: 0 success, 1 a verification failed, 2 bad usage or bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
import zipfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import directed as D
from . import lower_bound as LB
from . import set_systems as SS
from . import undirected as U
from .graph_core import INF, GraphFormatError, SizeCapError, all_pairs, format_graph, parse_spec, \
    read_graph, write_graph
from .rdivision import build_r_division, division_quality

log = logging.getLogger("minorvc")

BENCH_COLUMNS = ["n", "r", "build_ms", "query_ns", "space_bytes", "pattern_count",
                 "boundary_sum", "kind", "seed", "pattern_cap_ok"]


class VerificationFailed(Exception):
    pass


def _add_input(p, required=True):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--graph", help="graph file in the text format")
    src.add_argument("--gen", help="generator spec, e.g. grid:8,8 or orient+random_planar:300")
    p.add_argument("--seed", type=int, default=0)


def _add_params(p):
    p.add_argument("--r", type=int, default=None, help="cluster size (default: preset rule)")
    p.add_argument("--h", type=int, default=5, help="assumed excluded minor K_h (default 5)")


def _load_input(args):
    if args.graph:
        return read_graph(args.graph)
    return parse_spec(args.gen, args.seed)


def _emit(obj, path=None):
    text = json.dumps(obj, indent=2, default=_jsonable)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _check_r(args):
    if args.r is not None and args.r < 1:
        raise ValueError("--r must be >= 1")


# ---- stats

def cmd_stats(args):
    _check_r(args)
    g = _load_input(args)
    t0 = time.perf_counter()
    if g.directed:
        r = args.r if args.r is not None else U.r_preset(g.n, "directed_ecc", args.h)
        div = build_r_division(g, r)
        res = D.directed_eccentricities(g, division=div)
        ecc, diam, wiener = res.ecc, res.diameter, None
    else:
        r = args.r if args.r is not None else U.r_preset(g.n, "undirected", args.h)
        div = build_r_division(g, r)
        res = U.eccentricities(g, division=div)
        ecc, diam = res.ecc, res.diameter
        wiener = U.wiener_index(g, division=div)
    elapsed = (time.perf_counter() - t0) * 1000
    out = {"n": g.n, "m": g.m, "directed": g.directed, "r": r, "diameter": diam,
           "wiener": wiener, "ecc": ecc, "time_ms": round(elapsed, 3),
           "division": division_quality(div)}
    ok = True
    if args.brute:
        ap = all_pairs(g, cap=args.brute_cap)
        fin = ap < INF
        b_ecc = np.where(fin, ap, -1).max(axis=1)
        b_w = None if g.directed else int(ap.sum()) // 2
        match = bool(np.array_equal(b_ecc, ecc)) and (g.directed or b_w == wiener)
        out["brute"] = {"match": match, "diameter": int(b_ecc.max(initial=0)), "wiener": b_w}
        ok = match
    _emit(out, args.out)
    if not ok:
        raise VerificationFailed("stats disagree with brute force")


# ---- oracles

def _build(g, r, h):
    if g.directed:
        return D.DirectedOracle.build(g, r, h)
    return U.UndirectedOracle.build(g, r, h)


def _pattern_stats(o):
    if isinstance(o, D.DirectedOracle):
        counts, caps = o.restriction_counts(), o.restriction_caps()
    else:
        counts, caps = o.pattern_counts(), o.pattern_caps()
    return int(sum(counts)), all(c <= k for c, k in zip(counts, caps))


def cmd_oracle_build(args):
    _check_r(args)
    g = _load_input(args)
    t0 = time.perf_counter()
    o = _build(g, args.r, args.h)
    build_ms = (time.perf_counter() - t0) * 1000
    o.save(args.out)
    count, cap_ok = _pattern_stats(o)
    _emit({"n": g.n, "directed": g.directed, "r": o.r, "h": o.h, "path": args.out,
           "build_ms": round(build_ms, 3), "space_bytes": o.nbytes(),
           "pattern_count": count, "pattern_cap_ok": cap_ok}, args.report)


def _read_pairs(path):
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v'")
            pairs.append((int(parts[0]), int(parts[1])))
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def cmd_oracle_query(args):
    o = U.load_oracle(args.oracle)
    if args.pairs:
        pairs = _read_pairs(args.pairs)
    else:
        rng = np.random.default_rng(args.seed)
        pairs = rng.integers(0, o.n, size=(args.random, 2))
    if len(pairs) and (pairs.min() < 0 or pairs.max() >= o.n):
        raise ValueError(f"query vertex out of range for n={o.n}")
    t0 = time.perf_counter_ns()
    ans = o.query_many(pairs[:, 0], pairs[:, 1])
    batch_ns = time.perf_counter_ns() - t0
    lines = [f"{u} {v} {'inf' if d >= INF else int(d)}" for (u, v), d in zip(pairs.tolist(), ans)]
    summary = {"queries": len(pairs), "space_bytes": o.nbytes(),
               "mean_query_ns": round(batch_ns / max(1, len(pairs)), 1)}
    if args.check:
        g = read_graph(args.check)
        ap = all_pairs(g, cap=args.brute_cap)
        expect = ap[pairs[:, 0], pairs[:, 1]]
        summary["check"] = {"mismatches": int((expect != ans).sum())}
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
        _emit(summary)
    else:
        print("\n".join(lines))
        print(json.dumps(summary), file=sys.stderr)
    if args.check and summary["check"]["mismatches"]:
        raise VerificationFailed(f"{summary['check']['mismatches']} answers differ from brute force")


# ---- vc dimension

def _family(kind, g, terminals, seed):
    if kind == "balls":
        return SS.ball_system(g, cap=g.n), None
    if kind == "sp_trees":
        return SS.sp_tree_system(g, cap=g.n), None
    if kind == "lp_hat":
        rng = np.random.default_rng(seed)
        S = sorted(rng.choice(g.n, size=min(terminals, g.n), replace=False).tolist())
        M = SS.realized_differences(g, S)
        return SS.lp_hat_system(g, S, M), S
    raise ValueError(f"unknown family {kind!r}")


def _vc_instance(job):
    kind, spec, seed, cap, terminals, max_ground = job
    g = parse_spec(spec, seed)
    f, S = _family(kind, g, terminals, seed)
    rep = SS.vc_search(f, cap=cap, max_ground=max_ground)
    return {"seed": seed, "n": g.n, "sets": len(f), "ground": f.ground_size,
            "dimension": rep.dimension, "capped": rep.capped,
            "witness": [repr(f.ground[j]) for j in rep.witness], "terminals": S}


def cmd_vcdim(args):
    if args.gadget is not None:
        gd = LB.build_gadget(args.gadget)
        f = SS.restrict(SS.sp_tree_system(gd.graph, cap=gd.graph.n), gd.X)
        rep = SS.vc_search(f, cap=min(args.cap, 7))
        out = {"family": "sp_trees", "gadget_r": args.gadget, "ground": "X",
               "instances": [{"n": gd.graph.n, "sets": len(f), "ground": f.ground_size,
                              "dimension": rep.dimension, "capped": rep.capped,
                              "witness": [repr(f.ground[j]) for j in rep.witness]}]}
    else:
        if args.graph:
            g = read_graph(args.graph)
            f, S = _family(args.family, g, args.terminals, args.seed)
            rep = SS.vc_search(f, cap=args.cap, max_ground=args.max_ground)
            results = [{"seed": None, "n": g.n, "sets": len(f), "ground": f.ground_size,
                        "dimension": rep.dimension, "capped": rep.capped,
                        "witness": [repr(f.ground[j]) for j in rep.witness], "terminals": S}]
        else:
            jobs = [(args.family, args.gen, args.seed + k, args.cap, args.terminals,
                     args.max_ground) for k in range(args.batch)]
            if args.threads > 1:
                with ProcessPoolExecutor(args.threads) as ex:
                    results = list(ex.map(_vc_instance, jobs))
            else:
                results = [_vc_instance(j) for j in jobs]
        out = {"family": args.family, "cap": args.cap, "instances": results}
    dims = [x["dimension"] for x in out["instances"]]
    out["max_dimension"] = max(dims)
    _emit(out, args.out)
    if args.expect_max is not None and out["max_dimension"] > args.expect_max:
        raise VerificationFailed(f"VC dimension {out['max_dimension']} > {args.expect_max}")
    if args.expect_min is not None and out["max_dimension"] < args.expect_min:
        raise VerificationFailed(f"VC dimension {out['max_dimension']} < {args.expect_min}")


# ---- lower bound

def cmd_lowerbound(args):
    gd = LB.build_gadget(args.r, A0=args.A0, M=args.M, growth=args.growth)
    if args.unweighted:
        gd = LB.to_unweighted(gd, cap=args.cap)
    rep = LB.verify_shattering(gd)
    out = {"manifest": gd.manifest(), "report": rep.to_dict()}
    if args.claims:
        bad = LB.claim_paths(gd, "y") + LB.claim_paths(gd, "z")
        out["claims"] = {"pass": not bad, "failures": bad}
    if args.out_graph:
        write_graph(gd.graph, args.out_graph)
    if args.manifest:
        with open(args.manifest, "w") as fh:
            fh.write(gd.manifest_json() + "\n")
    _emit(out, args.out)
    if not rep.passed or (args.claims and not out["claims"]["pass"]):
        raise VerificationFailed("gadget does not shatter X")


# ---- bench

def bench_rows(sizes, kind="undirected", r=None, rule=None, seed=0, queries=2000, h=5,
               drop=0.0):
    """One CSV row dict per size; timings are wall-clock, everything else is seeded."""
    rows = []
    for n in sizes:
        spec = f"random_planar:n={n},drop={drop}"
        if kind == "directed":
            spec = "orient+" + spec
        g = parse_spec(spec, seed)
        rule_name = rule or ("directed_oracle" if kind == "directed" else "undirected")
        rr = r if r is not None else U.r_preset(g.n, rule_name, h)
        t0 = time.perf_counter()
        div = build_r_division(g, rr)
        o = _build_with_division(g, div, h)
        build_ms = (time.perf_counter() - t0) * 1000
        rng = np.random.default_rng(seed)
        pairs = rng.integers(0, g.n, size=(queries, 2)).tolist()
        t0 = time.perf_counter_ns()
        for u, v in pairs:
            o.query(u, v)
        q_ns = (time.perf_counter_ns() - t0) / max(1, queries)
        count, cap_ok = _pattern_stats(o)
        rows.append({"n": g.n, "r": rr, "build_ms": round(build_ms, 3),
                     "query_ns": round(q_ns, 1), "space_bytes": o.nbytes(),
                     "pattern_count": count,
                     "boundary_sum": division_quality(div)["boundary_sum"], "kind": kind,
                     "seed": seed, "pattern_cap_ok": cap_ok})
    return rows


def _build_with_division(g, div, h):
    if g.directed:
        return D.DirectedOracle.build(g, h=h, division=div)
    return U.UndirectedOracle.build(g, h=h, division=div)


def cmd_bench(args):
    rows = bench_rows(args.sizes, args.kind, args.r, args.rule, args.seed, args.queries, args.h,
                      args.drop)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    if not all(row["pattern_cap_ok"] for row in rows):
        raise VerificationFailed("a cluster exceeded its Sauer-Shelah cap")


# ---- gen

def cmd_gen(args):
    g = parse_spec(args.gen, args.seed)
    if args.out:
        write_graph(g, args.out)
    else:
        sys.stdout.write(format_graph(g))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minorvc", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="eccentricities, diameter and Wiener index as JSON")
    _add_input(p)
    _add_params(p)
    p.add_argument("--brute", action="store_true", help="cross-check against all-pairs BFS")
    p.add_argument("--brute-cap", type=int, default=5000)
    p.add_argument("--out", help="JSON output path (default stdout)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("oracle-build", help="build and save a distance oracle")
    _add_input(p)
    _add_params(p)
    p.add_argument("--out", required=True, help="oracle file (.npz)")
    p.add_argument("--report", help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_oracle_build)

    p = sub.add_parser("oracle-query", help="answer a batch of distance queries")
    p.add_argument("--oracle", required=True)
    q = p.add_mutually_exclusive_group(required=True)
    q.add_argument("--pairs", help="file with one 'u v' pair per line")
    q.add_argument("--random", type=int, help="number of random pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", help="graph file to verify answers against all-pairs BFS")
    p.add_argument("--brute-cap", type=int, default=5000)
    p.add_argument("--out", help="answers file; a JSON summary then goes to stdout")
    p.set_defaults(func=cmd_oracle_query)

    p = sub.add_parser("vcdim", help="exhaustive VC-dimension search on a set family")
    _add_input(p, required=False)
    p.add_argument("--family", choices=["balls", "lp_hat", "sp_trees"], default="balls")
    p.add_argument("--gadget", type=int, metavar="R",
                   help="shortest-path trees of the R-edge gadget, restricted to its X edges")
    p.add_argument("--cap", type=int, default=5, help="largest set size searched (<= 7)")
    p.add_argument("--max-ground", type=int, default=64)
    p.add_argument("--terminals", type=int, default=3, help="terminal count for lp_hat")
    p.add_argument("--batch", type=int, default=1, help="number of seeds for --gen")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--expect-max", type=int, help="exit 1 if some dimension exceeds this")
    p.add_argument("--expect-min", type=int, help="exit 1 if the largest dimension is below this")
    p.add_argument("--out")
    p.set_defaults(func=cmd_vcdim)

    p = sub.add_parser("lowerbound", help="build and verify the shattering gadget")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--A0", type=int, default=2)
    p.add_argument("--M", type=int, default=None, help="default 10 * A_max")
    p.add_argument("--growth", type=int, default=4)
    p.add_argument("--unweighted", action="store_true", help="subdivide into unit edges first")
    p.add_argument("--cap", type=int, default=1_000_000, help="vertex cap for --unweighted")
    p.add_argument("--claims", action="store_true", help="also check the path-shape claims")
    p.add_argument("--out-graph", help="write the gadget graph here")
    p.add_argument("--manifest", help="write the JSON manifest here")
    p.add_argument("--out", help="report path (default stdout)")
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("bench", help="oracle scaling sweep as CSV")
    p.add_argument("--sizes", type=int, nargs="+", default=[1000, 4000])
    p.add_argument("--kind", choices=["undirected", "directed"], default="undirected")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--rule", choices=sorted(U.R_RULES), default=None)
    p.add_argument("--h", type=int, default=5)
    p.add_argument("--drop", type=float, default=0.0, help="fraction of edges thinned")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", type=int, default=2000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a generated graph in the text format")
    p.add_argument("--gen", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "vcdim" and args.gadget is None and not (args.graph or args.gen):
        ap.error("vcdim needs --graph, --gen or --gadget")
    try:
        args.func(args)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (GraphFormatError, SizeCapError, U.OracleFormatError, ValueError, OSError,
            zipfile.BadZipFile, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
