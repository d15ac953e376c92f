"""Command-line front end: build, ground truth, search, eval, bench,
codec dump, and the bank-conflict model.

All data goes to stdout or --out as CSV (header row, comma-separated,
'.' decimal); diagnostics go to stderr.  Exit code 0 iff no error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import bankmodel, minifloat
from .datasets import (
    NeighborLists,
    brute_force_knn,
    read_ivecs,
    read_vectors,
    write_fvecs,
    write_ivecs,
)
from .index import build_index, load_index, save_index
from .search import LUT_PRECISIONS, SearchParams, recall, search_batch


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_build(args) -> int:
    data = read_vectors(args.dataset)
    idx = build_index(data, nlist=args.nlist, s=args.pq_dims, p=args.pq_bits, seed=args.seed)
    save_index(idx, args.out)
    print(
        f"n={idx.n_total} d={idx.d} nlist={idx.nlist} s={idx.cb.s} p={idx.cb.p} out={args.out}"
    )
    return 0


def cmd_gt(args) -> int:
    base = read_vectors(args.dataset)
    queries = read_vectors(args.queries)
    gt = brute_force_knn(base, queries, args.k)
    write_ivecs(args.out, gt)
    _log(f"wrote exact top-{args.k} for {gt.n_queries} queries to {args.out}")
    return 0


def _timed_search(idx, queries, params: SearchParams):
    start = time.perf_counter()
    lists, n_short = search_batch(idx, queries, params)
    elapsed = time.perf_counter() - start
    return lists, n_short, elapsed


def cmd_search(args) -> int:
    idx = load_index(args.index)
    queries = read_vectors(args.queries)
    params = SearchParams(k=args.k, nprobe=args.nprobe, precision=args.lut_precision)
    lists, n_short, elapsed = _timed_search(idx, queries, params)
    write_ivecs(args.out, lists)
    if args.distances_out:
        write_fvecs(args.distances_out, lists.distances)
    if n_short:
        _log(f"warning: {n_short} queries reached fewer than k={args.k} candidates")
    nq = lists.n_queries
    print(f"queries={nq} wall_time_ms={elapsed * 1e3:.3f} qps={nq / elapsed:.1f}")
    return 0


def cmd_eval(args) -> int:
    results = read_ivecs(args.results)
    gt = read_ivecs(args.gt)
    per_query, mean = recall(results, gt)
    out = sys.stdout
    out.write("query,recall\n")
    for i, r in enumerate(per_query):
        out.write(f"{i},{r:.6f}\n")
    out.write(f"mean,{mean:.6f}\n")
    return 0


def cmd_bench(args) -> int:
    idx = load_index(args.index)
    queries = read_vectors(args.queries)
    gt = read_ivecs(args.gt)
    precisions = [p.strip() for p in args.precisions.split(",") if p.strip()]
    nprobes = [int(x) for x in args.nprobe_list.split(",") if x.strip()]
    for p in precisions:
        if p not in LUT_PRECISIONS:
            raise ValueError(f"unknown precision {p!r} in --precisions")

    rows = []
    for prec in precisions:
        prev = -1.0
        for nprobe in nprobes:
            params = SearchParams(k=args.k, nprobe=nprobe, precision=prec)
            lists, _, elapsed = _timed_search(idx, queries, params)
            _, mean = recall(lists, gt)
            nq = lists.n_queries
            rows.append((prec, nprobe, args.k, mean, nq / elapsed, elapsed * 1e3))
            if mean < prev:
                _log(
                    f"warning: recall dipped from {prev:.4f} to {mean:.4f} "
                    f"at precision={prec} nprobe={nprobe}"
                )
            prev = mean
            _log(f"bench precision={prec} nprobe={nprobe} recall={mean:.4f}")

    with open(args.out, "w") as f:
        f.write("precision,nprobe,k,mean_recall,queries_per_second,wall_time_ms\n")
        for prec, nprobe, k, mean, qps, ms in rows:
            f.write(f"{prec},{nprobe},{k},{mean:.6f},{qps:.2f},{ms:.3f}\n")
    _log(f"wrote {len(rows)} bench rows to {args.out}")
    return 0


def cmd_codec_dump(args) -> int:
    spec = minifloat.E5M3 if args.format == "e5m3" else minifloat.E4M4
    values = minifloat.decode_table(spec)
    out = sys.stdout
    out.write("code,value\n")
    for code in range(256):
        out.write(f"0x{code:02X},{float(values[code])!r}\n")
    return 0


def cmd_bank_model(args) -> int:
    geom = bankmodel.BankGeometry()
    lanes = bankmodel.lanes_per_bank(args.entries, args.elem_bytes, geom)
    worst = bankmodel.worst_case_conflicts(args.entries, args.elem_bytes, geom)
    header = "entries,elem_bytes,lanes_per_bank,worst_case_conflicts"
    row = f"{args.entries},{args.elem_bytes},{lanes},{worst}"
    if args.simulate:
        rng = np.random.default_rng(args.seed)
        patterns = rng.integers(0, args.entries, size=(args.simulate, bankmodel.WARP_SIZE))
        observed = int(
            bankmodel.simulate_warp_access_batch(patterns, args.elem_bytes, geom).max()
        )
        adversarial = bankmodel.simulate_warp_access(
            bankmodel.adversarial_pattern(args.entries, args.elem_bytes, geom),
            args.elem_bytes,
            geom,
        )
        header += ",simulated_max,adversarial"
        row += f",{observed},{adversarial}"
    print(header)
    print(row)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ivfpq8",
        description="IVFPQ search with reduced-precision lookup tables",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an index from fvecs/bvecs vectors")
    p.add_argument("--dataset", required=True)
    p.add_argument("--nlist", type=int, required=True)
    p.add_argument("--pq-dims", type=int, required=True)
    p.add_argument("--pq-bits", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("gt", help="exact brute-force ground truth as ivecs")
    p.add_argument("--dataset", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gt)

    p = sub.add_parser("search", help="run queries against an index")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--nprobe", type=int, required=True)
    p.add_argument("--lut-precision", choices=sorted(LUT_PRECISIONS), default="f32")
    p.add_argument("--out", required=True)
    p.add_argument("--distances-out", default=None, help="optional fvecs of distances")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="recall of result ivecs against ground truth")
    p.add_argument("--results", required=True)
    p.add_argument("--gt", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="recall/throughput sweep over precisions and nprobe")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--nprobe-list", required=True, help="comma-separated nprobe values")
    p.add_argument("--precisions", required=True, help="comma-separated precision names")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("codec-dump", help="all 256 code,value pairs of a format")
    p.add_argument("--format", choices=["e5m3", "e4m4"], required=True)
    p.set_defaults(func=cmd_codec_dump)

    p = sub.add_parser("bank-model", help="bank-conflict arithmetic for a table layout")
    p.add_argument("--entries", type=int, required=True)
    p.add_argument("--elem-bytes", type=int, required=True)
    p.add_argument("--simulate", type=int, default=0, help="random warp patterns to try")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bank_model)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
