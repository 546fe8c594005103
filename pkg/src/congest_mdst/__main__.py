"""Command line: ``python -m congest_mdst run|verify``."""
from __future__ import annotations

import argparse
import sys

from .bench import ALGORITHMS, Cell, dumps, parse_n, parse_params, run_cells, scaling_summary
from .graph import GENERATORS, GraphError, read_graph


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="congest_mdst", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run an algorithm over a graph/seed grid, JSON lines on stdout")
    r.add_argument("--alg", choices=ALGORITHMS, default="matching-mdst")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--gen", choices=sorted(GENERATORS))
    src.add_argument("--graph", help="edge-list file: 'n m' header, then 'u v' lines")
    r.add_argument("--n", default="16", help="node count or a doubling range such as 64..512")
    r.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter")
    r.add_argument("--seeds", type=int, help="run seeds 0..N-1")
    r.add_argument("--seed", type=int, default=0, help="single seed (ignored with --seeds)")
    r.add_argument("--cmsg", type=int, default=8, help="budget multiplier c_msg")
    r.add_argument("--trace", help="write per-message JSON lines to this file")
    r.add_argument("--scaling", action="store_true", help="append a scaling summary record")
    r.add_argument("--backend", choices=("fast", "engine"), default="fast")
    r.add_argument("--start", choices=("matching-mdst", "hub"), default="matching-mdst",
                   help="epochs: start tree")
    r.add_argument("--d", type=int, default=2, help="d-cm: capacity")
    r.add_argument("--q", type=int, default=2, help="improve: per-node and per-bundle cap")
    v = sub.add_parser("verify", help="run the acceptance suites")
    v.add_argument("--suite", action="append", help="suite name (repeatable); default: all")
    v.add_argument("--json", action="store_true", help="also print one JSON line per criterion")
    return p


def cmd_run(args) -> int:
    if args.cmsg < 1:
        raise SystemExit("--cmsg must be >= 1")
    seeds = list(range(args.seeds)) if args.seeds is not None else [args.seed]
    params = parse_params(args.param)
    if args.graph:
        try:
            read_graph(args.graph)
        except (OSError, GraphError, ValueError) as exc:
            print(f"cannot read graph: {exc}", file=sys.stderr)
            return 2
        sizes = [0]
    else:
        sizes = parse_n(args.n)
    cells = [Cell(args.alg, args.gen, n, s, params, args.graph, args.cmsg, args.trace, args.backend,
                  args.start, args.d, args.q) for n in sizes for s in seeds]
    records = run_cells(cells)
    for rec in records:
        print(dumps(rec))
    if args.scaling:
        print(dumps(scaling_summary(records)))
    return 0 if all(r.get("ok") for r in records) else 1


def cmd_verify(args) -> int:
    from .acceptance import SUITES, format_line, run_suites

    names = args.suite or list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        print(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return 2
    ok = True
    for res in run_suites(names):
        print(format_line(res), flush=True)
        if args.json:
            print(dumps(res.to_dict()), flush=True)
        ok = ok and res.passed
    print("ALL PASS" if ok else "SOME CRITERIA FAILED")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return cmd_run(args) if args.cmd == "run" else cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
