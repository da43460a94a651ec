"""Command line: ``trienum {gen,run,sweep,bounds}``."""

from __future__ import annotations

import argparse
import sys

from . import bench
from .enumeration import TriangleSink
from .graph import GENERATORS, canonicalize, load_graph, save


def _gen(args) -> int:
    fn = GENERATORS[args.kind]
    if args.kind == "clique":
        raw = fn(args.n)
    elif args.kind == "gnm":
        raw = fn(args.n, args.m, args.seed)
    elif args.kind == "hub":
        raw = fn(args.n, args.m, args.hub_degree, args.seed)
    elif args.kind == "tripartite":
        raw = fn(args.n, args.n, args.n, args.density, args.seed)
    else:
        raw = fn(args.n)
    g = canonicalize(raw)
    save(g, args.output)
    print(f"wrote {args.output}: V={g.n_vertices} E={g.n_edges}")
    return 0


def _run(args) -> int:
    g = load_graph(args.graph)
    sink = TriangleSink("list" if args.sink == "list" else args.sink)
    rep, _ = bench.run_one(g, args.algo, args.M, args.B, args.seed, gen=str(args.graph), sink=sink)
    if args.sink == "list":
        if args.triangles:
            sink.write(args.triangles)
        else:
            for a, b, c in sink.canonical().tolist():
                print(a, b, c)
    if args.out == "json":
        print(rep.to_json())
    else:
        bench.write_csv([rep], sys.stdout)
    if rep.below_scan_floor:
        print("warning: measured I/Os below the input scan floor", file=sys.stderr)
        return 2
    return 0


def _sweep(args) -> int:
    spec = bench.SweepSpec.load(args.spec)
    reports = bench.run_sweep(spec)
    out = args.output or spec.out
    bench.write_csv(reports, out if out else sys.stdout)
    bad = [r for r in reports if r.below_scan_floor]
    failed = [r for r in reports if r.error]
    for r in failed:
        print(f"cell failed: {r.algo} {r.gen} M={r.M} B={r.B} seed={r.seed}: {r.error}", file=sys.stderr)
    for r in bad:
        print(f"below scan floor: {r.algo} {r.gen} io={r.io_total} floor={r.scan_floor}", file=sys.stderr)
    algos = {r.algo for r in reports}
    for a in sorted(algos - {"oracle"}):
        pts = [r for r in reports if r.algo == a and not r.error]
        if len({r.E for r in pts}) >= 3 and len({(r.M, r.B) for r in pts}) == 1:
            fit = bench.fit_reports(pts)
            print(f"{a}: log-log slope of io_total vs E = {fit.slope:.3f}", file=sys.stderr)
    return 0 if not bad else 2


def _bounds(args) -> int:
    print(f"bound_upper = {bench.bound_upper(args.E, args.M, args.B):.6g}")
    print(f"bound_hu    = {bench.bound_hu(args.E, args.M, args.B):.6g}")
    print(f"bound_lower = {bench.lower_bound(args.t, args.M, args.B):.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trienum", description="External-memory triangle enumeration experiments")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write a generated graph")
    g.add_argument("kind", choices=sorted(GENERATORS))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--hub-degree", type=int, default=0)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True, help="edge list (.txt) or binary (.bin)")
    g.set_defaults(fn=_gen)

    r = sub.add_parser("run", help="run one algorithm on a graph file")
    r.add_argument("--algo", required=True, choices=bench.ALGO_IDS)
    r.add_argument("--graph", required=True)
    r.add_argument("--M", type=int, required=True)
    r.add_argument("--B", type=int, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--sink", choices=("count", "list", "null"), default="count")
    r.add_argument("--triangles", help="with --sink list: write sorted 'a b c' lines here")
    r.add_argument("--out", choices=("json", "csv"), default="json")
    r.set_defaults(fn=_run)

    s = sub.add_parser("sweep", help="run a parameter sweep from a spec file")
    s.add_argument("--spec", required=True)
    s.add_argument("-o", "--output", help="CSV path (overrides the sweep file's out key)")
    s.set_defaults(fn=_sweep)

    b = sub.add_parser("bounds", help="print bound values")
    b.add_argument("--E", type=float, required=True)
    b.add_argument("--t", type=float, default=0.0)
    b.add_argument("--M", type=float, required=True)
    b.add_argument("--B", type=float, required=True)
    b.set_defaults(fn=_bounds)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
