"""Clique ladder: I/O count vs E for each algorithm, with log-log slopes.

    python scripts/scaling_ladder.py --out ladder.csv
"""

import argparse
import sys

from trienum.bench import fit_reports, make_graph, run_one, write_csv

DEFAULT_N = (46, 64, 91, 128, 181, 256, 362, 512)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=DEFAULT_N, help="clique sizes")
    ap.add_argument("--algos", nargs="+", default=["cache_aware", "deterministic", "cache_oblivious"])
    ap.add_argument("--M", type=int, default=512)
    ap.add_argument("--B", type=int, default=32)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args(argv)

    reports = []
    for n in args.n:
        g = make_graph("clique", n)
        for algo in args.algos:
            rep, _ = run_one(g, algo, args.M, args.B, args.seed, gen=f"clique:{n}")
            reports.append(rep)
            print(f"n={n:4d} E={rep.E:7d} {algo:16s} io={rep.io_total:9d} "
                  f"io/bound_upper={rep.ratio_upper:7.2f} {rep.wall_ms / 1e3:6.1f}s", file=sys.stderr)
    write_csv(reports, args.out or sys.stdout)
    if len(args.n) >= 3:
        for algo in args.algos:
            fit = fit_reports([r for r in reports if r.algo == algo])
            print(f"{algo}: slope {fit.slope:.3f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
