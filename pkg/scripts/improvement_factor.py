"""Ratio of pivot-only I/Os to cache-aware I/Os along a clique ladder.

Compares each ratio with 0.5*sqrt(E/M) and checks that the ratios grow.
"""

import argparse
import math

from trienum.bench import make_graph, run_one

DEFAULT_N = (46, 64, 91, 128, 181, 256, 362, 512)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=DEFAULT_N)
    ap.add_argument("--M", type=int, default=512)
    ap.add_argument("--B", type=int, default=32)
    args = ap.parse_args(argv)

    print(f"{'n':>5} {'E':>7} {'pivot_only':>11} {'cache_aware':>11} {'ratio':>7} {'0.5*sqrt(E/M)':>14}")
    ratios = []
    for n in args.n:
        g = make_graph("clique", n)
        piv, _ = run_one(g, "pivot_only", args.M, args.B)
        ca, _ = run_one(g, "cache_aware", args.M, args.B)
        r = piv.io_total / ca.io_total
        ratios.append(r)
        print(f"{n:5d} {g.n_edges:7d} {piv.io_total:11d} {ca.io_total:11d} {r:7.2f} "
              f"{0.5 * math.sqrt(g.n_edges / args.M):14.2f}")
    grows = all(b > a for a, b in zip(ratios, ratios[1:]))
    print(f"monotone growth: {grows}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
