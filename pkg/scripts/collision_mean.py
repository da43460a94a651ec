"""Empirical mean of the collision statistic X over many 4-wise seeds."""

import argparse
import math

import numpy as np

from trienum.coloring import collision_stats, next_pow2, sample_four_wise
from trienum.graph import canonicalize, gen_gnm


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--m", type=int, default=4096)
    ap.add_argument("--M", type=int, default=256)
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--graph-seed", type=int, default=0)
    args = ap.parse_args(argv)

    g = canonicalize(gen_gnm(args.n, args.m, args.graph_seed))
    E, V = g.n_edges, g.n_vertices
    c = next_pow2(math.sqrt(E / args.M))
    xs = np.array([collision_stats(g.edges, sample_four_wise(s, c, V)(np.arange(V)), c).x_total
                   for s in range(args.seeds)])
    print(f"E={E} M={args.M} c={c} seeds={args.seeds}")
    print(f"mean X = {xs.mean():.1f} = {xs.mean() / (E * args.M):.4f} E*M; "
          f"min {xs.min()} max {xs.max()} std {xs.std():.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
