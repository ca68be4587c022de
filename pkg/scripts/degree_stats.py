"""Delaunay degree and layer statistics for uniform point sets.

Prints the mean degree (2E/V), the degree histogram and the MVD layer sizes
for each requested n.

    python3 scripts/degree_stats.py --sizes 1000,10000,100000
"""

import argparse
from collections import Counter

from mvdindex import MvdIndex
from mvdindex.bench import Workload, gen_points


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="1000,10000")
    ap.add_argument("--dist", choices=["uniform", "exp"], default="uniform")
    ap.add_argument("--seed", type=int, default=20200101)
    ap.add_argument("--k", type=int, default=100)
    args = ap.parse_args()
    for n in (int(s) for s in args.sizes.split(",")):
        pts = gen_points(Workload(distribution=args.dist, n=n, seed=args.seed))
        idx = MvdIndex.build(pts, k=args.k, seed=args.seed)
        base = idx.layers[0]
        V, E, F = base.euler_counts()
        hist = Counter(len(base.neighbors(v)) for v in base)
        print(f"n={n} mean_degree={2 * E / V:.4f} V={V} E={E} F={F} layers={idx.layer_sizes()}")
        print("  degree histogram: " + " ".join(f"{d}:{c}" for d, c in sorted(hist.items())))


if __name__ == "__main__":
    main()
