"""Nearest-neighbour sweep over sizes 10..1e5 for every index.

    python3 scripts/nn_sweep.py --dist uniform --out results/nn_uniform.csv
"""

import argparse
import os
import sys

from mvdindex.bench import Workload, run_grid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dist", choices=["uniform", "exp", "file"], default="uniform")
    ap.add_argument("--input", help="point file for --dist file")
    ap.add_argument("--sizes", default="10,100,1000,10000,100000")
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--queries", type=int, default=1000)
    ap.add_argument("--k", type=int, default=100)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    w = Workload(distribution=args.dist, input=args.input, query_count=args.queries)
    sizes = [int(s) for s in args.sizes.split(",")]
    report = run_grid(["mvd", "kdtree", "scan"], sizes, [], w, trials=args.trials, k=args.k,
                      log=lambda s: print(s, file=sys.stderr))
    if args.out == "-":
        sys.stdout.write(report.to_csv() + "\n" + report.to_markdown())
        return
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w") as fh:
        fh.write(report.to_csv())
    with open(os.path.splitext(args.out)[0] + ".md", "w") as fh:
        fh.write(report.to_markdown())


if __name__ == "__main__":
    main()
