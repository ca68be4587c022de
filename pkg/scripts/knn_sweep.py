"""k-nearest sweep over k_query in 2..64 at one size for every index.

    python3 scripts/knn_sweep.py --dist exp --n 10000
"""

import argparse
import os
import sys

from mvdindex.bench import Workload, run_grid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dist", choices=["uniform", "exp", "file"], default="uniform")
    ap.add_argument("--input", help="point file for --dist file")
    ap.add_argument("--n", type=int, default=10000)
    ap.add_argument("--k-list", default="2,4,8,16,32,64")
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--queries", type=int, default=1000)
    ap.add_argument("--k", type=int, default=100)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    w = Workload(distribution=args.dist, input=args.input, query_count=args.queries)
    ks = [int(s) for s in args.k_list.split(",")]
    report = run_grid(["mvd", "kdtree", "scan"], [args.n], ks, w, trials=args.trials, k=args.k,
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
