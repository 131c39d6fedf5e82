"""Per-iteration Frank-Wolfe time against edge count, with the log-log slope.

    python benchmarks/bench_scaling.py [--edges 10000,100000,1000000] [--rank 10]
"""

import argparse

from fwintervene.bench import loglog_slope, scaling_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--edges", default="10000,100000,1000000")
    ap.add_argument("--rank", type=int, default=10)
    ap.add_argument("--iterations", type=int, default=2)
    ap.add_argument("--grid-count", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(float(x)) for x in args.edges.split(",")]
    rows = scaling_sweep(sizes, r=args.rank, iterations=args.iterations, grid_count=args.grid_count,
                         log=lambda s: print(s, flush=True))
    if len(rows) > 1:
        print(f"log-log slope: {loglog_slope([x['m'] for x in rows], [x['seconds_per_iteration'] for x in rows]):.3f}")


if __name__ == "__main__":
    main()
