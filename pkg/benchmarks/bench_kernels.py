"""Compiled vs pure-Python kernels on one synthetic power-law graph.

    python benchmarks/bench_kernels.py [--nodes 20000] [--edges 200000]
"""

import argparse

from fwintervene.bench import kernel_benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=20_000)
    ap.add_argument("--edges", type=int, default=200_000)
    ap.add_argument("--rank", type=int, default=10)
    ap.add_argument("--replicas", type=int, default=8)
    ap.add_argument("--epochs", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rows = kernel_benchmark(args.nodes, args.edges, args.rank, args.replicas, args.epochs, args.repeat)
    by_kernel = {}
    for row in rows:
        by_kernel.setdefault(row["kernel"], {})[row["backend"]] = row["seconds"]
    print(f"{'kernel':<20}{'cython (s)':>12}{'python (s)':>12}{'speedup':>10}")
    for kernel, t in by_kernel.items():
        cy, py = t.get("cython"), t["python"]
        speed = f"{py / cy:.1f}x" if cy else "n/a"
        cy_s = f"{cy:.4f}" if cy else "n/a"
        print(f"{kernel:<20}{cy_s:>12}{py:>12.4f}{speed:>10}")


if __name__ == "__main__":
    main()
