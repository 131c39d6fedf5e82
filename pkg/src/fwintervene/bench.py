"""Timing helpers: per-iteration scaling of Frank-Wolfe and kernel backend comparison."""

from __future__ import annotations

import time

import numpy as np

from . import kernels
from .generators import power_law_graph
from .optimizer import BudgetSpec, LineSearchGrid, SvdOptions, frank_wolfe_static

__all__ = ["scaling_sweep", "loglog_slope", "kernel_benchmark"]


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log(ys)`` against ``log(xs)``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


def scaling_sweep(edge_counts, r=10, nodes_per_edge=0.1, iterations=2, grid_count=30,
                  budget_fraction=0.05, seed=0, log=None):
    """Median per-iteration wall time of Frank-Wolfe on power-law graphs of growing size.

    Each size ``m`` gets ``n = max(r + 1, round(m * nodes_per_edge))`` nodes.
    Returns a list of dicts ``{m, n, seconds_per_iteration, iterations}``.
    """
    rows = []
    grid = LineSearchGrid.log_spaced(1e-3, 1e-1, grid_count)
    for m in edge_counts:
        m = int(m)
        n = max(r + 1, int(round(m * nodes_per_edge)))
        g = power_law_graph(n, m, seed=seed)
        res = frank_wolfe_static(g, BudgetSpec.of_fraction(budget_fraction), r, iterations, grid,
                                 SvdOptions(seed=seed))
        secs = res.iteration_seconds or [float("nan")]
        row = {"m": g.edge_count, "n": n, "seconds_per_iteration": float(np.median(secs)),
               "iterations": len(res.iteration_seconds)}
        rows.append(row)
        if log:
            log(f"m={row['m']} n={n} {row['seconds_per_iteration']:.3f}s/iter")
    return rows


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def kernel_benchmark(n=20_000, m=200_000, r=10, replicas=8, epochs=20, repeat=3, seed=0):
    """Best-of-``repeat`` seconds for each hot kernel on every available backend."""
    g = power_law_graph(n, m, directed=False, seed=seed)
    rng = np.random.default_rng(seed)
    left = rng.standard_normal((n, r))
    right = rng.standard_normal((n, r))
    lam = np.sort(rng.random(r))[::-1]
    scores = rng.standard_normal(g.edge_count)
    order = np.argsort(-scores, kind="stable")
    states0 = np.zeros((replicas, n), dtype=np.int8)
    states0[:, rng.choice(n, max(1, n // 100), replace=False)] = kernels.EXPOSED
    rows = []
    for name in kernels.available_backends():
        mod = kernels.load_backend(name)
        cases = {
            "edge_scores": lambda: mod.edge_scores(g.src, g.dst, left, right, lam),
            "greedy_reduction": lambda: mod.greedy_reduction(order, g.weights, scores, 0.05 * g.total_weight()),
            "hash_uniform": lambda: mod.hash_uniform(seed, 0, 0, np.arange(n * replicas, dtype=np.uint64)),
            "run_graph_epidemic": lambda: mod.run_graph_epidemic(
                g.indptr, g.indices, g.weights, 0.05, kernels.MODEL_SEIR, states0.copy(),
                np.arange(replicas), 0.25, 0.2, epochs, seed),
        }
        for kernel, fn in cases.items():
            rows.append({"backend": name, "kernel": kernel, "seconds": _best_of(fn, repeat)})
    return rows
