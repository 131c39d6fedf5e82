"""Seeded synthetic graphs for tests, benchmarks and the CLI."""

from __future__ import annotations

import numpy as np

from .graph import GraphSequence, WeightedGraph

__all__ = ["random_graph", "power_law_graph", "random_sequence", "heavy_tailed_weights"]


def heavy_tailed_weights(rng, size, dist="lognormal", shape=1.0):
    """Positive weights: ``lognormal`` (sigma=shape) or ``pareto`` (alpha=shape, min 1)."""
    if dist == "lognormal":
        return rng.lognormal(0.0, shape, size)
    if dist == "pareto":
        return 1.0 + rng.pareto(shape, size)
    if dist == "uniform":
        return rng.uniform(0.0, 1.0, size) + 1e-3
    raise ValueError(f"unknown weight distribution {dist!r}")


def _unique_pairs(rng, n, m, p, directed, max_rounds=64):
    keys = np.empty(0, dtype=np.int64)
    for _ in range(max_rounds):
        need = m - len(keys)
        if need <= 0:
            break
        k = int(need * 1.2) + 16
        i = rng.choice(n, size=k, p=p)
        j = rng.choice(n, size=k, p=p)
        if not directed:
            i, j = np.minimum(i, j), np.maximum(i, j)
        new = i.astype(np.int64) * n + j
        # keep first occurrences in draw order so the result is seed-stable
        keys = np.concatenate([keys, new])
        _, first = np.unique(keys, return_index=True)
        keys = keys[np.sort(first)]
    keys = keys[:m]
    return keys // n, keys % n


def power_law_graph(n, m, exponent=2.5, weights="lognormal", shape=1.0,
                    directed=True, seed=0) -> WeightedGraph:
    """Chung-Lu style graph with heavy-tailed expected degrees.

    Endpoints are drawn with probability proportional to ``(i + 1) ** (-1 / (exponent - 1))``
    and duplicates are redrawn, so the result has ``m`` distinct edges when
    the graph is not too dense (fewer if redraws cannot find them).
    Undirected graphs store both orientations with equal weight.
    """
    rng = np.random.default_rng(seed)
    p = (np.arange(1, n + 1, dtype=np.float64)) ** (-1.0 / (exponent - 1.0))
    p /= p.sum()
    perm = rng.permutation(n)
    src, dst = _unique_pairs(rng, n, m if directed else (m + 1) // 2, p, directed)
    src, dst = perm[src], perm[dst]
    w = heavy_tailed_weights(rng, len(src), weights, shape)
    if not directed:
        off = src != dst
        src, dst, w = (np.concatenate([src, dst[off]]), np.concatenate([dst, src[off]]),
                       np.concatenate([w, w[off]]))
    return WeightedGraph.from_edges(n, src, dst, w, directed=directed)


def random_graph(n, density=0.1, seed=0, weights="uniform", shape=1.0, directed=True) -> WeightedGraph:
    """Erdos-Renyi support with independent random weights."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < density
    if not directed:
        mask = np.triu(mask)
    i, j = np.nonzero(mask)
    w = heavy_tailed_weights(rng, len(i), weights, shape)
    if not directed:
        off = i != j
        i, j, w = np.concatenate([i, j[off]]), np.concatenate([j, i[off]]), np.concatenate([w, w[off]])
    return WeightedGraph.from_edges(n, i, j, w, directed=directed)


def random_sequence(n, steps, density=0.2, seed=0, weights="uniform") -> GraphSequence:
    ss = np.random.SeedSequence(seed)
    return GraphSequence([
        random_graph(n, density, int(child.generate_state(1)[0]), weights)
        for child in ss.spawn(steps)
    ])
