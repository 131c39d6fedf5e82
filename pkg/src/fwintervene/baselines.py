"""Reference strategies compared against Frank-Wolfe at equal budget.

Every function accepts a :class:`WeightedGraph` or a :class:`GraphSequence`
and returns an :class:`InterventionResult` whose objective trace is
``[f(W), f(M)]`` at rank ``r``.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import ensure_sequence
from .optimizer import (
    BUDGET_RTOL,
    SvdOptions,
    _greedy,
    _scores,
    _svd,
    build_result,
    resolve_budget,
)

__all__ = [
    "uniform_reduction",
    "weighted_reduction",
    "k_edge_deletion",
    "top_k_ec_oneshot",
    "weighted_shares",
    "BASELINES",
]


def _split(flat, seq):
    out, lo = [], 0
    for g in seq:
        out.append(flat[lo:lo + g.edge_count])
        lo += g.edge_count
    return out


def uniform_reduction(g, budget, r: int = 1, opts: SvdOptions = SvdOptions()):
    """Scale every weight by ``1 - B / total``."""
    seq = ensure_sequence(g)
    total = seq.total_weight()
    B = resolve_budget(budget, total)
    c = 1.0 - B / total if total > 0 else 1.0
    weights = [s.weights * c for s in seq]
    return build_result(g, weights, B, r, "uniform", opts)


def weighted_shares(w, budget):
    """Reductions ``min(w, theta * w**2)`` with ``theta`` set so they sum to ``budget``.

    Found by repeatedly clamping edges whose share exceeds their weight and
    redistributing the rest; at most ``len(w)`` passes.
    """
    w = np.asarray(w, dtype=np.float64)
    red = np.zeros_like(w)
    if budget <= 0 or len(w) == 0:
        return red
    if budget >= math.fsum(w) * (1 - BUDGET_RTOL):
        return w.copy()
    active = w > 0
    remaining = float(budget)
    for _ in range(len(w)):
        sq = w[active] ** 2
        share = remaining * sq / math.fsum(sq)
        over = share >= w[active]
        if not over.any():
            red[active] = share
            break
        idx = np.flatnonzero(active)[over]
        red[idx] = w[idx]
        remaining -= math.fsum(w[idx])
        active[idx] = False
        if remaining <= 0 or not active.any():
            break
    return red


def weighted_reduction(g, budget, r: int = 1, opts: SvdOptions = SvdOptions()):
    """Reduce each edge in proportion to the square of its weight, clamped at the weight."""
    seq = ensure_sequence(g)
    B = resolve_budget(budget, seq.total_weight())
    flat = np.concatenate([s.weights for s in seq])
    m = flat - weighted_shares(flat, B)
    np.maximum(m, 0.0, out=m)
    return build_result(g, _split(m, seq), B, r, "weighted", opts)


def _oneshot(g, budget, score_rank, r, opts, name, skip_nonpositive=True):
    seq = ensure_sequence(g)
    B = resolve_budget(budget, seq.total_weight())
    ref = [s.weights for s in seq]
    fac = _svd(seq, ref, score_rank, opts.tol, opts.seed)
    target = _greedy(ref, _scores(seq, ref, score_rank, fac, opts), B, skip_nonpositive)
    return build_result(g, target, B, r, name, opts)


def k_edge_deletion(g, budget, r: int = 1, opts: SvdOptions = SvdOptions()):
    """Delete edges by rank-1 edge centrality of ``W``; the last one may be partial.

    Deletion continues past zero-score edges until the budget is spent.
    ``r`` only sets the rank at which the objective is reported.
    """
    return _oneshot(g, budget, 1, r, opts, "k_edge_deletion", skip_nonpositive=False)


def top_k_ec_oneshot(g, budget, r: int = 1, opts: SvdOptions = SvdOptions()):
    """One greedy pass with rank-``r`` scores of ``W`` itself."""
    return _oneshot(g, budget, r, r, opts, "top_k_ec")


BASELINES = {
    "uniform": uniform_reduction,
    "weighted": weighted_reduction,
    "k_edge_deletion": k_edge_deletion,
    "top_k_ec": top_k_ec_oneshot,
}
