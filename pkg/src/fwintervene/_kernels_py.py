"""Pure numpy implementations of the hot kernels.

Each function here has a twin of the same name and signature in
``_kernels.pyx``. Both perform the same floating-point operations in the same
order, so results agree bit for bit; ``tests/test_kernels.py`` holds them to
that.
"""

import numpy as np

BACKEND = "python"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

SUSCEPTIBLE, EXPOSED, INFECTIOUS, RECOVERED = 0, 1, 2, 3
MODEL_SEIR, MODEL_SIR, MODEL_SIS = 0, 1, 2


def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def hash_uniform(seed, replica, epoch, nodes):
    """Counter-based uniforms in [0, 1) keyed by ``(seed, replica, epoch, node)``.

    A splitmix64 finalizer chain; no state is carried between calls, so the
    draw for a given key never depends on evaluation order.
    """
    nodes = np.asarray(nodes, dtype=np.uint64)
    h = np.full(nodes.shape, int(seed) & 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)
    h = _mix(h + _GOLDEN)
    h = _mix((h ^ np.uint64(int(replica) & 0xFFFFFFFFFFFFFFFF)) + _GOLDEN)
    h = _mix((h ^ np.uint64(int(epoch) & 0xFFFFFFFFFFFFFFFF)) + _GOLDEN)
    h = _mix((h ^ nodes) + _GOLDEN)
    return (h >> _S11).astype(np.float64) * _INV53


def edge_scores(src, dst, left, right, lam):
    """``2 * sum_k lam[k] * left[src, k] * right[dst, k]`` for every edge."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    out = np.zeros(len(src), dtype=np.float64)
    for k in range(len(lam)):
        out += (lam[k] * left[src, k]) * right[dst, k]
    return 2.0 * out


def greedy_reduction(order, ref, scores, budget):
    """Spend ``budget`` on edges in ``order`` while their score is positive.

    Edges are reduced to zero until the cumulative reference weight would
    exceed the budget; that boundary edge gets the remainder. Returns the
    per-edge reduction aligned with ``ref``.
    """
    order = np.asarray(order, dtype=np.int64)
    ref = np.asarray(ref, dtype=np.float64)
    scores = np.asarray(scores, dtype=np.float64)
    red = np.zeros(len(ref), dtype=np.float64)
    budget = float(budget)
    if budget <= 0.0 or len(order) == 0:
        return red
    positive = scores[order] > 0.0
    # order is sorted by descending score, so positives form a prefix
    npos = len(order) if positive.all() else int(np.argmin(positive))
    o = order[:npos]
    w = ref[o]
    cum = np.cumsum(w)
    k = int(np.searchsorted(cum, budget, side="right"))
    red[o[:k]] = w[:k]
    if k < npos:
        red[o[k]] = budget - (cum[k - 1] if k > 0 else 0.0)
    return red


def _infection_prob(indptr, indices, factor, infectious):
    # infectious: (R, n) bool -> p: (R, n)
    R, n = infectious.shape
    p = np.zeros((R, n), dtype=np.float64)
    nz = np.flatnonzero(np.diff(indptr) > 0)
    if len(nz) == 0:
        return p
    f = np.where(infectious[:, indices], factor[None, :], 1.0)
    prod = np.multiply.reduceat(f, indptr[nz], axis=1)
    p[:, nz] = 1.0 - prod
    return p


def run_graph_epidemic(indptr, indices, data, beta, model, states, replicas,
                       inv_delta_e, inv_delta_i, epochs, seed):
    """Discrete-time SEIR/SIR/SIS on a weighted graph, several replicas at once.

    ``states`` is an ``(R, n)`` int8 array of initial compartments (modified
    in place); ``replicas`` holds the replica index used to key the RNG for
    each row. Returns ``(counts, ever)`` with ``counts[r, e]`` the S/E/I/R
    totals after ``e`` epochs and ``ever[r, e]`` the number of nodes that
    have left S by then.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    factor = np.maximum(1.0 - np.asarray(data, dtype=np.float64) * beta, 0.0)
    R, n = states.shape
    counts = np.zeros((R, epochs + 1, 4), dtype=np.int64)
    ever = np.zeros((R, epochs + 1), dtype=np.int64)
    touched = states != SUSCEPTIBLE
    nodes = np.arange(n, dtype=np.uint64)
    chunk = max(1, 4_000_000 // max(len(indices), n, 1))
    for lo in range(0, R, chunk):
        hi = min(R, lo + chunk)
        st = states[lo:hi]
        tch = touched[lo:hi]
        for c in range(4):
            counts[lo:hi, 0, c] = (st == c).sum(axis=1)
        ever[lo:hi, 0] = tch.sum(axis=1)
        for e in range(epochs):
            p = _infection_prob(indptr, indices, factor, st == INFECTIOUS)
            u = np.stack([hash_uniform(seed, replicas[r], e, nodes) for r in range(lo, hi)])
            new = st.copy()
            s_mask = (st == SUSCEPTIBLE) & (u < p)
            new[s_mask] = EXPOSED if model == MODEL_SEIR else INFECTIOUS
            if model == MODEL_SEIR:
                new[(st == EXPOSED) & (u < inv_delta_e)] = INFECTIOUS
            leave = (st == INFECTIOUS) & (u < inv_delta_i)
            new[leave] = SUSCEPTIBLE if model == MODEL_SIS else RECOVERED
            tch |= s_mask
            st[...] = new
            for c in range(4):
                counts[lo:hi, e + 1, c] = (st == c).sum(axis=1)
            ever[lo:hi, e + 1] = tch.sum(axis=1)
    return counts, ever
