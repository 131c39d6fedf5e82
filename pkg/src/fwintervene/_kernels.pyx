# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_kernels_py.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int8_t

cnp.import_array()

BACKEND = "cython"

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double _INV53 = 1.0 / 9007199254740992.0

SUSCEPTIBLE, EXPOSED, INFECTIOUS, RECOVERED = 0, 1, 2, 3
MODEL_SEIR, MODEL_SIR, MODEL_SIS = 0, 1, 2


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _key(uint64_t seed, uint64_t replica, uint64_t epoch) noexcept nogil:
    cdef uint64_t h = _mix(seed + _GOLDEN)
    h = _mix((h ^ replica) + _GOLDEN)
    return _mix((h ^ epoch) + _GOLDEN)


cdef inline double _uniform(uint64_t key, uint64_t node) noexcept nogil:
    return <double>(_mix((key ^ node) + _GOLDEN) >> 11) * _INV53


def hash_uniform(seed, replica, epoch, nodes):
    cdef const uint64_t[::1] nd = np.ascontiguousarray(nodes, dtype=np.uint64).ravel()
    cdef Py_ssize_t i, n = nd.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef uint64_t key = _key(<uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF),
                             <uint64_t>(int(replica) & 0xFFFFFFFFFFFFFFFF),
                             <uint64_t>(int(epoch) & 0xFFFFFFFFFFFFFFFF))
    with nogil:
        for i in range(n):
            o[i] = _uniform(key, nd[i])
    return out.reshape(np.shape(nodes))


def edge_scores(src, dst, left, right, lam):
    cdef const int64_t[::1] s = np.ascontiguousarray(src, dtype=np.int64)
    cdef const int64_t[::1] d = np.ascontiguousarray(dst, dtype=np.int64)
    cdef const double[:, ::1] L = np.ascontiguousarray(left, dtype=np.float64)
    cdef const double[:, ::1] Rt = np.ascontiguousarray(right, dtype=np.float64)
    cdef const double[::1] lm = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t e, k, m = s.shape[0], r = lm.shape[0]
    cdef double acc
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for e in range(m):
            acc = 0.0
            for k in range(r):
                acc = acc + (lm[k] * L[s[e], k]) * Rt[d[e], k]
            o[e] = 2.0 * acc
    return out


def greedy_reduction(order, ref, scores, double budget):
    cdef const int64_t[::1] o = np.ascontiguousarray(order, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(ref, dtype=np.float64)
    cdef const double[::1] sc = np.ascontiguousarray(scores, dtype=np.float64)
    red = np.zeros(w.shape[0], dtype=np.float64)
    cdef double[::1] rd = red
    cdef Py_ssize_t k, e, n = o.shape[0]
    cdef double cum = 0.0, nxt
    if budget <= 0.0:
        return red
    with nogil:
        for k in range(n):
            e = o[k]
            if sc[e] <= 0.0:
                break
            nxt = cum + w[e]
            if nxt > budget:
                rd[e] = budget - cum
                break
            rd[e] = w[e]
            cum = nxt
    return red


def run_graph_epidemic(indptr, indices, data, double beta, int model, states, replicas,
                       double inv_delta_e, double inv_delta_i, int epochs, seed):
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[::1] dat = np.ascontiguousarray(data, dtype=np.float64)
    cdef int8_t[:, ::1] st = states
    cdef const int64_t[::1] reps = np.ascontiguousarray(replicas, dtype=np.int64)
    cdef Py_ssize_t R = st.shape[0], n = st.shape[1], m = ix.shape[0]
    counts_a = np.zeros((R, epochs + 1, 4), dtype=np.int64)
    ever_a = np.zeros((R, epochs + 1), dtype=np.int64)
    cdef int64_t[:, :, ::1] counts = counts_a
    cdef int64_t[:, ::1] ever = ever_a
    factor_a = np.empty(m, dtype=np.float64)
    cdef double[::1] factor = factor_a
    cdef int8_t[::1] cur = np.empty(n, dtype=np.int8)
    cdef int8_t[::1] touched = np.empty(n, dtype=np.int8)
    cdef uint64_t useed = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t r, e, i, q
    cdef int64_t nev
    cdef int8_t s_to = 1 if model == 0 else 2
    cdef int8_t i_to = 0 if model == 2 else 3
    cdef double prod, u, f
    cdef uint64_t key
    with nogil:
        for q in range(m):
            f = 1.0 - dat[q] * beta
            factor[q] = f if f > 0.0 else 0.0
        for r in range(R):
            nev = 0
            for i in range(n):
                cur[i] = st[r, i]
                touched[i] = 1 if cur[i] != 0 else 0
                nev += touched[i]
                counts[r, 0, cur[i]] += 1
            ever[r, 0] = nev
            for e in range(epochs):
                key = _key(useed, <uint64_t>reps[r], <uint64_t>e)
                # cur holds state at e; st[r] receives state at e + 1
                for i in range(n):
                    u = _uniform(key, <uint64_t>i)
                    if cur[i] == 0:
                        prod = 1.0
                        for q in range(ip[i], ip[i + 1]):
                            if cur[ix[q]] == 2:
                                prod = prod * factor[q]
                        if ip[i + 1] > ip[i] and u < 1.0 - prod:
                            st[r, i] = s_to
                            if touched[i] == 0:
                                touched[i] = 1
                                nev += 1
                        else:
                            st[r, i] = 0
                    elif cur[i] == 1:
                        st[r, i] = 2 if u < inv_delta_e else 1
                    elif cur[i] == 2:
                        st[r, i] = i_to if u < inv_delta_i else 2
                    else:
                        st[r, i] = cur[i]
                for i in range(n):
                    cur[i] = st[r, i]
                    counts[r, e + 1, cur[i]] += 1
                ever[r, e + 1] = nev
    return counts_a, ever_a
