# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


def walk_ends(perms, starts, labels):
    cdef const int64_t[:, ::1] P = np.ascontiguousarray(perms, dtype=np.int64)
    cdef const int64_t[::1] S = np.ascontiguousarray(starts, dtype=np.int64)
    cdef const int64_t[:, ::1] L = np.ascontiguousarray(labels, dtype=np.int64).reshape(S.shape[0], -1)
    out = np.empty(S.shape[0], dtype=np.int64)
    cdef int64_t[::1] O = out
    cdef Py_ssize_t i, j, K = S.shape[0], ell = L.shape[1]
    cdef int64_t v
    for i in range(K):
        v = S[i]
        for j in range(ell):
            v = P[L[i, j], v]
        O[i] = v
    return out


cdef void _dfs(const int64_t[:, ::1] P, int64_t[:, ::1] buf, int64_t[::1] best,
               Py_ssize_t depth, Py_ssize_t length, Py_ssize_t free) nogil:
    cdef Py_ssize_t d = P.shape[0], N = P.shape[1], t, u
    cdef int64_t total, acc, diff
    if depth == length:
        total = 0
        for u in range(N):
            total += buf[depth, u]
        acc = 0
        for u in range(N):
            diff = N * buf[depth, u] - total
            acc += diff if diff >= 0 else -diff
        if acc > best[free]:
            best[free] = acc
        return
    for t in range(d):
        for u in range(N):
            buf[depth + 1, P[t, u]] = buf[depth, u]
        _dfs(P, buf, best, depth + 1, length, free)
    for u in range(N):
        buf[depth + 1, u] = 0
    for t in range(d):
        for u in range(N):
            buf[depth + 1, P[t, u]] += buf[depth, u]
    _dfs(P, buf, best, depth + 1, length, free + 1)


def sf_walk_dfs(perms, c0, Py_ssize_t length):
    cdef const int64_t[:, ::1] P = np.ascontiguousarray(perms, dtype=np.int64)
    buf_arr = np.zeros((length + 1, P.shape[1]), dtype=np.int64)
    buf_arr[0] = np.asarray(c0, dtype=np.int64)
    cdef int64_t[:, ::1] buf = buf_arr
    best_arr = np.full(length + 1, -1, dtype=np.int64)
    cdef int64_t[::1] best = best_arr
    with nogil:
        _dfs(P, buf, best, 0, length, 0)
    return best_arr


cdef inline uint64_t _parity(uint64_t v) nogil:
    return __builtin_popcountll(v) & 1


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def gf2_apply(rows, xs):
    cdef const uint64_t[::1] R = np.ascontiguousarray(np.asarray(rows, dtype=np.uint64).reshape(-1))
    cdef const uint64_t[::1] X = np.ascontiguousarray(xs, dtype=np.uint64).reshape(-1)
    out = np.empty(X.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] O = out
    cdef Py_ssize_t i, j, K = X.shape[0], m = R.shape[0]
    cdef uint64_t acc, x
    with nogil:
        for i in range(K):
            x = X[i]
            acc = 0
            for j in range(m):
                acc = (acc << 1) | _parity(x & R[j])
            O[i] = acc
    return out.reshape(np.shape(xs))


def coset_histograms(table, elems, reps, Py_ssize_t nout):
    cdef const int64_t[::1] T = np.ascontiguousarray(table, dtype=np.int64)
    cdef const int64_t[:, ::1] E = np.ascontiguousarray(elems, dtype=np.int64)
    cdef const int64_t[::1] Rp = np.ascontiguousarray(reps, dtype=np.int64)
    cdef Py_ssize_t S = E.shape[0], Pn = E.shape[1], Rn = Rp.shape[0]
    out = np.zeros((S * Rn, nout), dtype=np.int64)
    cdef int64_t[:, ::1] H = out
    cdef Py_ssize_t s, r, p, row
    cdef int64_t rep
    with nogil:
        for s in range(S):
            for r in range(Rn):
                row = s * Rn + r
                rep = Rp[r]
                for p in range(Pn):
                    H[row, T[E[s, p] ^ rep]] += 1
    return out
