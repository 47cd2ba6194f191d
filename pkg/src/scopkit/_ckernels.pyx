# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled order-theoretic kernels. Same contracts as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def transitive_closure(adjacency):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] r = np.array(adjacency, dtype=np.uint8, copy=True)
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t i, j, k
    cdef cnp.uint8_t[:, ::1] rv = r
    for i in range(n):
        rv[i, i] = 1
    for k in range(n):
        for i in range(n):
            if rv[i, k]:
                for j in range(n):
                    if rv[k, j]:
                        rv[i, j] = 1
    return r


def meet_table(leq):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] lq = np.ascontiguousarray(leq, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] L = lq
    cdef Py_ssize_t n = lq.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] down = lq.sum(axis=0, dtype=np.int64)
    cdef cnp.int64_t[::1] dv = down
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.full((n, n), -1, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] ov = out
    cdef Py_ssize_t a, b, x
    cdef Py_ssize_t best
    cdef cnp.int64_t best_size
    for a in range(n):
        for b in range(a, n):
            best = -1
            best_size = -1
            for x in range(n):
                if L[x, a] and L[x, b] and dv[x] > best_size:
                    best = x
                    best_size = dv[x]
            if best >= 0:
                for x in range(n):
                    if L[x, a] and L[x, b] and not L[x, best]:
                        best = -1
                        break
            ov[a, b] = best
            ov[b, a] = best
    return out
