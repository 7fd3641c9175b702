# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference implementations."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def first_entering_column(const double[:, ::1] ymat, int d, double tol, long start=1):
    """Smallest index p >= start with sum_{i<=j, p_i=p_j=1} ymat[i, j] > tol, else -1."""
    cdef long p, stop = (<long>1) << d
    cdef int i, j, nb
    cdef int bits[64]
    cdef double s
    for p in range(start, stop):
        nb = 0
        for i in range(d):
            if (p >> i) & 1:
                bits[nb] = i
                nb += 1
        s = 0.0
        for i in range(nb):
            for j in range(i, nb):
                s += ymat[bits[i], bits[j]]
        if s > tol:
            return p
    return -1


def coexceedance_counts(const cnp.int64_t[:, ::1] ranks, long k):
    """counts[i, j] = #{t : ranks[t, i] <= k and ranks[t, j] <= k}."""
    cdef Py_ssize_t n = ranks.shape[0], d = ranks.shape[1]
    cdef Py_ssize_t t, i, j, nb
    cdef cnp.int64_t[:, ::1] counts = np.zeros((d, d), dtype=np.int64)
    cdef Py_ssize_t[64] hit
    for t in range(n):
        nb = 0
        for i in range(d):
            if ranks[t, i] <= k:
                hit[nb] = i
                nb += 1
        for i in range(nb):
            for j in range(nb):
                counts[hit[i], hit[j]] += 1
    return np.asarray(counts)
