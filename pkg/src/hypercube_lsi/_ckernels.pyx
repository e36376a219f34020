# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def fwht_inplace(double[::1] a):
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double x, y
    with nogil:
        while h < size:
            i = 0
            while i < size:
                for j in range(i, i + h):
                    x = a[j]
                    y = a[j + h]
                    a[j] = x + y
                    a[j + h] = x - y
                i += 2 * h
            h *= 2
    return np.asarray(a)


def heat_inplace(double[::1] a, double stay, double flip):
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double x, y
    with nogil:
        while h < size:
            i = 0
            while i < size:
                for j in range(i, i + h):
                    x = a[j]
                    y = a[j + h]
                    a[j] = stay * x + flip * y
                    a[j + h] = flip * x + stay * y
                i += 2 * h
            h *= 2
    return np.asarray(a)


def laplacian(double[::1] a):
    cdef Py_ssize_t size = a.shape[0]
    out_arr = np.zeros(size, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t h = 1, i, j
    cdef double d
    with nogil:
        while h < size:
            i = 0
            while i < size:
                for j in range(i, i + h):
                    d = a[j + h] - a[j]
                    out[j] += d
                    out[j + h] -= d
                i += 2 * h
            h *= 2
    return out_arr


def gf2_weight_profile(rows, int n):
    cdef uint64_t[::1] r = np.ascontiguousarray(rows, dtype=np.uint64)
    cdef int k = r.shape[0]
    best_arr = np.full(k + 1, n + 1, dtype=np.int64)
    cdef int64_t[::1] best = best_arr
    cdef uint64_t word = 0, g, prev = 0, m
    cdef uint64_t total = (<uint64_t>1) << k
    cdef int bit, cw, mw
    # Gray-code walk: consecutive messages differ in one bit.
    with nogil:
        best[0] = 0
        for m in range(1, total):
            g = m ^ (m >> 1)
            bit = __builtin_popcountll((g ^ prev) - 1)
            word ^= r[bit]
            prev = g
            cw = __builtin_popcountll(word)
            mw = __builtin_popcountll(g)
            if cw < best[mw]:
                best[mw] = cw
    return best_arr
