# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled enumeration kernels for the brute-force oracles.

Every kernel scans configuration indices ``start <= idx < stop`` of a
mixed-radix odometer (first digit most significant, i.e. lexicographic order)
and returns ``(best_value, best_index)``; the first minimum wins.
"""

import numpy as np

from libc.math cimport INFINITY


cdef inline void _decode(long long idx, Py_ssize_t[::1] digits, Py_ssize_t radix):
    cdef Py_ssize_t i
    for i in range(digits.shape[0] - 1, -1, -1):
        digits[i] = idx % radix
        idx //= radix


cdef inline void _advance(Py_ssize_t[::1] digits, Py_ssize_t radix):
    cdef Py_ssize_t i = digits.shape[0] - 1
    while i >= 0:
        digits[i] += 1
        if digits[i] < radix:
            return
        digits[i] = 0
        i -= 1


def enum_rank_tables(const int[:, ::1] perm_ranks, Py_ssize_t n_cells,
                     const int[::1] xs, const int[::1] ca, const int[::1] cb,
                     const double[::1] w, const double[::1] powtab,
                     long long start, long long stop):
    """Minimize ``sum_e w[e] * min(rank_ca[e](x_e), rank_cb[e](x_e))**rho``.

    Each of the ``n_cells`` cells picks one row of ``perm_ranks``.
    """
    cdef Py_ssize_t radix = perm_ranks.shape[0]
    cdef Py_ssize_t nnz = xs.shape[0]
    cdef Py_ssize_t[::1] digits = np.zeros(n_cells, dtype=np.intp)
    cdef long long idx, best_idx = -1
    cdef double total, best = INFINITY
    cdef Py_ssize_t e
    cdef int ra, rb
    _decode(start, digits, radix)
    for idx in range(start, stop):
        total = 0.0
        for e in range(nnz):
            ra = perm_ranks[digits[ca[e]], xs[e]]
            rb = perm_ranks[digits[cb[e]], xs[e]]
            if rb < ra:
                ra = rb
            total += w[e] * powtab[ra]
        if total < best:
            best = total
            best_idx = idx
        _advance(digits, radix)
    return best, best_idx


def enum_list_functions(const int[::1] ys, const double[::1] w, Py_ssize_t n_values,
                        Py_ssize_t y_size, const double[::1] powtab,
                        long long start, long long stop):
    """Minimize the list moment over maps from support points to ``0..n_values-1``."""
    cdef Py_ssize_t n_pts = ys.shape[0]
    cdef Py_ssize_t[::1] digits = np.zeros(n_pts, dtype=np.intp)
    cdef Py_ssize_t[::1] counts = np.zeros(y_size * n_values, dtype=np.intp)
    cdef long long idx, best_idx = -1
    cdef double total, best = INFINITY
    cdef Py_ssize_t p
    _decode(start, digits, n_values)
    for idx in range(start, stop):
        counts[:] = 0
        for p in range(n_pts):
            counts[ys[p] * n_values + digits[p]] += 1
        total = 0.0
        for p in range(n_pts):
            total += w[p] * powtab[counts[ys[p] * n_values + digits[p]]]
        if total < best:
            best = total
            best_idx = idx
        _advance(digits, n_values)
    return best, best_idx


def enum_sideinfo_functions(const int[::1] ys, const double[::1] w, Py_ssize_t n_values,
                            Py_ssize_t y_size, const double[::1] powtab,
                            long long start, long long stop):
    """Minimize the refined optimal moment over side-information maps.

    Points must be ordered by decreasing weight within each ``y`` so that
    counting arrivals per ``(y, z)`` yields the optimal rank.
    """
    cdef Py_ssize_t n_pts = ys.shape[0]
    cdef Py_ssize_t[::1] digits = np.zeros(n_pts, dtype=np.intp)
    cdef Py_ssize_t[::1] counts = np.zeros(y_size * n_values, dtype=np.intp)
    cdef long long idx, best_idx = -1
    cdef double total, best = INFINITY
    cdef Py_ssize_t p, k
    _decode(start, digits, n_values)
    for idx in range(start, stop):
        counts[:] = 0
        total = 0.0
        for p in range(n_pts):
            k = ys[p] * n_values + digits[p]
            counts[k] += 1
            total += w[p] * powtab[counts[k]]
        if total < best:
            best = total
            best_idx = idx
        _advance(digits, n_values)
    return best, best_idx
