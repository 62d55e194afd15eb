# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-counting kernels (quadratic count and merge-sort inversions)."""

import numpy as np


def net_concordance_quadratic(double[::1] x, double[::1] y):
    """Net concordant-minus-discordant count over all unordered pairs."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef long long net = 0
    cdef double dx, dy, prod
    for i in range(n - 1):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            prod = dx * dy
            if prod > 0.0:
                net += 1
            elif prod < 0.0:
                net -= 1
    return net


def discordant_by_merge(y_in_x_order):
    """Number of discordant pairs, given y values sorted by their x partner."""
    a = np.ascontiguousarray(y_in_x_order, dtype=np.float64).copy()
    work = np.empty_like(a)
    return _merge_count(a, work)


cdef long long _merge_count(double[::1] a, double[::1] work):
    cdef Py_ssize_t n = a.shape[0]
    cdef long long inv = 0
    cdef Py_ssize_t width = 1, start, mid, end, i, j, k
    cdef double[::1] src = a
    cdef double[::1] dst = work
    cdef double[::1] tmp
    cdef bint flipped = 0
    while width < n:
        start = 0
        while start < n:
            mid = start + width
            if mid > n:
                mid = n
            end = start + 2 * width
            if end > n:
                end = n
            i = start
            j = mid
            k = start
            while i < mid and j < end:
                if src[i] <= src[j]:
                    dst[k] = src[i]
                    i += 1
                else:
                    dst[k] = src[j]
                    j += 1
                    inv += mid - i
                k += 1
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < end:
                dst[k] = src[j]
                j += 1
                k += 1
            start = end
        tmp = src
        src = dst
        dst = tmp
        flipped = not flipped
        width *= 2
    return inv
