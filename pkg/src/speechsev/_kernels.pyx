# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for envelope construction and ratio averaging.

Each function mirrors one in ``_kernels_py`` and must produce identical
results; the arithmetic is written in the same operation order so the
interpolated values agree bit for bit.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

BACKEND = "compiled"


def block_extrema(const double[::1] x, Py_ssize_t block_size):
    """Per-block (max_pos, max_val, min_pos, min_val), first occurrence on ties."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t nblocks = n // block_size
    cdef Py_ssize_t b, i, start, stop, imax, imin
    cdef double vmax, vmin, v

    max_pos = np.empty(nblocks, dtype=np.int64)
    min_pos = np.empty(nblocks, dtype=np.int64)
    max_val = np.empty(nblocks, dtype=np.float64)
    min_val = np.empty(nblocks, dtype=np.float64)
    cdef cnp.int64_t[::1] pmax = max_pos
    cdef cnp.int64_t[::1] pmin = min_pos
    cdef double[::1] vmaxs = max_val
    cdef double[::1] vmins = min_val

    with nogil:
        for b in range(nblocks):
            start = b * block_size
            stop = start + block_size
            imax = start
            imin = start
            vmax = x[start]
            vmin = x[start]
            for i in range(start + 1, stop):
                v = x[i]
                if v > vmax:
                    vmax = v
                    imax = i
                elif v < vmin:
                    vmin = v
                    imin = i
            pmax[b] = imax
            pmin[b] = imin
            vmaxs[b] = vmax
            vmins[b] = vmin
    return max_pos, max_val, min_pos, min_val


def interpolate_anchors(const cnp.int64_t[::1] idx, const double[::1] val, Py_ssize_t length):
    """Piecewise-linear fill through (idx, val); constant hold outside the anchors."""
    cdef Py_ssize_t k = idx.shape[0]
    cdef Py_ssize_t a, n, i0, i1
    cdef double v0, v1, t, span
    out = np.empty(length, dtype=np.float64)
    cdef double[::1] y = out

    with nogil:
        i0 = idx[0]
        v0 = val[0]
        for n in range(0, i0):
            y[n] = v0
        for a in range(k - 1):
            i0 = idx[a]
            i1 = idx[a + 1]
            v0 = val[a]
            v1 = val[a + 1]
            span = <double>(i1 - i0)
            for n in range(i0, i1):
                t = <double>(n - i0) / span
                y[n] = v0 + t * (v1 - v0)
        i1 = idx[k - 1]
        v1 = val[k - 1]
        for n in range(i1, length):
            y[n] = v1
    return out


def masked_ratio_sum(const double[::1] subject, const double[::1] reference, double epsilon_rel):
    """Sum of |s|/|r| over samples with |r| >= epsilon_rel * max|r| (and |r| > 0)."""
    cdef Py_ssize_t n = reference.shape[0]
    cdef Py_ssize_t i, count = 0
    cdef double peak = 0.0, cutoff, r, total = 0.0

    with nogil:
        for i in range(n):
            r = fabs(reference[i])
            if r > peak:
                peak = r
        cutoff = epsilon_rel * peak
        for i in range(n):
            r = fabs(reference[i])
            if r >= cutoff and r > 0.0:
                total = total + fabs(subject[i]) / r
                count = count + 1
    return total, count
