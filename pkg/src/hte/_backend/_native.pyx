# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot kernels.

Semantics match `_ref` exactly: coordinate sums run in ascending axis order,
nearest-neighbor ties go to the smallest index, and empty smoothing windows
fall back to the nearest point's value.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def sqdist_matrix(object queries, object points):
    cdef const double[:, ::1] q = np.ascontiguousarray(queries, dtype=np.float64)
    cdef const double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t nq = q.shape[0], np_ = p.shape[0], d = q.shape[1]
    out_arr = np.empty((nq, np_))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double s, diff
    for i in range(nq):
        for j in range(np_):
            s = 0.0
            for k in range(d):
                diff = q[i, k] - p[j, k]
                s = s + diff * diff
            out[i, j] = s
    return out_arr


def match_nearest(object points_a, object points_b):
    cdef const double[:, ::1] a = np.ascontiguousarray(points_a, dtype=np.float64)
    cdef const double[:, ::1] b = np.ascontiguousarray(points_b, dtype=np.float64)
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], d = a.shape[1]
    d2_arr = np.empty(na)
    idx_arr = np.empty(na, dtype=np.int64)
    cdef double[::1] d2 = d2_arr
    cdef long long[::1] idx = idx_arr
    cdef Py_ssize_t i, j, k
    cdef double best, s, diff
    cdef Py_ssize_t best_j
    for i in range(na):
        best = -1.0
        best_j = -1
        for j in range(nb):
            s = 0.0
            for k in range(d):
                diff = a[i, k] - b[j, k]
                s = s + diff * diff
            if best_j < 0 or s < best:
                best = s
                best_j = j
        d2[i] = best
        idx[i] = best_j
    return d2_arr, idx_arr


def nw_smooth(object points, object values, object queries, double h, object coeffs):
    cdef const double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(queries, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t nq = q.shape[0], n = p.shape[0], d = p.shape[1], nc = c.shape[0]
    out_arr = np.empty(nq)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, k, m
    cdef double num, den, w, u, acc, best, s, diff
    cdef Py_ssize_t best_j
    for i in range(nq):
        num = 0.0
        den = 0.0
        for j in range(n):
            w = 1.0
            for k in range(d):
                u = (q[i, k] - p[j, k]) / h
                if u > 1.0 or u < -1.0:
                    w = 0.0
                    break
                acc = c[nc - 1]
                for m in range(nc - 2, -1, -1):
                    acc = acc * u + c[m]
                w = w * acc
            num = num + w * v[j]
            den = den + w
        if den < 1e-12 and den > -1e-12:
            best = -1.0
            best_j = -1
            for j in range(n):
                s = 0.0
                for k in range(d):
                    diff = q[i, k] - p[j, k]
                    s = s + diff * diff
                if best_j < 0 or s < best:
                    best = s
                    best_j = j
            out[i] = v[best_j]
        else:
            out[i] = num / den
    return out_arr
