"""NumPy reference implementations of the hot kernels.

These are the semantics the compiled backend must reproduce:

- squared distances accumulate coordinate-wise in ascending axis order;
- nearest-neighbor ties resolve to the smallest index;
- the smoothing fallback (empty kernel window) returns the value at the
  nearest point.
"""

import numpy as np

_QUERY_BLOCK = 256


def sqdist_matrix(queries, points):
    """Squared Euclidean distances, shape (len(queries), len(points))."""
    q = np.asarray(queries, dtype=float)
    p = np.asarray(points, dtype=float)
    out = np.empty((q.shape[0], p.shape[0]))
    for lo in range(0, q.shape[0], _QUERY_BLOCK):
        hi = min(lo + _QUERY_BLOCK, q.shape[0])
        diff = q[lo:hi, None, :] - p[None, :, :]
        out[lo:hi] = (diff * diff).sum(axis=-1)
    return out

def match_nearest(points_a, points_b):
    """For each row of `points_a`, the squared distance to and index of its
    nearest neighbor in `points_b` (ties to the smallest index)."""
    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    n = a.shape[0]
    d2 = np.empty(n)
    idx = np.empty(n, dtype=np.int64)
    for lo in range(0, n, _QUERY_BLOCK):
        hi = min(lo + _QUERY_BLOCK, n)
        block = sqdist_matrix(a[lo:hi], b)
        idx[lo:hi] = block.argmin(axis=1)
        d2[lo:hi] = block[np.arange(hi - lo), idx[lo:hi]]
    return d2, idx


def _poly_factor(u, coeffs):
    # Horner evaluation of the 1-d kernel factor, zero outside |u| <= 1.
    acc = np.full(u.shape, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * u + c
    return np.where(np.abs(u) <= 1.0, acc, 0.0)


def nw_smooth(points, values, queries, h, coeffs):
    """Nadaraya-Watson estimate at each query with a product kernel.

    `coeffs` are ascending power coefficients of the 1-d kernel factor
    supported on [-1, 1]. Queries whose kernel window is empty (denominator
    vanishes) fall back to the value at the nearest point.
    """
    p = np.asarray(points, dtype=float)
    v = np.asarray(values, dtype=float)
    q = np.asarray(queries, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    out = np.empty(q.shape[0])
    for lo in range(0, q.shape[0], _QUERY_BLOCK):
        hi = min(lo + _QUERY_BLOCK, q.shape[0])
        u = (q[lo:hi, None, :] - p[None, :, :]) / h
        k = _poly_factor(u, coeffs).prod(axis=-1)
        den = k.sum(axis=1)
        num = k @ v
        empty = np.abs(den) < 1e-12
        if np.any(empty):
            d2 = sqdist_matrix(q[lo:hi][empty], p)
            nearest = d2.argmin(axis=1)
            den[empty] = 1.0
            num[empty] = v[nearest]
        out[lo:hi] = num / den
    return out
