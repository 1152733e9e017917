# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the tridiagonal sweeps and matrix products.

Semantics must match langhom.backends._fallback exactly; the parity
tests compare both on random inputs.
"""

import numpy as np

cimport numpy as cnp

from ..errors import NotSPDError, ShapeError

cnp.import_array()


def factor_spd_tridiagonal(diag, off):
    """LDL^T-style factorization of a symmetric tridiagonal SPD matrix."""
    cdef cnp.ndarray[double, ndim=1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] c = np.ascontiguousarray(off, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0]
    if c.shape[0] != n - 1:
        raise ShapeError(f"off-diagonal length {c.shape[0]} != n - 1 = {n - 1}")
    if n == 0:
        raise ShapeError("empty system")
    cdef cnp.ndarray[double, ndim=1] piv = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] sub = np.empty(max(n - 1, 0), dtype=np.float64)
    cdef double dp = d[0]
    cdef double li, dn
    cdef Py_ssize_t i
    if dp <= 0.0:
        raise NotSPDError("pivot 0 is non-positive")
    piv[0] = dp
    for i in range(n - 1):
        li = c[i] / piv[i]
        sub[i] = li
        dn = d[i + 1] - li * c[i]
        if dn <= 0.0:
            raise NotSPDError(f"pivot {i + 1} is non-positive ({dn:.3e})")
        piv[i + 1] = dn
    return piv, sub


cdef void _solve_inplace(double[::1] piv, double[::1] sub, double[::1] x) noexcept nogil:
    cdef Py_ssize_t n = piv.shape[0]
    cdef Py_ssize_t i
    for i in range(1, n):
        x[i] -= sub[i - 1] * x[i - 1]
    for i in range(n):
        x[i] /= piv[i]
    for i in range(n - 2, -1, -1):
        x[i] -= sub[i] * x[i + 1]


def solve_factored(piv, sub, rhs):
    """Solve with a factorization from factor_spd_tridiagonal ((n,) or (n, k) rhs)."""
    cdef cnp.ndarray[double, ndim=1] p = np.ascontiguousarray(piv, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] s = np.ascontiguousarray(sub, dtype=np.float64)
    b = np.asarray(rhs, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    if b.shape[0] != n:
        raise ShapeError(f"rhs rows {b.shape[0]} != system size {n}")
    cdef cnp.ndarray[double, ndim=1] x1
    cdef cnp.ndarray[double, ndim=2] x2
    cdef Py_ssize_t j
    if b.ndim == 1:
        x1 = b.copy()
        _solve_inplace(p, s, x1)
        return x1
    if b.ndim == 2:
        # Column-major copy so each column is contiguous for the sweeps.
        x2 = np.array(b, dtype=np.float64, order="F", copy=True)
        for j in range(x2.shape[1]):
            _solve_inplace(p, s, x2[:, j])
        return np.ascontiguousarray(x2)
    raise ShapeError(f"rhs must be 1- or 2-dimensional, got ndim={b.ndim}")


def tridiagonal_matvec(diag, off, x):
    """Product of a symmetric tridiagonal matrix with x ((n,) or (n, k))."""
    cdef cnp.ndarray[double, ndim=1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] c = np.ascontiguousarray(off, dtype=np.float64)
    v = np.asarray(x, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0]
    if c.shape[0] != n - 1:
        raise ShapeError(f"off-diagonal length {c.shape[0]} != n - 1 = {n - 1}")
    if v.shape[0] != n:
        raise ShapeError(f"vector rows {v.shape[0]} != system size {n}")
    cdef cnp.ndarray[double, ndim=1] v1, y1
    cdef cnp.ndarray[double, ndim=2] v2, y2
    cdef Py_ssize_t i, j, k
    if v.ndim == 1:
        v1 = np.ascontiguousarray(v)
        y1 = np.empty(n, dtype=np.float64)
        for i in range(n):
            y1[i] = d[i] * v1[i]
        for i in range(n - 1):
            y1[i] += c[i] * v1[i + 1]
            y1[i + 1] += c[i] * v1[i]
        return y1
    if v.ndim == 2:
        v2 = np.ascontiguousarray(v)
        k = v2.shape[1]
        y2 = np.empty((n, k), dtype=np.float64)
        for i in range(n):
            for j in range(k):
                y2[i, j] = d[i] * v2[i, j]
        for i in range(n - 1):
            for j in range(k):
                y2[i, j] += c[i] * v2[i + 1, j]
                y2[i + 1, j] += c[i] * v2[i, j]
        return y2
    raise ShapeError(f"vector must be 1- or 2-dimensional, got ndim={v.ndim}")
