"""Reference kernels in NumPy / plain Python.

The elimination sweeps have loop-carried dependencies, so they run as
Python loops over lists of floats; the compiled extension provides the
same functions with C loops. Results must agree to roundoff.
"""

import numpy as np

from ..errors import NotSPDError, ShapeError


def factor_spd_tridiagonal(diag, off):
    """LDL^T-style factorization of a symmetric tridiagonal SPD matrix.

    diag has length n, off length n - 1. Returns (piv, sub): the pivots
    d_i and the unit subdiagonal multipliers l_i. Raises NotSPDError on
    a non-positive pivot.
    """
    d = np.asarray(diag, dtype=float).tolist()
    c = np.asarray(off, dtype=float).tolist()
    n = len(d)
    if len(c) != n - 1:
        raise ShapeError(f"off-diagonal length {len(c)} != n - 1 = {n - 1}")
    if n == 0:
        raise ShapeError("empty system")
    piv = [0.0] * n
    sub = [0.0] * (n - 1) if n > 1 else []
    dp = d[0]
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
    return np.asarray(piv), np.asarray(sub)


def _solve_single(piv, sub, b):
    n = len(b)
    y = [0.0] * n
    y[0] = b[0]
    for i in range(1, n):
        y[i] = b[i] - sub[i - 1] * y[i - 1]
    x = [y[i] / piv[i] for i in range(n)]
    for i in range(n - 2, -1, -1):
        x[i] -= sub[i] * x[i + 1]
    return x


def solve_factored(piv, sub, rhs):
    """Solve with a factorization from factor_spd_tridiagonal.

    rhs may be (n,) or (n, k); the result has the same shape.
    """
    piv_l = np.asarray(piv, dtype=float).tolist()
    sub_l = np.asarray(sub, dtype=float).tolist()
    b = np.asarray(rhs, dtype=float)
    n = len(piv_l)
    if b.shape[0] != n:
        raise ShapeError(f"rhs rows {b.shape[0]} != system size {n}")
    if b.ndim == 1:
        return np.asarray(_solve_single(piv_l, sub_l, b.tolist()))
    if b.ndim == 2:
        cols = [_solve_single(piv_l, sub_l, b[:, j].tolist())
                for j in range(b.shape[1])]
        return np.asarray(cols).T
    raise ShapeError(f"rhs must be 1- or 2-dimensional, got ndim={b.ndim}")


def tridiagonal_matvec(diag, off, x):
    """Product of a symmetric tridiagonal matrix with x ((n,) or (n, k))."""
    d = np.asarray(diag, dtype=float)
    c = np.asarray(off, dtype=float)
    v = np.asarray(x, dtype=float)
    n = d.shape[0]
    if c.shape[0] != n - 1:
        raise ShapeError(f"off-diagonal length {c.shape[0]} != n - 1 = {n - 1}")
    if v.shape[0] != n:
        raise ShapeError(f"vector rows {v.shape[0]} != system size {n}")
    if v.ndim == 1:
        y = d * v
        y[:-1] += c * v[1:]
        y[1:] += c * v[:-1]
        return y
    if v.ndim == 2:
        y = d[:, None] * v
        y[:-1] += c[:, None] * v[1:]
        y[1:] += c[:, None] * v[:-1]
        return y
    raise ShapeError(f"vector must be 1- or 2-dimensional, got ndim={v.ndim}")
