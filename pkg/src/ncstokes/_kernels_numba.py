"""Numba-compiled hot kernels; signatures mirror _kernels_numpy."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def csr_matvec(indptr, indices, data, x):
    n = len(indptr) - 1
    y = np.zeros(n)
    for i in range(n):
        s = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            s += data[k] * x[indices[k]]
        y[i] = s
    return y


@njit(cache=True)
def pcg(indptr, indices, data, b, inv_diag, tol, max_iter):
    n = len(b)
    x = np.zeros(n)
    bnorm = 0.0
    for i in range(n):
        bnorm += b[i] * b[i]
    bnorm = np.sqrt(bnorm)
    if n == 0 or bnorm == 0.0:
        return x, 0, 0.0, True
    r = b.copy()
    z = r * inv_diag
    p = z.copy()
    rz = 0.0
    for i in range(n):
        rz += r[i] * z[i]
    relres = 1.0
    ap = np.zeros(n)
    for it in range(1, max_iter + 1):
        pap = 0.0
        for i in range(n):
            s = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                s += data[k] * p[indices[k]]
            ap[i] = s
            pap += p[i] * s
        if pap <= 0.0:
            return x, it, relres, False
        alpha = rz / pap
        rnorm = 0.0
        for i in range(n):
            x[i] += alpha * p[i]
            r[i] -= alpha * ap[i]
            rnorm += r[i] * r[i]
        relres = np.sqrt(rnorm) / bnorm
        if relres <= tol:
            return x, it, relres, True
        rz_new = 0.0
        for i in range(n):
            z[i] = r[i] * inv_diag[i]
            rz_new += r[i] * z[i]
        beta = rz_new / rz
        rz = rz_new
        for i in range(n):
            p[i] = z[i] + beta * p[i]
    return x, max_iter, relres, False


@njit(cache=True)
def path_sum(parents, r, order):
    out = np.zeros(len(r))
    for k in range(len(order)):
        i = order[k]
        out[i] = out[parents[i]] + r[i]
    return out
