"""Pure-numpy reference kernels (the fallback backend)."""
from __future__ import annotations

import numpy as np


def csr_matvec(indptr, indices, data, x):
    n = len(indptr) - 1
    if n == 0:
        return np.zeros(0)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    return np.bincount(rows, weights=data * x[indices], minlength=n)


def pcg(indptr, indices, data, b, inv_diag, tol, max_iter):
    """Jacobi-preconditioned conjugate gradients on a CSR matrix.

    Returns (x, iterations, relative_residual, converged).  Convergence is
    ||b - A x|| / ||b|| <= tol measured on the recursively updated residual.
    """
    n = len(b)
    x = np.zeros(n)
    bnorm = float(np.linalg.norm(b))
    if n == 0 or bnorm == 0.0:
        return x, 0, 0.0, True
    rows = np.repeat(np.arange(n), np.diff(indptr))

    def mv(v):
        return np.bincount(rows, weights=data * v[indices], minlength=n)

    r = b.astype(np.float64).copy()
    z = r * inv_diag
    p = z.copy()
    rz = float(r @ z)
    relres = 1.0
    for it in range(1, max_iter + 1):
        ap = mv(p)
        pap = float(p @ ap)
        if pap <= 0.0:
            return x, it, relres, False
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        relres = float(np.linalg.norm(r)) / bnorm
        if relres <= tol:
            return x, it, relres, True
        z = r * inv_diag
        rz_new = float(r @ z)
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p
    return x, max_iter, relres, False


def path_sum(parents, r, order):
    """Sum of r along the root path of every tree node, by pointer doubling.

    `parents[i]` is the tree parent (roots point to themselves and carry
    r = 0); `order` is unused here, the doubling needs no topological order.
    """
    n = len(r)
    if n == 0:
        return np.zeros(0)
    val = np.asarray(r, dtype=np.float64).copy()
    ptr = np.asarray(parents, dtype=np.int64).copy()
    rounds = max(1, int(np.ceil(np.log2(max(n, 2)))) + 1)
    for _ in range(rounds):
        val += val[ptr]
        ptr = ptr[ptr]
    return val
