"""Tensor Gauss-Legendre quadrature on mesh squares."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_1d(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1]."""
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def square_rule(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor rule on the reference square [-1/2, 1/2]^2.

    Returns (xhat, yhat, weights) as flat arrays of length order**2; the
    weights sum to 1.  Scale offsets by h and weights by h**2 to integrate
    over a mesh square with center-relative coordinates.
    """
    x, w = gauss_1d(order)
    xh = np.repeat(0.5 * x, order)
    yh = np.tile(0.5 * x, order)
    ww = np.repeat(0.5 * w, order) * np.tile(0.5 * w, order)
    for a in (xh, yh, ww):
        a.setflags(write=False)
    return xh, yh, ww


def square_moments(mesh, f, order: int, chunk: int = 1 << 15) -> np.ndarray:
    """Per-square moments of a vector function against the local linear basis.

    For every mesh square S with center c returns the six integrals

        [ (f_x, 1)_S, (f_x, xhat)_S, (f_x, yhat)_S,
          (f_y, 1)_S, (f_y, xhat)_S, (f_y, yhat)_S ]

    with xhat, yhat relative to c, approximated by the tensor Gauss-Legendre
    rule of the given order.  `f` maps coordinate arrays (x, y) to a pair of
    arrays (f_x, f_y).  Work is chunked so large meshes stay within memory.
    """
    xh, yh, ww = square_rule(order)
    h = mesh.h
    centers = mesh.centers()
    n = mesh.n_squares
    out = np.empty((n, 6))
    wq = ww * h * h
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        cx = centers[lo:hi, 0:1]
        cy = centers[lo:hi, 1:2]
        xq = cx + h * xh[None, :]
        yq = cy + h * yh[None, :]
        fx, fy = f(xq, yq)
        fxw = fx * wq
        fyw = fy * wq
        out[lo:hi, 0] = fxw.sum(axis=1)
        out[lo:hi, 1] = fxw @ (h * xh)
        out[lo:hi, 2] = fxw @ (h * yh)
        out[lo:hi, 3] = fyw.sum(axis=1)
        out[lo:hi, 4] = fyw @ (h * xh)
        out[lo:hi, 5] = fyw @ (h * yh)
    return out
