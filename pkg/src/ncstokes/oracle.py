"""Desk-scale dense oracle: the full mixed saddle-point problem.

Solves for (u, p) in the full nonconforming velocity space (vector hats
psi_V[1,0], psi_V[0,1] over interior vertices) and the piecewise constant
pressure space with zero red and black means, imposing the two checkerboard
constraints through Lagrange multipliers and factoring the dense block system
with partially pivoted LU.  Everything is assembled from per-square local
linear data, independent of the stencil shortcut and the telescoping sweep, so
agreement with the fast pipeline validates both.
"""
from __future__ import annotations

import numpy as np

from .fields import NCVectorField, PiecewiseConstField, VERTEX_DIRS
from .mesh import SquareMesh
from .quadrature import square_moments

#: keep the dense system at desk scale
MAX_UNKNOWNS = 6000


def hat_gradient_tables(mesh: SquareMesh) -> tuple[np.ndarray, np.ndarray]:
    """Dense (n_interior_vertices, n_squares) tables of beta and gamma of every
    scalar hat psi_V, in units of 1/h.  psi_V restricted to a square having V
    in corner direction (sx, sy) is 1/2 + (sx xhat + sy yhat)/h."""
    nvi = mesh.n_interior_vertices
    nq = mesh.n_squares
    hb = np.zeros((nvi, nq))
    hg = np.zeros((nvi, nq))
    rows = np.arange(nvi)
    for k in range(4):
        sx, sy = VERTEX_DIRS[k]
        hb[rows, mesh.vertex_squares[:, k]] = sx
        hg[rows, mesh.vertex_squares[:, k]] = sy
    return hb, hg


def solve_mixed(
    mesh: SquareMesh,
    f,
    quad_order: int = 3,
    moments: np.ndarray | None = None,
) -> tuple[NCVectorField, PiecewiseConstField, np.ndarray]:
    """Solve the coupled velocity-pressure system densely.

    Returns (u, p, multipliers); the two multipliers enforce the zero color
    means and come back at rounding level for consistent data.  The load term
    shares the Gauss-Legendre moments of the fast pipeline so both discretize
    the same problem.
    """
    nvi = mesh.n_interior_vertices
    nq = mesh.n_squares
    n_unknowns = 2 * nvi + nq + 2
    if n_unknowns > MAX_UNKNOWNS:
        raise ValueError(
            f"mixed oracle limited to {MAX_UNKNOWNS} unknowns, got {n_unknowns}"
        )
    if moments is None:
        moments = square_moments(mesh, f, quad_order)
    h = mesh.h
    h2 = h * h

    hb, hg = hat_gradient_tables(mesh)  # 1/h units
    # scalar-hat stiffness (grad psi_V, grad psi_W): (1/h^2 units) * h^2
    s = hb @ hb.T + hg @ hg.T
    a = np.zeros((2 * nvi, 2 * nvi))
    a[:nvi, :nvi] = s
    a[nvi:, nvi:] = s

    # divergence rows: (q_Q, div v_j) = h^2 * (beta or gamma of the hat)/h
    b = np.zeros((nq, 2 * nvi))
    b[:, :nvi] = h * hb.T
    b[:, nvi:] = h * hg.T

    # load vector from the shared moments
    fvec = np.zeros(2 * nvi)
    for k in range(4):
        sx, sy = VERTEX_DIRS[k]
        m = moments[mesh.vertex_squares[:, k]]
        fvec[:nvi] += 0.5 * m[:, 0] + (sx / h) * m[:, 1] + (sy / h) * m[:, 2]
        fvec[nvi:] += 0.5 * m[:, 3] + (sx / h) * m[:, 4] + (sy / h) * m[:, 5]

    # checkerboard mean constraints
    c = np.zeros((2, nq))
    c[0, mesh.is_red] = h2
    c[1, ~mesh.is_red] = h2

    sys = np.zeros((n_unknowns, n_unknowns))
    rhs = np.zeros(n_unknowns)
    nu = 2 * nvi
    sys[:nu, :nu] = a
    sys[:nu, nu : nu + nq] = -b.T
    sys[nu : nu + nq, :nu] = b
    sys[nu : nu + nq, nu + nq :] = c.T
    sys[nu + nq :, nu : nu + nq] = c
    rhs[:nu] = fvec

    try:
        sol = np.linalg.solve(sys, rhs)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"mixed oracle system is singular: {exc}") from exc

    u = NCVectorField.from_coeffs(mesh, sol[:nvi], sol[nvi:nu])
    p = PiecewiseConstField(mesh, sol[nu : nu + nq])
    return u, p, sol[nu + nq :]


def divergence_matrix(mesh: SquareMesh) -> np.ndarray:
    """Dense matrix of div_h on the vector-hat basis: (n_squares, 2 n_iv).

    Column j holds the per-square divergence values of the j-th basis field
    (x hats first, then y hats).  Its rank is n_squares - 2 and its nullity
    the number of interior squares for every valid mesh.
    """
    hb, hg = hat_gradient_tables(mesh)
    d = np.zeros((mesh.n_squares, 2 * mesh.n_interior_vertices))
    d[:, : mesh.n_interior_vertices] = hb.T / mesh.h
    d[:, mesh.n_interior_vertices :] = hg.T / mesh.h
    return d


def brute_quadrature(g, mesh: SquareMesh, square, n: int) -> float:
    """Midpoint rule on an n-by-n subgrid of one square; `g(x, y)` vectorized."""
    sq = square if isinstance(square, (int, np.integer)) else mesh.square_index(square)
    i, j = mesh.square_pos[sq]
    h = mesh.h
    x0 = mesh.origin[0] + i * h
    y0 = mesh.origin[1] + j * h
    t = (np.arange(n) + 0.5) * (h / n)
    xs = x0 + t
    ys = y0 + t
    vals = g(xs[:, None], ys[None, :])
    return float(np.sum(vals) * (h / n) ** 2)
