"""Explicit pressure recovery by telescoping over each checkerboard color.

Given the divergence-free velocity u_h, the pressure is the piecewise constant
p_h with zero red and black means satisfying

    (p_h, div_h v) = (grad u_h, grad v)_h - (f, v)   for all test fields v.

Stepping between two same-color squares Q -> Q' that share an interior vertex
V, the vector hat w = psi_V[a, b] with a, b in {+-h/2} can be chosen so that
div_h w is +1 on Q', -1 on Q, and 0 elsewhere; the defining relation then
telescopes to

    p(Q') = p(Q) + [ (grad u_h, grad w)_h - (f, w) ] / h^2.

A breadth-first sweep from one anchor per color fixes a raw pressure p_hat up
to one constant per color; subtracting the red/black means yields p_h.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backends import get_backend
from .fields import (
    NCVectorField,
    PiecewiseConstField,
    VERTEX_DIRS,
    vector_local_data,
)
from .mesh import BLACK, RED, SquareMesh, color_bfs_tree
from .quadrature import square_moments

#: div_h of psi_V[1,0] and psi_V[0,1] on the squares Q1..Q4 around V, in
#: units of 1/h (columns follow mesh.vertex_squares order)
DIV_X = np.array([-1.0, 1.0, 1.0, -1.0])
DIV_Y = np.array([-1.0, -1.0, 1.0, 1.0])


@dataclass(frozen=True)
class PressureField:
    """Recovered pressure with its raw sweep data.

    `pressure` is the final zero-mean-per-color field; `raw` the anchored
    sweep result p_hat with p_hat(anchor) = 0 per color; `d_red`/`d_black`
    the subtracted color means; `anchors` the (red, black) anchor square ids.
    """

    pressure: PiecewiseConstField
    raw: PiecewiseConstField
    d_red: float
    d_black: float
    anchors: tuple[int, int]

    @property
    def mesh(self) -> SquareMesh:
        return self.pressure.mesh

    @property
    def values(self) -> np.ndarray:
        return self.pressure.values

    def anchor_values(self) -> tuple[float, float]:
        """Final pressure at the anchors (the constants the sweep pinned to zero)."""
        return (-self.d_red, -self.d_black)


def hat_residuals(
    mesh: SquareMesh,
    u_h: NCVectorField,
    moments: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Residual functional of the momentum equation on every vector hat.

    Returns arrays (R1, R2) over interior vertices V with
    R1[V] = (grad u_h, grad psi_V[1,0])_h - (f, psi_V[1,0]) and R2 the same
    for psi_V[0,1]; residuals for general psi_V[a, b] follow by linearity.
    `moments` are the per-square f moments from `square_moments`.
    """
    lx, ly = vector_local_data(u_h)
    h = mesh.h
    nvi = mesh.n_interior_vertices
    r1 = np.zeros(nvi)
    r2 = np.zeros(nvi)
    if nvi == 0:
        return r1, r2
    for k in range(4):
        squares = mesh.vertex_squares[:, k]
        sx, sy = VERTEX_DIRS[k]
        m = moments[squares]
        # grad psi_V on that square is (sx, sy)/h per unit coefficient;
        # (grad u, grad psi) over the square = h^2 * (beta*sx + gamma*sy)/h
        r1 += h * (lx[squares, 1] * sx + lx[squares, 2] * sy)
        r1 -= 0.5 * m[:, 0] + (sx / h) * m[:, 1] + (sy / h) * m[:, 2]
        r2 += h * (ly[squares, 1] * sx + ly[squares, 2] * sy)
        r2 -= 0.5 * m[:, 3] + (sx / h) * m[:, 4] + (sy / h) * m[:, 5]
    return r1, r2


def residual(
    u_h: NCVectorField,
    f,
    v: NCVectorField,
    quad_order: int = 3,
    moments: np.ndarray | None = None,
) -> float:
    """(grad u_h, grad v)_h - (f, v) for an arbitrary test field v.

    The gradient term is exact (piecewise linear fields); the load term uses
    the same Gauss-Legendre order as load assembly so that residuals of
    solved velocities vanish to solver tolerance on divergence-free fields.
    """
    mesh = u_h.mesh
    if v.mesh is not mesh:
        raise ValueError("fields live on different meshes")
    if moments is None:
        moments = square_moments(mesh, f, quad_order)
    ux, uy = vector_local_data(u_h)
    vx, vy = vector_local_data(v)
    h2 = mesh.h * mesh.h
    grad = h2 * (
        ux[:, 1] @ vx[:, 1] + ux[:, 2] @ vx[:, 2]
        + uy[:, 1] @ vy[:, 1] + uy[:, 2] @ vy[:, 2]
    )
    load = (
        vx[:, 0] @ moments[:, 0] + vx[:, 1] @ moments[:, 1] + vx[:, 2] @ moments[:, 2]
        + vy[:, 0] @ moments[:, 3] + vy[:, 1] @ moments[:, 4] + vy[:, 2] @ moments[:, 5]
    )
    return float(grad - load)


def recover_pressure(
    mesh: SquareMesh,
    u_h: NCVectorField,
    f,
    anchors: tuple[int | None, int | None] | None = None,
    quad_order: int = 3,
    moments: np.ndarray | None = None,
    backend=None,
) -> PressureField:
    """Telescoping pressure sweep; anchors default to each color's lowest square id."""
    if u_h.mesh is not mesh:
        raise ValueError("velocity lives on a different mesh")
    if moments is None:
        moments = square_moments(mesh, f, quad_order)
    be = backend or get_backend()
    r1, r2 = hat_residuals(mesh, u_h, moments)
    h = mesh.h
    iv = mesh.iv_id
    pos = mesh.square_pos
    p_hat = np.zeros(mesh.n_squares)
    anchor_ids = []
    for color, anchor in zip((RED, BLACK), anchors or (None, None)):
        nodes, order, parents = color_bfs_tree(mesh, color, anchor)
        anchor_ids.append(int(nodes[order[0]]) if len(order) else -1)
        children = order[1:]
        steps = np.zeros(len(nodes))
        if len(children):
            par = parents[children]
            dij = pos[nodes[children]] - pos[nodes[par]]
            vx = pos[nodes[par], 0] + (dij[:, 0] + 1) // 2
            vy = pos[nodes[par], 1] + (dij[:, 1] + 1) // 2
            shared = iv[vy, vx]
            if (shared < 0).any():
                raise RuntimeError("tree step across a non-interior vertex")
            # w = psi_V[a, b] with (a, b) = -(h/2) * (di, dj) gives
            # div_h w = +1 on the child and -1 on the parent
            steps[children] = (
                -dij[:, 0] * r1[shared] - dij[:, 1] * r2[shared]
            ) / (2.0 * h)
        p_hat[nodes] = be.path_sum(parents, steps, order)

    raw = p_hat.copy()
    red = mesh.is_red
    d_red = float(p_hat[red].mean()) if red.any() else 0.0
    d_black = float(p_hat[~red].mean()) if (~red).any() else 0.0
    p = p_hat - np.where(red, d_red, d_black)
    return PressureField(
        pressure=PiecewiseConstField(mesh, p),
        raw=PiecewiseConstField(mesh, raw),
        d_red=d_red,
        d_black=d_black,
        anchors=(anchor_ids[0], anchor_ids[1]),
    )


def momentum_residuals(
    mesh: SquareMesh,
    u_h: NCVectorField,
    p: PiecewiseConstField,
    f,
    quad_order: int = 3,
    moments: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Defining-equation residuals over every vector hat.

    Returns (lhs1, rhs1, lhs2, rhs2) with lhs_i = (p, div_h psi_V[e_i]) and
    rhs_i the corresponding hat residual of u_h, so the recovered pressure is
    verified by max|lhs - rhs| being at solver tolerance.
    """
    if moments is None:
        moments = square_moments(mesh, f, quad_order)
    r1, r2 = hat_residuals(mesh, u_h, moments)
    h = mesh.h
    nvi = mesh.n_interior_vertices
    lhs1 = np.zeros(nvi)
    lhs2 = np.zeros(nvi)
    for k in range(4):
        pv = p.values[mesh.vertex_squares[:, k]]
        lhs1 += h * DIV_X[k] * pv
        lhs2 += h * DIV_Y[k] * pv
    return lhs1, r1, lhs2, r2
