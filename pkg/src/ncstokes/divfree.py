"""Locally divergence-free velocity basis and its checkerboard systems.

For every interior square Q the field

    Psi_Q = psi_{V_rt}[1/2, -1/2] + psi_{V_lt}[1/2, 1/2]
          + psi_{V_lb}[-1/2, 1/2] + psi_{V_rb}[-1/2, -1/2]

(corner vertices of Q, psi_V[a, b] = (a psi_V, b psi_V)) has piecewise
divergence identically zero and piecewise curl -4/h on Q and 1/h on the four
diagonal neighbors.  Gradients of two such fields therefore interact only when
their squares share a color of the checkerboard, and the stiffness entries are
independent of h: 20 on the diagonal, -8 at offsets (+-1, +-1), 2 at
(+-2, 0), (0, +-2), and 1 at (+-2, +-2).  The velocity problem splits into two
decoupled SPD systems, one per color.
"""
from __future__ import annotations

import numpy as np

from .fields import NCVectorField
from .mesh import RED, SquareMesh
from .quadrature import square_moments
from .spmatrix import SparseSpdMatrix, csr_from_coo

#: (a, b) weights of the four corner hats, keyed by corner offsets relative to
#: the square's lower-left vertex: (di, dj) in {0, 1}^2.
CORNER_WEIGHTS = {
    (1, 1): (0.5, -0.5),   # right-top
    (0, 1): (0.5, 0.5),    # left-top
    (0, 0): (-0.5, 0.5),   # left-bottom
    (1, 0): (-0.5, -0.5),  # right-bottom
}

#: 13-point stencil of the per-color stiffness: offset (di, dj) -> value.
STENCIL: dict[tuple[int, int], float] = {(0, 0): 20.0}
for _d in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
    STENCIL[_d] = -8.0
for _d in ((2, 0), (-2, 0), (0, 2), (0, -2)):
    STENCIL[_d] = 2.0
for _d in ((2, 2), (2, -2), (-2, 2), (-2, -2)):
    STENCIL[_d] = 1.0

STENCIL_OFFSETS = np.array(sorted(STENCIL), dtype=np.int64)
STENCIL_VALUES = np.array([STENCIL[tuple(o)] for o in STENCIL_OFFSETS])

#: support patch of Psi_Q: the 3x3 block of squares around Q
PATCH_OFFSETS = np.array(
    [(di, dj) for dj in (-1, 0, 1) for di in (-1, 0, 1)], dtype=np.int64
)


def _patch_tables() -> np.ndarray:
    """Local linear data of Psi_Q on its 9-square patch.

    Returns a (9, 6) array of [ax, bx, gx, ay, by, gy] per patch square in
    PATCH_OFFSETS order, with the beta/gamma entries in units of 1/h (the
    alphas are h-independent).  Derived by accumulating the four corner hats:
    hat psi_V restricted to a square having V in corner direction (sx, sy)
    from its center is 1/2 + (sx xhat + sy yhat)/h.
    """
    out = np.zeros((9, 6))
    for k, (di, dj) in enumerate(PATCH_OFFSETS):
        for (ci, cj), (a, b) in CORNER_WEIGHTS.items():
            # corner vertex (ci, cj) of Q belongs to patch square (di, dj)
            # iff the offset keeps the vertex on the square
            if ci - di not in (0, 1) or cj - dj not in (0, 1):
                continue
            sx = 2 * (ci - di) - 1
            sy = 2 * (cj - dj) - 1
            out[k, 0] += a / 2.0
            out[k, 1] += a * sx
            out[k, 2] += a * sy
            out[k, 3] += b / 2.0
            out[k, 4] += b * sx
            out[k, 5] += b * sy
    out.setflags(write=False)
    return out


PATCH_LOCALS = _patch_tables()


def basis_function(mesh: SquareMesh, square) -> NCVectorField:
    """The divergence-free field Psi_Q of one interior square."""
    sq = square if isinstance(square, (int, np.integer)) else mesh.square_index(square)
    if not mesh.square_interior[sq]:
        raise ValueError(f"square {tuple(mesh.square_pos[sq])} is not interior")
    cx = np.zeros(mesh.n_interior_vertices)
    cy = np.zeros(mesh.n_interior_vertices)
    i, j = mesh.square_pos[sq]
    for (ci, cj), (a, b) in CORNER_WEIGHTS.items():
        k = mesh.iv_id[j + cj, i + ci]
        cx[k] += a
        cy[k] += b
    return NCVectorField.from_coeffs(mesh, cx, cy)


class DivFreeCoefficients:
    """Coefficients of a field in span{Psi_Q}, one per interior square.

    Values align with `mesh.interior_square_ids`; the red/black blocks are the
    sub-vectors selected by `mesh.interior_red_mask`.
    """

    def __init__(self, mesh: SquareMesh, values: np.ndarray):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != (mesh.n_interior_squares,):
            raise ValueError(
                f"expected {mesh.n_interior_squares} coefficients, got {values.shape}"
            )
        self.mesh = mesh
        self.values = values

    @classmethod
    def zeros(cls, mesh: SquareMesh) -> "DivFreeCoefficients":
        return cls(mesh, np.zeros(mesh.n_interior_squares))

    @classmethod
    def from_color_blocks(
        cls, mesh: SquareMesh, red: np.ndarray, black: np.ndarray
    ) -> "DivFreeCoefficients":
        values = np.zeros(mesh.n_interior_squares)
        values[mesh.interior_red_mask] = red
        values[~mesh.interior_red_mask] = black
        return cls(mesh, values)

    def color_block(self, color: int) -> np.ndarray:
        mask = self.mesh.interior_red_mask
        return self.values[mask] if color == RED else self.values[~mask]


def expand(coeffs: DivFreeCoefficients) -> NCVectorField:
    """Superpose the basis fields into interior-vertex coefficient form."""
    mesh = coeffs.mesh
    nvi = mesh.n_interior_vertices
    cx = np.zeros(nvi)
    cy = np.zeros(nvi)
    if mesh.n_interior_squares == 0:
        return NCVectorField.from_coeffs(mesh, cx, cy)
    corners = mesh.square_corner_iv[mesh.interior_square_ids]  # [lb, rb, lt, rt]
    half = coeffs.values / 2.0
    # corner order [lb, rb, lt, rt] with hat weights (a, b):
    #   lb (-1/2, 1/2), rb (-1/2, -1/2), lt (1/2, 1/2), rt (1/2, -1/2)
    for col, (wa, wb) in zip(range(4), ((-1, 1), (-1, -1), (1, 1), (1, -1))):
        cx += np.bincount(corners[:, col], weights=wa * half, minlength=nvi)
        cy += np.bincount(corners[:, col], weights=wb * half, minlength=nvi)
    return NCVectorField.from_coeffs(mesh, cx, cy)


def stencil_entry(offset: tuple[int, int]) -> float:
    """Stiffness entry for two basis squares at the given lattice offset (0 off-stencil)."""
    return STENCIL.get(offset, 0.0)


def assemble_stiffness(mesh: SquareMesh, color: int) -> SparseSpdMatrix:
    """Stiffness matrix of one color block, assembled from the 13-point stencil.

    Rows and columns follow the interior squares of the color in square-id
    order.  Entries only connect same-color interior squares, so the stencil
    restricted to existing neighbors is the whole matrix; values are exact
    integers and h-independent.
    """
    mask = mesh.interior_red_mask if color == RED else ~mesh.interior_red_mask
    ids = mesh.interior_square_ids[mask]
    n = len(ids)
    if n == 0:
        return SparseSpdMatrix(0, np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))
    local = np.full(mesh.n_squares, -1, dtype=np.int64)
    local[ids] = np.arange(n)
    interior = mesh.square_interior
    rows, cols, vals = [], [], []
    for (di, dj), value in STENCIL.items():
        nbr = mesh.squares_at_offset(di, dj)[ids]
        valid = (nbr >= 0) & interior[np.maximum(nbr, 0)]
        r = local[ids[valid]]
        c = local[nbr[valid]]
        rows.append(r)
        cols.append(c)
        vals.append(np.full(len(r), value))
    return csr_from_coo(
        n, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    )


def assemble_load(
    mesh: SquareMesh,
    f,
    color: int,
    quad_order: int = 3,
    moments: np.ndarray | None = None,
) -> np.ndarray:
    """Load vector (f, Psi_Q) over one color's interior squares.

    `moments` may carry precomputed `square_moments(mesh, f, quad_order)` so
    several assemblies share one quadrature pass.
    """
    if moments is None:
        moments = square_moments(mesh, f, quad_order)
    mask = mesh.interior_red_mask if color == RED else ~mesh.interior_red_mask
    ids = mesh.interior_square_ids[mask]
    if len(ids) == 0:
        return np.zeros(0)
    h = mesh.h
    out = np.zeros(len(ids))
    for k, (di, dj) in enumerate(PATCH_OFFSETS):
        patch = mesh.squares_at_offset(di, dj)[ids]
        if (patch < 0).any():
            raise RuntimeError("interior square with incomplete patch")
        m = moments[patch]
        ax, bx, gx, ay, by, gy = PATCH_LOCALS[k]
        out += (
            ax * m[:, 0] + (bx / h) * m[:, 1] + (gx / h) * m[:, 2]
            + ay * m[:, 3] + (by / h) * m[:, 4] + (gy / h) * m[:, 5]
        )
    return out
