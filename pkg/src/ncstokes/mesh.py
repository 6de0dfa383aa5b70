"""Square-lattice meshes with masks, coloring, and validity checks.

A mesh is a uniform square lattice restricted by a boolean mask.  Squares are
addressed by lattice position (i, j) with i counting columns (x direction) and
j counting rows (y direction); dense entity ids run row-major, bottom row
first.  A vertex is *interior* when all four surrounding squares are present;
everything else that touches a present square lies on the domain boundary.

Validation enforces the shape restrictions the discrete theory needs:

  1. no square has all four vertices on the boundary,
  2. no interior edge has both endpoints on the boundary,
  3. a square with exactly two boundary vertices has them as the endpoints of
     one of its edges (never a diagonal pair).

together with connectivity and simple connectivity (no holes) of the masked
region.  Each violation raises a distinct error naming the offending entity.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import ndimage
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

RED = 0
BLACK = 1

#: Lattice offsets of the four diagonal neighbors, keyed by corner label.
DIAGONAL_OFFSETS = {"rt": (1, 1), "lt": (-1, 1), "lb": (-1, -1), "rb": (1, -1)}

#: Squares around an interior vertex V, counterclockwise starting from the
#: square whose left-bottom corner is V.  Entry k holds the lattice offset of
#: square Q_{k+1} relative to V and the direction of V seen from that square's
#: center (unit steps of h/2).
VERTEX_SQUARE_OFFSETS = np.array([(0, 0), (-1, 0), (-1, -1), (0, -1)], dtype=np.int64)
VERTEX_CORNER_DIRS = np.array([(-1, -1), (1, -1), (1, 1), (-1, 1)], dtype=np.int64)


class MeshError(ValueError):
    """Base class for mesh construction and validation failures."""


class InvalidDimensionError(MeshError):
    """Grid extents smaller than one square."""


class DisconnectedDomainError(MeshError):
    """The masked region has more than one connected component."""


class DomainHoleError(MeshError):
    """The masked region is not simply connected."""


class AssumptionViolationError(MeshError):
    """One of the three shape clauses fails; `clause` is 1, 2, or 3."""

    def __init__(self, clause: int, entity, message: str):
        super().__init__(message)
        self.clause = clause
        self.entity = entity


class InternalConsistencyError(RuntimeError):
    """A property guaranteed by validation failed downstream (a bug)."""


@dataclass(frozen=True)
class EntityCounts:
    n_squares: int
    n_interior_squares: int
    n_vertices: int
    n_interior_vertices: int
    n_boundary_vertices: int
    n_interior_edges: int
    n_boundary_edges: int


class SquareMesh:
    """Immutable square mesh defined by a boolean mask and spacing h.

    `mask[j, i]` marks square (i, j) as present.  Construction validates the
    region; all derived entity tables are numpy arrays built vectorized so
    meshes with ~10^6 squares stay well under a second.
    """

    def __init__(self, mask: np.ndarray, h: float, origin=(0.0, 0.0)):
        mask = np.ascontiguousarray(np.asarray(mask, dtype=bool))
        if mask.ndim != 2:
            raise MeshError(f"mask must be 2-D, got shape {mask.shape}")
        if mask.shape[0] < 1 or mask.shape[1] < 1:
            raise InvalidDimensionError(
                f"mask must cover at least one square, got shape {mask.shape}"
            )
        if not (np.isfinite(h) and h > 0):
            raise MeshError(f"spacing h must be positive, got {h}")
        if not mask.any():
            raise MeshError("mask selects no squares")

        self.ny, self.nx = mask.shape
        self.h = float(h)
        self.origin = (float(origin[0]), float(origin[1]))
        self.mask = mask
        self.mask.setflags(write=False)

        self._check_connected()
        self._check_no_holes()
        self._build_entities()
        self._check_assumption()

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def _check_connected(self) -> None:
        labels, ncomp = ndimage.label(self.mask)
        if ncomp > 1:
            a = tuple(int(v) for v in np.argwhere(labels == 1)[0][::-1])
            b = tuple(int(v) for v in np.argwhere(labels == 2)[0][::-1])
            raise DisconnectedDomainError(
                f"domain is disconnected: squares {a} and {b} lie in "
                f"different components ({ncomp} components total)"
            )

    def _check_no_holes(self) -> None:
        # Flood the complement of the padded mask; complement cells the outside
        # flood cannot reach are holes.  Edge connectivity is the geometrically
        # correct notion here: two absent squares touching only at a corner are
        # not connected, because that corner point belongs to the closed domain.
        comp = np.pad(~self.mask, 1, constant_values=True)
        labels, _ = ndimage.label(comp)
        outside = labels[0, 0]
        enclosed = comp & (labels != outside)
        if enclosed.any():
            j, i = np.argwhere(enclosed)[0]
            raise DomainHoleError(
                f"domain is not simply connected: hole at square ({i - 1}, {j - 1})"
            )

    def _build_entities(self) -> None:
        nx, ny = self.nx, self.ny
        mask = self.mask

        # dense square ids, row-major bottom-to-top
        sid = np.full((ny, nx), -1, dtype=np.int64)
        jj, ii = np.nonzero(mask)
        order = np.lexsort((ii, jj))
        jj, ii = jj[order], ii[order]
        self.n_squares = len(ii)
        sid[jj, ii] = np.arange(self.n_squares)
        self.square_id = sid
        self.square_id.setflags(write=False)
        self.square_pos = np.column_stack([ii, jj]).astype(np.int64)
        self.square_pos.setflags(write=False)

        # padded id grid for offset lookups without bound checks
        pad = np.full((ny + 4, nx + 4), -1, dtype=np.int64)
        pad[2 : ny + 2, 2 : nx + 2] = sid
        self._sid_padded = pad
        self._sid_padded.setflags(write=False)

        # vertex classification on the (ny+1, nx+1) lattice
        mp = np.zeros((ny + 2, nx + 2), dtype=bool)
        mp[1 : ny + 1, 1 : nx + 1] = mask
        around = (
            mp[0 : ny + 1, 0 : nx + 1].astype(np.int8)
            + mp[0 : ny + 1, 1 : nx + 2]
            + mp[1 : ny + 2, 0 : nx + 1]
            + mp[1 : ny + 2, 1 : nx + 2]
        )
        self.vertex_present = around > 0
        self.vertex_interior = around == 4
        self.vertex_present.setflags(write=False)
        self.vertex_interior.setflags(write=False)
        self.n_vertices = int(self.vertex_present.sum())
        self.n_interior_vertices = int(self.vertex_interior.sum())
        self.n_boundary_vertices = self.n_vertices - self.n_interior_vertices

        iv = np.full((ny + 1, nx + 1), -1, dtype=np.int64)
        vj, vi = np.nonzero(self.vertex_interior)
        vorder = np.lexsort((vi, vj))
        vj, vi = vj[vorder], vi[vorder]
        iv[vj, vi] = np.arange(self.n_interior_vertices)
        self.iv_id = iv
        self.iv_id.setflags(write=False)
        self.iv_pos = np.column_stack([vi, vj]).astype(np.int64)
        self.iv_pos.setflags(write=False)

        # per-square corner gather indices [lb, rb, lt, rt]; non-interior
        # corners map to the zero slot n_interior_vertices
        si, sj = self.square_pos[:, 0], self.square_pos[:, 1]
        corners = np.stack(
            [iv[sj, si], iv[sj, si + 1], iv[sj + 1, si], iv[sj + 1, si + 1]],
            axis=1,
        )
        self.square_corner_iv = np.where(corners >= 0, corners, self.n_interior_vertices)
        self.square_corner_iv.setflags(write=False)

        self.square_interior = (corners >= 0).all(axis=1)
        self.square_interior.setflags(write=False)
        self.interior_square_ids = np.nonzero(self.square_interior)[0]
        self.interior_square_ids.setflags(write=False)
        self.n_interior_squares = len(self.interior_square_ids)

        self.is_red = (si + sj) % 2 == 0
        self.is_red.setflags(write=False)

        # squares around each interior vertex, order Q1..Q4 (ccw from up-right)
        if self.n_interior_vertices:
            pi, pj = self.iv_pos[:, 0], self.iv_pos[:, 1]
            vs = np.empty((self.n_interior_vertices, 4), dtype=np.int64)
            for k, (di, dj) in enumerate(VERTEX_SQUARE_OFFSETS):
                vs[:, k] = sid[pj + dj, pi + di]
            if (vs < 0).any():
                raise InternalConsistencyError("interior vertex with absent square")
            self.vertex_squares = vs
        else:
            self.vertex_squares = np.empty((0, 4), dtype=np.int64)
        self.vertex_squares.setflags(write=False)

        # edge counts: an edge is interior when both adjacent squares are
        # present, boundary when exactly one is
        below, above = mp[0 : ny + 1, 1 : nx + 1], mp[1 : ny + 2, 1 : nx + 1]
        left, right = mp[1 : ny + 1, 0 : nx + 1], mp[1 : ny + 1, 1 : nx + 2]
        h_int = below & above
        v_int = left & right
        h_bnd = below ^ above
        v_bnd = left ^ right
        self._h_edge_interior = h_int
        self._v_edge_interior = v_int
        self.n_interior_edges = int(h_int.sum()) + int(v_int.sum())
        self.n_boundary_edges = int(h_bnd.sum()) + int(v_bnd.sum())

    def _check_assumption(self) -> None:
        si, sj = self.square_pos[:, 0], self.square_pos[:, 1]
        vb = self.vertex_present & ~self.vertex_interior
        b_lb = vb[sj, si]
        b_rb = vb[sj, si + 1]
        b_lt = vb[sj + 1, si]
        b_rt = vb[sj + 1, si + 1]
        nb = (
            b_lb.astype(np.int8) + b_rb.astype(np.int8)
            + b_lt.astype(np.int8) + b_rt.astype(np.int8)
        )

        bad = np.nonzero(nb == 4)[0]
        if len(bad):
            sq = tuple(int(v) for v in self.square_pos[bad[0]])
            raise AssumptionViolationError(
                1, sq, f"square {sq} has all four vertices on the boundary"
            )

        # horizontal interior edge (i, j)-(i+1, j) with both endpoints boundary
        ny, nx = self.ny, self.nx
        h_bad = self._h_edge_interior & vb[:, : nx] & vb[:, 1 : nx + 1]
        if h_bad.any():
            j, i = np.argwhere(h_bad)[0]
            edge = ((int(i), int(j)), (int(i) + 1, int(j)))
            raise AssumptionViolationError(
                2, edge, f"interior edge {edge[0]}-{edge[1]} has both endpoints on the boundary"
            )
        v_bad = self._v_edge_interior & vb[: ny, :] & vb[1 : ny + 1, :]
        if v_bad.any():
            j, i = np.argwhere(v_bad)[0]
            edge = ((int(i), int(j)), (int(i), int(j) + 1))
            raise AssumptionViolationError(
                2, edge, f"interior edge {edge[0]}-{edge[1]} has both endpoints on the boundary"
            )

        diag = (nb == 2) & ((b_lb & b_rt) | (b_rb & b_lt))
        bad = np.nonzero(diag)[0]
        if len(bad):
            sq = tuple(int(v) for v in self.square_pos[bad[0]])
            raise AssumptionViolationError(
                3, sq, f"square {sq} has exactly two boundary vertices on a diagonal"
            )

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def counts(self) -> EntityCounts:
        return EntityCounts(
            n_squares=self.n_squares,
            n_interior_squares=self.n_interior_squares,
            n_vertices=self.n_vertices,
            n_interior_vertices=self.n_interior_vertices,
            n_boundary_vertices=self.n_boundary_vertices,
            n_interior_edges=self.n_interior_edges,
            n_boundary_edges=self.n_boundary_edges,
        )

    def square_index(self, pos) -> int:
        i, j = pos
        if not (0 <= i < self.nx and 0 <= j < self.ny) or self.square_id[j, i] < 0:
            raise KeyError(f"no square at {(i, j)}")
        return int(self.square_id[j, i])

    def interior_vertex_index(self, pos) -> int:
        i, j = pos
        if not (0 <= i <= self.nx and 0 <= j <= self.ny) or self.iv_id[j, i] < 0:
            raise KeyError(f"no interior vertex at {(i, j)}")
        return int(self.iv_id[j, i])

    def squares_at_offset(self, di: int, dj: int) -> np.ndarray:
        """Id of the square at lattice offset (di, dj) from every square, -1 if absent."""
        si, sj = self.square_pos[:, 0], self.square_pos[:, 1]
        return self._sid_padded[sj + dj + 2, si + di + 2]

    def centers(self) -> np.ndarray:
        x0, y0 = self.origin
        return np.column_stack(
            [
                x0 + (self.square_pos[:, 0] + 0.5) * self.h,
                y0 + (self.square_pos[:, 1] + 0.5) * self.h,
            ]
        )

    def vertex_coords(self, pos) -> tuple[float, float]:
        i, j = pos
        return (self.origin[0] + i * self.h, self.origin[1] + j * self.h)

    @cached_property
    def interior_red_mask(self) -> np.ndarray:
        """Red/black split of `interior_square_ids` (True = red)."""
        m = self.is_red[self.interior_square_ids]
        m.setflags(write=False)
        return m

    def color_square_ids(self, color: int) -> np.ndarray:
        if color == RED:
            return np.nonzero(self.is_red)[0]
        if color == BLACK:
            return np.nonzero(~self.is_red)[0]
        raise ValueError(f"color must be RED (0) or BLACK (1), got {color}")


@dataclass(frozen=True)
class ColorGraph:
    """Adjacency of one color class: same-color squares sharing an interior vertex."""

    color: int
    nodes: np.ndarray        # square ids, ascending
    indptr: np.ndarray       # CSR over local node indices
    indices: np.ndarray


def diagonal_neighbors(mesh: SquareMesh, square) -> dict[str, int | None]:
    """Present squares meeting the given square in exactly one corner vertex."""
    sq = square if isinstance(square, (int, np.integer)) else mesh.square_index(square)
    i, j = mesh.square_pos[sq]
    out: dict[str, int | None] = {}
    for key, (di, dj) in DIAGONAL_OFFSETS.items():
        nid = mesh._sid_padded[j + dj + 2, i + di + 2]
        out[key] = int(nid) if nid >= 0 else None
    return out


def _color_edges(mesh: SquareMesh, color: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Directed edge list (local indices) of the same-color adjacency graph."""
    nodes = mesh.color_square_ids(color)
    local = np.full(mesh.n_squares + 1, -1, dtype=np.int64)
    local[nodes] = np.arange(len(nodes))
    iv = mesh.iv_id
    pos = mesh.square_pos
    srcs, dsts = [], []
    for di, dj in DIAGONAL_OFFSETS.values():
        nbr = mesh.squares_at_offset(di, dj)[nodes]
        # shared corner vertex of (i, j) and (i+di, j+dj)
        vi = pos[nodes, 0] + (di + 1) // 2
        vj = pos[nodes, 1] + (dj + 1) // 2
        ok = (nbr >= 0) & (iv[vj, vi] >= 0)
        srcs.append(local[nodes[ok]])
        dsts.append(local[nbr[ok]])
    src = np.concatenate(srcs) if srcs else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dsts) if dsts else np.empty(0, dtype=np.int64)
    return nodes, src, dst


def same_color_adjacency(mesh: SquareMesh, color: int) -> ColorGraph:
    """Graph over one color's squares; edges join squares sharing an interior vertex.

    The shape restrictions guarantee this graph is connected for a valid mesh,
    so a disconnected result signals a validation bug and raises.
    """
    nodes, src, dst = _color_edges(mesh, color)
    n = len(nodes)
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    graph = ColorGraph(color=color, nodes=nodes, indptr=indptr, indices=dst)
    if n:
        adj = csr_matrix(
            (np.ones(len(dst), dtype=np.int8), dst, indptr), shape=(n, n)
        )
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp != 1:
            raise InternalConsistencyError(
                f"color {color} adjacency has {ncomp} components on a validated mesh"
            )
    return graph


def color_bfs_tree(
    mesh: SquareMesh, color: int, anchor: int | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Breadth-first spanning tree of one color class.

    Returns (nodes, order, parents) in local indices: `nodes` are the square
    ids of the color, `order` the BFS visit order starting at the anchor, and
    `parents[k]` the tree parent of node k (the root points to itself).  The
    default anchor is the lowest-indexed square of the color.
    """
    graph = same_color_adjacency(mesh, color)
    nodes = graph.nodes
    n = len(nodes)
    if n == 0:
        return nodes, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if anchor is None:
        anchor_local = 0
    else:
        loc = np.searchsorted(nodes, anchor)
        if loc >= n or nodes[loc] != anchor:
            raise ValueError(f"anchor square {anchor} is not of color {color}")
        anchor_local = int(loc)
    if n == 1:
        return nodes, np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64)
    adj = csr_matrix(
        (np.ones(len(graph.indices), dtype=np.int8), graph.indices, graph.indptr),
        shape=(n, n),
    )
    order, preds = breadth_first_order(
        adj, anchor_local, directed=False, return_predecessors=True
    )
    if len(order) != n:
        raise InternalConsistencyError(
            f"BFS reached {len(order)} of {n} color-{color} squares on a validated mesh"
        )
    parents = preds.astype(np.int64)
    parents[anchor_local] = anchor_local
    return nodes, order.astype(np.int64), parents


# ----------------------------------------------------------------------
# builders and mask files
# ----------------------------------------------------------------------


def build_rectangular(nx: int, ny: int, h: float, origin=(0.0, 0.0)) -> SquareMesh:
    """Full nx-by-ny rectangle of squares with spacing h."""
    if nx < 1 or ny < 1:
        raise InvalidDimensionError(f"grid must be at least 1x1, got {nx}x{ny}")
    return SquareMesh(np.ones((ny, nx), dtype=bool), h, origin)


def build_masked(mask: np.ndarray, h: float, origin=(0.0, 0.0)) -> SquareMesh:
    """Mesh from an explicit boolean mask (mask[j, i] marks square (i, j))."""
    return SquareMesh(mask, h, origin)


def parse_mask(text: str) -> np.ndarray:
    """Parse the '1'/'0' line format, top row first, into a mask array."""
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    if not rows:
        raise MeshError("mask file contains no rows")
    width = len(rows[0])
    grid = []
    for k, row in enumerate(rows):
        if len(row) != width:
            raise MeshError(
                f"mask row {k} has length {len(row)}, expected {width}"
            )
        if set(row) - {"0", "1"}:
            raise MeshError(f"mask row {k} contains characters other than 0/1")
        grid.append([c == "1" for c in row])
    return np.array(grid[::-1], dtype=bool)


def load_mask(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        return parse_mask(fh.read())


def format_mask(mask: np.ndarray) -> str:
    mask = np.asarray(mask, dtype=bool)
    return "\n".join(
        "".join("1" if v else "0" for v in row) for row in mask[::-1]
    ) + "\n"
