"""Nonconforming P1 fields on square meshes.

Scalar fields live in the span of the interior-vertex basis: the hat psi_V has
midpoint value 1 on the four edges meeting the interior vertex V and 0 on every
other edge.  A field is stored by its coefficient per interior vertex, which
makes midpoint continuity and the homogeneous boundary condition structural:
the midpoint value on any edge is the sum of the coefficients of the edge's
interior endpoints.

On each square a field restricts to alpha + beta*xhat + gamma*yhat in
center-relative coordinates; `local_linears` gathers those triples for all
squares at once from the corner coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import SquareMesh, VERTEX_CORNER_DIRS


@dataclass(frozen=True)
class LocalLinear:
    """Restriction of a field to one square: alpha + beta*xhat + gamma*yhat."""

    alpha: float
    beta: float
    gamma: float

    def value(self, xhat, yhat):
        return self.alpha + self.beta * xhat + self.gamma * yhat

    def midpoints(self, h: float) -> tuple[float, float, float, float]:
        """Values at the (left, right, bottom, top) edge midpoints."""
        return (
            self.alpha - self.beta * h / 2,
            self.alpha + self.beta * h / 2,
            self.alpha - self.gamma * h / 2,
            self.alpha + self.gamma * h / 2,
        )


def local_linear_from_midpoints(
    ml: float, mr: float, mb: float, mt: float, h: float
) -> LocalLinear:
    """Fit alpha, beta, gamma from the four midpoint values of one square.

    Requires the compatibility relation ml + mr == mb + mt (opposite edge
    sums agree), which every nonconforming field satisfies by construction.
    """
    if not np.isclose(ml + mr, mb + mt, rtol=1e-12, atol=1e-12):
        raise ValueError(
            f"midpoint values violate compatibility: {ml}+{mr} != {mb}+{mt}"
        )
    return LocalLinear(
        alpha=(ml + mr + mb + mt) / 4.0,
        beta=(mr - ml) / h,
        gamma=(mt - mb) / h,
    )


class NCScalarField:
    """Scalar nonconforming field, one coefficient per interior vertex."""

    def __init__(self, mesh: SquareMesh, coeffs: np.ndarray):
        coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
        if coeffs.shape != (mesh.n_interior_vertices,):
            raise ValueError(
                f"expected {mesh.n_interior_vertices} coefficients, got {coeffs.shape}"
            )
        self.mesh = mesh
        self.coeffs = coeffs
        self._locals: np.ndarray | None = None

    @classmethod
    def zeros(cls, mesh: SquareMesh) -> "NCScalarField":
        return cls(mesh, np.zeros(mesh.n_interior_vertices))

    def _corner_coeffs(self) -> np.ndarray:
        """Coefficients at the [lb, rb, lt, rt] corners of every square (0 on boundary)."""
        ext = np.append(self.coeffs, 0.0)
        return ext[self.mesh.square_corner_iv]

    def local_linears(self) -> np.ndarray:
        """(n_squares, 3) array of [alpha, beta, gamma] per square."""
        if self._locals is None:
            c = self._corner_coeffs()
            lb, rb, lt, rt = c[:, 0], c[:, 1], c[:, 2], c[:, 3]
            h = self.mesh.h
            out = np.empty((self.mesh.n_squares, 3))
            out[:, 0] = (lb + rb + lt + rt) / 2.0
            out[:, 1] = ((rb + rt) - (lb + lt)) / h
            out[:, 2] = ((lt + rt) - (lb + rb)) / h
            out.setflags(write=False)
            self._locals = out
        return self._locals

    def midpoint_square_values(self) -> np.ndarray:
        """(n_squares, 4) midpoint values on the [left, right, bottom, top] edges."""
        c = self._corner_coeffs()
        lb, rb, lt, rt = c[:, 0], c[:, 1], c[:, 2], c[:, 3]
        return np.stack([lb + lt, rb + rt, lb + rb, lt + rt], axis=1)

    def midpoint_value(self, v1, v2) -> float:
        """Midpoint value on the edge with endpoint vertices v1, v2 (lattice coords)."""
        total = 0.0
        for (i, j) in (v1, v2):
            k = self.mesh.iv_id[j, i]
            if k >= 0:
                total += self.coeffs[k]
        return total


class NCVectorField:
    """Vector nonconforming field with components x, y on a shared mesh."""

    def __init__(self, x: NCScalarField, y: NCScalarField):
        if x.mesh is not y.mesh:
            raise ValueError("vector field components must share one mesh")
        self.mesh = x.mesh
        self.x = x
        self.y = y

    @classmethod
    def zeros(cls, mesh: SquareMesh) -> "NCVectorField":
        return cls(NCScalarField.zeros(mesh), NCScalarField.zeros(mesh))

    @classmethod
    def from_coeffs(cls, mesh: SquareMesh, cx: np.ndarray, cy: np.ndarray) -> "NCVectorField":
        return cls(NCScalarField(mesh, cx), NCScalarField(mesh, cy))


class PiecewiseConstField:
    """One value per mesh square."""

    def __init__(self, mesh: SquareMesh, values: np.ndarray):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != (mesh.n_squares,):
            raise ValueError(
                f"expected {mesh.n_squares} values, got {values.shape}"
            )
        self.mesh = mesh
        self.values = values

    @classmethod
    def zeros(cls, mesh: SquareMesh) -> "PiecewiseConstField":
        return cls(mesh, np.zeros(mesh.n_squares))


# ----------------------------------------------------------------------
# basis fields and interpolation
# ----------------------------------------------------------------------


def psi_vertex(mesh: SquareMesh, vertex) -> NCScalarField:
    """Hat field of one interior vertex: unit coefficient at that vertex."""
    k = vertex if isinstance(vertex, (int, np.integer)) else mesh.interior_vertex_index(vertex)
    coeffs = np.zeros(mesh.n_interior_vertices)
    coeffs[k] = 1.0
    return NCScalarField(mesh, coeffs)


def psi_vab(mesh: SquareMesh, vertex, a: float, b: float) -> NCVectorField:
    """Vector hat (a*psi_V, b*psi_V) for an interior vertex V."""
    k = vertex if isinstance(vertex, (int, np.integer)) else mesh.interior_vertex_index(vertex)
    cx = np.zeros(mesh.n_interior_vertices)
    cy = np.zeros(mesh.n_interior_vertices)
    cx[k] = a
    cy[k] = b
    return NCVectorField.from_coeffs(mesh, cx, cy)


def interpolate(mesh: SquareMesh, v) -> NCScalarField:
    """Interpolate a function onto the nonconforming space.

    The coefficient at interior vertex V is v(V)/2, which reproduces the
    midpoint-average rule: the interpolant's value at the midpoint of an edge
    with interior endpoints V1, V2 is (v(V1) + v(V2))/2.  `v` must accept
    coordinate arrays.
    """
    if mesh.n_interior_vertices == 0:
        return NCScalarField.zeros(mesh)
    x0, y0 = mesh.origin
    xs = x0 + mesh.iv_pos[:, 0] * mesh.h
    ys = y0 + mesh.iv_pos[:, 1] * mesh.h
    vals = np.asarray(v(xs, ys), dtype=np.float64)
    return NCScalarField(mesh, vals / 2.0)


def interpolate_vector(mesh: SquareMesh, v) -> NCVectorField:
    """Interpolate a vector function; `v(x, y)` returns the pair of components."""
    if mesh.n_interior_vertices == 0:
        return NCVectorField.zeros(mesh)
    x0, y0 = mesh.origin
    xs = x0 + mesh.iv_pos[:, 0] * mesh.h
    ys = y0 + mesh.iv_pos[:, 1] * mesh.h
    vx, vy = v(xs, ys)
    return NCVectorField.from_coeffs(
        mesh,
        np.asarray(vx, dtype=np.float64) / 2.0,
        np.asarray(vy, dtype=np.float64) / 2.0,
    )


def local_linear(field: NCScalarField, square) -> LocalLinear:
    """LocalLinear of one square (square id or lattice position)."""
    sq = square if isinstance(square, (int, np.integer)) else field.mesh.square_index(square)
    a, b, g = field.local_linears()[sq]
    return LocalLinear(float(a), float(b), float(g))


# ----------------------------------------------------------------------
# discrete differential operators and norms
# ----------------------------------------------------------------------


def div_h(u: NCVectorField) -> PiecewiseConstField:
    """Piecewise divergence: beta of the x component plus gamma of the y component."""
    lx = u.x.local_linears()
    ly = u.y.local_linears()
    return PiecewiseConstField(u.mesh, lx[:, 1] + ly[:, 2])


def curl_h(u: NCVectorField) -> PiecewiseConstField:
    """Piecewise curl: beta of the y component minus gamma of the x component."""
    lx = u.x.local_linears()
    ly = u.y.local_linears()
    return PiecewiseConstField(u.mesh, ly[:, 1] - lx[:, 2])


def seminorm_1h(field) -> float:
    """Broken H1 seminorm: sqrt(sum_Q h^2 (beta^2 + gamma^2)) over components."""
    if isinstance(field, NCVectorField):
        comps = (field.x, field.y)
        h = field.mesh.h
    else:
        comps = (field,)
        h = field.mesh.h
    total = 0.0
    for c in comps:
        ll = c.local_linears()
        total += float(ll[:, 1] @ ll[:, 1] + ll[:, 2] @ ll[:, 2])
    return float(np.sqrt(h * h * total))


def l2_inner(w1: PiecewiseConstField, w2: PiecewiseConstField) -> float:
    if w1.mesh is not w2.mesh:
        raise ValueError("fields live on different meshes")
    h = w1.mesh.h
    return float(h * h * (w1.values @ w2.values))


def l2_norm(w: PiecewiseConstField) -> float:
    return float(np.sqrt(l2_inner(w, w)))


def vector_local_data(u: NCVectorField) -> tuple[np.ndarray, np.ndarray]:
    """Local linear tables (n_squares, 3) of the two components."""
    return u.x.local_linears(), u.y.local_linears()


# directions of an interior vertex as seen from its four squares, exported for
# modules that assemble per-vertex contributions
VERTEX_DIRS = VERTEX_CORNER_DIRS


# ----------------------------------------------------------------------
# text dumps
# ----------------------------------------------------------------------


def dump_piecewise_const(field: PiecewiseConstField, path) -> None:
    """Write 'i j value' lines, one per square, row-major bottom-to-top."""
    pos = field.mesh.square_pos
    with open(path, "w", encoding="ascii") as fh:
        for k in range(field.mesh.n_squares):
            fh.write(f"{pos[k, 0]} {pos[k, 1]} {field.values[k]:.17g}\n")


def dump_vector_field(u: NCVectorField, path) -> None:
    """Write per-square local data: 'i j alpha_x beta_x gamma_x alpha_y beta_y gamma_y'."""
    pos = u.mesh.square_pos
    lx, ly = vector_local_data(u)
    with open(path, "w", encoding="ascii") as fh:
        for k in range(u.mesh.n_squares):
            fh.write(
                f"{pos[k, 0]} {pos[k, 1]} "
                f"{lx[k, 0]:.17g} {lx[k, 1]:.17g} {lx[k, 2]:.17g} "
                f"{ly[k, 0]:.17g} {ly[k, 1]:.17g} {ly[k, 2]:.17g}\n"
            )
