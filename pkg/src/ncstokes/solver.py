"""Velocity solves: two decoupled SPD systems, one per checkerboard color."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import divfree
from .backends import Backend, get_backend
from .fields import NCVectorField
from .mesh import BLACK, RED, SquareMesh
from .quadrature import square_moments
from .spmatrix import SparseSpdMatrix

log = logging.getLogger(__name__)

#: largest dimension the dense Cholesky path accepts
DENSE_LIMIT = 5000


class SolverError(RuntimeError):
    """Linear solve failed; carries diagnostics for the caller."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class SolverConfig:
    """How to solve the color systems.

    method: "cg" (Jacobi-preconditioned conjugate gradients) or "dense"
    (Cholesky, dimensions up to DENSE_LIMIT).  `tol` is the relative residual
    target for CG.
    """

    method: str = "cg"
    tol: float = 1e-10
    max_iterations: int = 50_000
    quad_order: int = 3
    backend: str | None = field(default=None, compare=False)

    def resolve_backend(self) -> Backend:
        return get_backend(self.backend)


def solve_color(
    K: SparseSpdMatrix, b: np.ndarray, config: SolverConfig | None = None
) -> np.ndarray:
    """Solve one SPD color system for its coefficient vector."""
    config = config or SolverConfig()
    b = np.ascontiguousarray(b, dtype=np.float64)
    if b.shape != (K.n,):
        raise ValueError(f"right-hand side has length {len(b)}, matrix is {K.n}")
    if K.n == 0:
        return np.zeros(0)
    if config.method == "dense":
        return _solve_dense(K, b)
    if config.method == "cg":
        return _solve_cg(K, b, config)
    raise ValueError(f"unknown solver method {config.method!r}")


def _solve_dense(K: SparseSpdMatrix, b: np.ndarray) -> np.ndarray:
    if K.n > DENSE_LIMIT:
        raise SolverError(
            f"dense Cholesky limited to dimension {DENSE_LIMIT}, got {K.n}",
            dimension=K.n,
        )
    try:
        factor = scipy.linalg.cho_factor(K.toarray(), lower=True)
    except np.linalg.LinAlgError as exc:
        raise SolverError(
            f"Cholesky factorization failed: {exc}", dimension=K.n
        ) from exc
    return scipy.linalg.cho_solve(factor, b)


def _solve_cg(K: SparseSpdMatrix, b: np.ndarray, config: SolverConfig) -> np.ndarray:
    backend = config.resolve_backend()
    diag = K.diagonal()
    if (diag <= 0).any():
        raise SolverError("matrix has a non-positive diagonal entry", dimension=K.n)
    inv_diag = 1.0 / diag
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros(K.n)
    x, iters, relres, converged = backend.pcg(
        K.indptr, K.indices, K.data, b, inv_diag, config.tol, config.max_iterations
    )
    true_rel = float(np.linalg.norm(b - K.matvec(x, backend))) / bnorm
    if not converged or true_rel > 10 * config.tol:
        raise SolverError(
            "conjugate gradients did not converge: "
            f"{iters} iterations, relative residual {true_rel:.3e} "
            f"(target {config.tol:.1e}, dimension {K.n})",
            iterations=iters,
            relative_residual=true_rel,
            dimension=K.n,
        )
    log.debug(
        "cg[%s] dim=%d iters=%d relres=%.3e", backend.name, K.n, iters, relres
    )
    return x


def solve_velocity(
    mesh: SquareMesh,
    f,
    config: SolverConfig | None = None,
    moments: np.ndarray | None = None,
) -> tuple[divfree.DivFreeCoefficients, NCVectorField]:
    """Galerkin velocity solve in the divergence-free subspace.

    Assembles and solves the red and black systems independently and expands
    the result; on meshes without interior squares both systems are empty and
    the zero field is returned.
    """
    config = config or SolverConfig()
    if moments is None:
        moments = square_moments(mesh, f, config.quad_order)
    blocks = {}
    for color in (RED, BLACK):
        K = divfree.assemble_stiffness(mesh, color)
        b = divfree.assemble_load(mesh, f, color, config.quad_order, moments=moments)
        blocks[color] = solve_color(K, b, config)
    coeffs = divfree.DivFreeCoefficients.from_color_blocks(
        mesh, blocks[RED], blocks[BLACK]
    )
    return coeffs, divfree.expand(coeffs)
