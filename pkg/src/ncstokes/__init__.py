"""Stokes solver on square meshes built from a locally divergence-free
nonconforming P1 velocity basis.

The velocity problem splits into two independent SPD systems over the red and
black interior squares of the checkerboard coloring; the pressure is recovered
afterwards by an explicit telescoping sweep.  See the README for the
mathematical setup and the command line interface.
"""
from .backends import available_backends, get_backend
from .divfree import (
    DivFreeCoefficients,
    assemble_load,
    assemble_stiffness,
    basis_function,
    expand,
    stencil_entry,
)
from .fields import (
    NCScalarField,
    NCVectorField,
    PiecewiseConstField,
    curl_h,
    div_h,
    interpolate,
    interpolate_vector,
    l2_inner,
    l2_norm,
    psi_vab,
    psi_vertex,
    seminorm_1h,
)
from .harness import (
    ManufacturedCase,
    convergence_study,
    dims_report,
    error_norms,
    run_invariant_checks,
    solve_case,
    stokes_case,
    subspace_dims,
)
from .mesh import (
    BLACK,
    RED,
    AssumptionViolationError,
    DisconnectedDomainError,
    DomainHoleError,
    EntityCounts,
    InvalidDimensionError,
    MeshError,
    SquareMesh,
    build_masked,
    build_rectangular,
    load_mask,
    parse_mask,
)
from .oracle import brute_quadrature, solve_mixed
from .pressure import PressureField, momentum_residuals, recover_pressure, residual
from .solver import SolverConfig, SolverError, solve_color, solve_velocity

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolationError",
    "BLACK",
    "DisconnectedDomainError",
    "DivFreeCoefficients",
    "DomainHoleError",
    "EntityCounts",
    "InvalidDimensionError",
    "ManufacturedCase",
    "MeshError",
    "NCScalarField",
    "NCVectorField",
    "PiecewiseConstField",
    "PressureField",
    "RED",
    "SolverConfig",
    "SolverError",
    "SquareMesh",
    "assemble_load",
    "assemble_stiffness",
    "available_backends",
    "basis_function",
    "brute_quadrature",
    "build_masked",
    "build_rectangular",
    "convergence_study",
    "curl_h",
    "dims_report",
    "div_h",
    "error_norms",
    "expand",
    "get_backend",
    "interpolate",
    "interpolate_vector",
    "l2_inner",
    "l2_norm",
    "load_mask",
    "momentum_residuals",
    "parse_mask",
    "psi_vab",
    "psi_vertex",
    "recover_pressure",
    "residual",
    "run_invariant_checks",
    "seminorm_1h",
    "solve_case",
    "solve_color",
    "solve_mixed",
    "solve_velocity",
    "stencil_entry",
    "stokes_case",
    "subspace_dims",
]
