"""Tests for pressure recovery from the velocity residual."""

import numpy as np
import pytest

from ncstokes.divfree import basis_function
from ncstokes.fields import NCVectorField, l2_norm
from ncstokes.harness import error_norms, stokes_case
from ncstokes.mesh import build_rectangular
from ncstokes.pressure import (
    hat_residuals,
    momentum_residuals,
    recover_pressure,
    residual,
)
from ncstokes.quadrature import square_moments
from ncstokes.solver import solve_velocity


def zero_forcing(x, y):
    return (np.zeros_like(x), np.zeros_like(x))


def solved(mesh):
    case = stokes_case()
    _, u = solve_velocity(mesh, case.forcing)
    return case, u


def test_residual_of_zero_test_function(mesh8):
    case, u = solved(mesh8)
    zeros = np.zeros(mesh8.n_interior_vertices)
    v = NCVectorField.from_coeffs(mesh8, zeros, zeros)
    assert residual(u, case.forcing, v) == 0.0


def test_galerkin_orthogonality(mesh8):
    """The residual of the solved velocity vanishes against every basis
    function of the divergence-free space (these are exactly the solved
    equations, so only solver tolerance remains)."""
    case, u = solved(mesh8)
    for sq in mesh8.interior_square_ids:
        r = residual(u, case.forcing, basis_function(mesh8, sq))
        assert abs(r) <= 1e-8


def test_zero_problem_gives_zero_pressure(mesh8, l_mesh):
    for mesh in [mesh8, l_mesh]:
        _, u = solve_velocity(mesh, zero_forcing)
        p = recover_pressure(mesh, u, zero_forcing)
        assert np.array_equal(p.values, np.zeros(mesh.n_squares))


def test_momentum_residuals_small():
    for n in (16, 32):
        mesh = build_rectangular(n, n, 1.0 / n)
        case, u = solved(mesh)
        p = recover_pressure(mesh, u, case.forcing)
        lhs1, rhs1, lhs2, rhs2 = momentum_residuals(mesh, u, p.pressure, case.forcing)
        scale = max(1.0, np.abs(lhs1).max(), np.abs(rhs1).max(),
                    np.abs(lhs2).max(), np.abs(rhs2).max())
        assert np.abs(lhs1 - rhs1).max() <= 1e-8 * scale
        assert np.abs(lhs2 - rhs2).max() <= 1e-8 * scale


def test_momentum_residuals_on_notched_mesh(notched_mesh):
    case, u = solved(notched_mesh)
    p = recover_pressure(notched_mesh, u, case.forcing)
    lhs1, rhs1, lhs2, rhs2 = momentum_residuals(
        notched_mesh, u, p.pressure, case.forcing
    )
    scale = max(1.0, np.abs(lhs1).max(), np.abs(lhs2).max())
    assert np.abs(lhs1 - rhs1).max() <= 1e-8 * scale
    assert np.abs(lhs2 - rhs2).max() <= 1e-8 * scale


def test_color_means_vanish():
    for n in (8, 16):
        mesh = build_rectangular(n, n, 1.0 / n)
        case, u = solved(mesh)
        p = recover_pressure(mesh, u, case.forcing)
        red = mesh.is_red
        assert abs(p.values[red].mean()) <= 1e-12
        assert abs(p.values[~red].mean()) <= 1e-12


def test_anchor_independence(mesh8):
    """The sweep can start from any pair of anchor squares; after the
    per-colour mean shift the result is the same."""
    case, u = solved(mesh8)
    base = recover_pressure(mesh8, u, case.forcing)
    red_ids = np.nonzero(mesh8.is_red)[0]
    black_ids = np.nonzero(~mesh8.is_red)[0]
    for anchors in [(red_ids[-1], black_ids[-1]), (red_ids[7], black_ids[3])]:
        other = recover_pressure(mesh8, u, case.forcing, anchors=anchors)
        assert np.abs(other.values - base.values).max() <= 1e-8
        assert other.anchors == anchors


def test_anchor_decomposition(mesh8):
    case, u = solved(mesh8)
    p = recover_pressure(mesh8, u, case.forcing)
    red = mesh8.is_red
    raw = p.raw.values
    assert np.array_equal(p.values[red], raw[red] - p.d_red)
    assert np.array_equal(p.values[~red], raw[~red] - p.d_black)
    assert p.d_red == raw[red].mean() and p.d_black == raw[~red].mean()
    a_red, a_black = p.anchors
    assert raw[a_red] == 0.0 and raw[a_black] == 0.0
    assert p.anchor_values() == (p.values[a_red], p.values[a_black])


def test_telescoping_step_relation(mesh8):
    """Between any two diagonally adjacent squares the pressure jump equals
    the residual combination at the shared vertex, not just along the tree the
    sweep actually walked — the step field is consistent."""
    case, u = solved(mesh8)
    mom = square_moments(mesh8, case.forcing, 3)
    p = recover_pressure(mesh8, u, case.forcing, moments=mom)
    R1, R2 = hat_residuals(mesh8, u, mom)
    scale = max(1.0, np.abs(p.values).max())
    for sq in range(mesh8.n_squares):
        i, j = mesh8.square_pos[sq]
        for di, dj in [(1, 1), (1, -1)]:
            other = mesh8.squares_at_offset(di, dj)[sq]
            if other < 0:
                continue
            shared = (i + (di + 1) // 2, j + (dj + 1) // 2)
            iv = mesh8.interior_vertex_index(shared)
            step = (-di * R1[iv] - dj * R2[iv]) / (2.0 * mesh8.h)
            assert p.values[other] - p.values[sq] == pytest.approx(
                step, abs=1e-8 * scale
            )


def test_pressure_error_level_32():
    mesh = build_rectangular(32, 32, 1.0 / 32)
    case, u = solved(mesh)
    p = recover_pressure(mesh, u, case.forcing)
    norms = error_norms(mesh, u, p.pressure, case)
    assert norms.p_l2 == pytest.approx(0.76081, rel=0.02)


def test_shared_moments_match_direct_call(mesh8):
    case, u = solved(mesh8)
    mom = square_moments(mesh8, case.forcing, 3)
    direct = recover_pressure(mesh8, u, case.forcing)
    shared = recover_pressure(mesh8, u, case.forcing, moments=mom)
    assert np.array_equal(direct.values, shared.values)
