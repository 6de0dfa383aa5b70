"""Tests for the two-colour velocity solver."""

import numpy as np
import pytest

from ncstokes.divfree import DivFreeCoefficients, assemble_load, assemble_stiffness, expand
from ncstokes.fields import curl_h, l2_inner, seminorm_1h
from ncstokes.harness import error_norms, stokes_case
from ncstokes.mesh import RED, build_rectangular
from ncstokes.pressure import recover_pressure
from ncstokes.solver import SolverConfig, SolverError, solve_color, solve_velocity


def test_solve_recovers_known_vector(mesh8):
    K = assemble_stiffness(mesh8, RED)
    ones = np.ones(K.n)
    x = solve_color(K, K.matvec(ones), SolverConfig(tol=1e-12))
    assert np.abs(x - ones).max() <= 1e-9


def test_cg_and_dense_agree():
    mesh = build_rectangular(16, 16, 1.0 / 16)
    case = stokes_case()
    for color in (0, 1):
        K = assemble_stiffness(mesh, color)
        b = assemble_load(mesh, case.forcing, color)
        x_cg = solve_color(K, b, SolverConfig(method="cg", tol=1e-12))
        x_dense = solve_color(K, b, SolverConfig(method="dense"))
        assert np.abs(x_cg - x_dense).max() <= 1e-8 * max(1.0, np.abs(x_dense).max())


def test_zero_forcing_gives_zero_velocity(mesh8):
    coeffs, u = solve_velocity(
        mesh8, lambda x, y: (np.zeros_like(x), np.zeros_like(x))
    )
    assert np.array_equal(coeffs.values, np.zeros(mesh8.n_interior_squares))
    assert np.array_equal(u.x.coeffs, np.zeros(mesh8.n_interior_vertices))


def test_colors_solve_independently(mesh8):
    """The full solve is exactly the two per-colour solves stitched together;
    neither block sees the other."""
    case = stokes_case()
    config = SolverConfig(tol=1e-11)
    coeffs, _ = solve_velocity(mesh8, case.forcing, config)
    for color in (0, 1):
        K = assemble_stiffness(mesh8, color)
        b = assemble_load(mesh8, case.forcing, color, quad_order=config.quad_order)
        x = solve_color(K, b, config)
        assert np.array_equal(coeffs.color_block(color), x)


def test_stiffness_equals_curl_gram(mesh8):
    """For divergence-free fields the energy inner product reduces to the curl
    inner product, so the stiffness entries must match the curl Gram matrix."""
    ids = mesh8.interior_square_ids[mesh8.interior_red_mask]
    K = assemble_stiffness(mesh8, RED).toarray()
    curls = []
    for sq in ids:
        values = np.zeros(mesh8.n_interior_squares)
        values[np.nonzero(mesh8.interior_square_ids == sq)[0][0]] = 1.0
        curls.append(curl_h(expand(DivFreeCoefficients(mesh8, values))))
    for a in range(len(ids)):
        for b in range(a, len(ids)):
            assert K[a, b] == pytest.approx(l2_inner(curls[a], curls[b]), abs=1e-12)


def test_manufactured_energy_error_level_16():
    mesh = build_rectangular(16, 16, 1.0 / 16)
    case = stokes_case()
    _, u = solve_velocity(mesh, case.forcing)
    p = recover_pressure(mesh, u, case.forcing)
    norms = error_norms(mesh, u, p.pressure, case)
    assert norms.u_h1 == pytest.approx(1.0774, rel=0.02)


def test_cg_failure_raises(mesh8):
    K = assemble_stiffness(mesh8, RED)
    b = K.matvec(np.ones(K.n))
    with pytest.raises(SolverError):
        solve_color(K, b, SolverConfig(method="cg", tol=1e-30, max_iterations=2))


def test_unknown_method_rejected(mesh8):
    K = assemble_stiffness(mesh8, RED)
    with pytest.raises(ValueError):
        solve_color(K, np.zeros(K.n), SolverConfig(method="lu"))


def test_empty_system_solves_to_zero(l_mesh):
    assert l_mesh.n_interior_squares == 0
    coeffs, u = solve_velocity(l_mesh, lambda x, y: (np.sin(x), np.cos(y)))
    assert coeffs.values.shape == (0,)
    assert seminorm_1h(u.x) == 0.0 and seminorm_1h(u.y) == 0.0
