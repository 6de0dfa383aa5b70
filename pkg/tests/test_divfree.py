"""Tests for the locally divergence-free basis and its stiffness assembly.

The reference values here come from tests/oracles.py, which rebuilds every
quantity from the edge-midpoint definition of the space (no shared code paths
with the library's corner tables or stencil).
"""

import numpy as np
import pytest

import oracles
from ncstokes.divfree import (
    STENCIL,
    DivFreeCoefficients,
    assemble_load,
    assemble_stiffness,
    basis_function,
    expand,
    stencil_entry,
)
from ncstokes.fields import curl_h, div_h, l2_norm, seminorm_1h
from ncstokes.mesh import RED, build_masked, build_rectangular, parse_mask
from conftest import NOTCH_TEXT

MESHES_FOR_H = [1.0, 0.125, 1.0 / 64]


def interior_color_ids(mesh, color):
    mask = mesh.interior_red_mask if color == RED else ~mesh.interior_red_mask
    return mesh.interior_square_ids[mask]


# ---------------------------------------------------------------------------
# single basis function


def test_basis_function_div_and_curl_pattern(mesh8):
    """Psi_Q is divergence free, carries curl -4/h on Q itself and +1/h on
    the four diagonal neighbours, and nothing anywhere else."""
    h = mesh8.h
    sq = mesh8.square_index((3, 4))
    u = basis_function(mesh8, sq)
    d = div_h(u).values
    c = curl_h(u).values
    assert np.abs(d).max() <= 1e-14 / h

    expect = np.zeros(mesh8.n_squares)
    expect[sq] = -4.0 / h
    for di, dj in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        expect[mesh8.square_index((3 + di, 4 + dj))] = 1.0 / h
    assert np.array_equal(c, expect)


def test_basis_function_matches_patch_reference(mesh8):
    ref = oracles.patch_div_curl(mesh8, mesh8.square_index((2, 2)))
    u = basis_function(mesh8, mesh8.square_index((2, 2)))
    d = div_h(u).values
    c = curl_h(u).values
    for sid, (dv, cv) in ref.items():
        assert d[sid] == pytest.approx(dv, abs=1e-14 / mesh8.h)
        assert c[sid] == pytest.approx(cv, abs=1e-14 / mesh8.h)


@pytest.mark.parametrize("h", MESHES_FOR_H)
def test_basis_function_energy_is_20(h):
    """|Psi_Q|_{1,h}^2 = 20 independently of the mesh size."""
    mesh = build_rectangular(6, 6, h)
    sq = mesh.square_index((2, 3))
    assert oracles.gradient_inner(mesh, sq, sq) == pytest.approx(20.0, rel=1e-13)
    u = basis_function(mesh, sq)
    energy = seminorm_1h(u.x) ** 2 + seminorm_1h(u.y) ** 2
    assert energy == pytest.approx(20.0, rel=1e-13)


def test_basis_function_rejects_non_interior(mesh8, l_mesh):
    with pytest.raises(ValueError):
        basis_function(mesh8, mesh8.square_index((0, 0)))
    with pytest.raises(ValueError):
        basis_function(l_mesh, l_mesh.square_index((1, 1)))


def test_expand_unit_vector_is_basis_function(mesh8):
    sq = mesh8.square_index((4, 4))
    values = np.zeros(mesh8.n_interior_squares)
    values[np.nonzero(mesh8.interior_square_ids == sq)[0][0]] = 1.0
    u = expand(DivFreeCoefficients(mesh8, values))
    v = basis_function(mesh8, sq)
    assert np.array_equal(u.x.coeffs, v.x.coeffs)
    assert np.array_equal(u.y.coeffs, v.y.coeffs)


def test_expanded_fields_stay_divergence_free(mesh8, notched_mesh, rng):
    for mesh in [mesh8, notched_mesh]:
        for _ in range(5):
            values = rng.standard_normal(mesh.n_interior_squares)
            u = expand(DivFreeCoefficients(mesh, values))
            bound = 1e-12 * np.abs(values).max() / mesh.h
            assert np.abs(div_h(u).values).max() <= bound


# ---------------------------------------------------------------------------
# stencil


def test_stencil_values():
    assert stencil_entry((0, 0)) == 20.0
    for off in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        assert stencil_entry(off) == -8.0
    for off in [(2, 0), (-2, 0), (0, 2), (0, -2)]:
        assert stencil_entry(off) == 2.0
    for off in [(2, 2), (2, -2), (-2, 2), (-2, -2)]:
        assert stencil_entry(off) == 1.0
    assert stencil_entry((1, 0)) == 0.0
    assert stencil_entry((3, 1)) == 0.0
    assert sum(STENCIL.values()) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("h", MESHES_FOR_H)
def test_stencil_matches_quadrature_gram(h):
    """Every stencil offset reproduces the gradient inner product computed
    from scratch, for several mesh sizes (the entries are h-independent)."""
    mesh = build_rectangular(8, 8, h)
    center = mesh.square_index((4, 4))
    for di in range(-2, 3):
        for dj in range(-2, 3):
            other = mesh.square_index((4 + di, 4 + dj))
            ref = oracles.gradient_inner(mesh, center, other)
            assert stencil_entry((di, dj)) == pytest.approx(ref, abs=1e-12)


def test_cross_color_gram_vanishes(mesh8):
    """Basis functions on squares of opposite colours have orthogonal
    gradients; this is what decouples the two systems."""
    center = mesh8.square_index((4, 4))
    for di, dj in [(1, 0), (-1, 0), (0, 1), (0, -1), (2, 1), (1, 2), (-1, 2)]:
        other = mesh8.square_index((4 + di, 4 + dj))
        assert oracles.gradient_inner(mesh8, center, other) == pytest.approx(
            0.0, abs=1e-14
        )


# ---------------------------------------------------------------------------
# stiffness assembly


@pytest.mark.parametrize("h", [1.0, 0.125])
@pytest.mark.parametrize("color", [0, 1])
def test_stiffness_matches_quadrature_gram(h, color):
    for mask_text in [None, NOTCH_TEXT]:
        if mask_text is None:
            mesh = build_rectangular(8, 8, h)
        else:
            mesh = build_masked(parse_mask(mask_text), h)
        ids = interior_color_ids(mesh, color)
        K = assemble_stiffness(mesh, color).toarray()
        assert K.shape == (len(ids), len(ids))
        for a, qa in enumerate(ids):
            for b, qb in enumerate(ids):
                ref = oracles.gradient_inner(mesh, qa, qb)
                assert K[a, b] == pytest.approx(ref, abs=1e-12)


def test_stiffness_diagonal_and_symmetry(mesh8):
    for color in (0, 1):
        K = assemble_stiffness(mesh8, color)
        assert np.all(K.diagonal() == 20.0)
        assert K.check_symmetric()


def test_stiffness_is_positive_definite():
    for n in (4, 8, 16):
        mesh = build_rectangular(n, n, 1.0 / n)
        for color in (0, 1):
            K = assemble_stiffness(mesh, color).toarray()
            eigs = np.linalg.eigvalsh(K)
            assert eigs.min() > 0.0


def test_stiffness_dimensions(mesh8):
    assert assemble_stiffness(mesh8, 0).n == 18
    assert assemble_stiffness(mesh8, 1).n == 18


def test_energy_identity(mesh8, rng):
    """c^T (K_R + K_K) c equals the discrete energy of the expanded field."""
    values = rng.standard_normal(mesh8.n_interior_squares)
    coeffs = DivFreeCoefficients(mesh8, values)
    u = expand(coeffs)
    energy = seminorm_1h(u.x) ** 2 + seminorm_1h(u.y) ** 2
    quad = 0.0
    for color in (0, 1):
        K = assemble_stiffness(mesh8, color)
        c = coeffs.color_block(color)
        quad += c @ K.matvec(c)
    assert quad == pytest.approx(energy, rel=1e-10)


def test_matrix_dump_row_major(mesh8, tmp_path):
    K = assemble_stiffness(mesh8, 0)
    path = tmp_path / "K.txt"
    K.dump(path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == K.nnz
    rows = [int(line.split()[0]) for line in lines]
    assert rows == sorted(rows)
    r, c, v = lines[0].split()
    dense = K.toarray()
    assert dense[int(r), int(c)] == float(v)


# ---------------------------------------------------------------------------
# load assembly


def test_load_of_zero_forcing(mesh8):
    b = assemble_load(mesh8, lambda x, y: (np.zeros_like(x), np.zeros_like(x)), 0)
    assert np.array_equal(b, np.zeros(18))


def test_load_of_constant_forcing(mesh8):
    """A constant force does no work against any Psi_Q: the basis functions
    have zero mean in each component."""
    b = assemble_load(
        mesh8, lambda x, y: (np.full_like(x, 2.0), np.full_like(x, -1.0)), 0
    )
    assert np.abs(b).max() <= 1e-13


def test_load_entry_against_brute_quadrature(mesh8):
    def f(x, y):
        return (x**2 * y - 0.5 * y**2, x * y**2 + 0.25 * x)

    for color in (0, 1):
        b = assemble_load(mesh8, f, color, quad_order=3)
        ids = interior_color_ids(mesh8, color)
        probe = len(ids) // 2
        ref = oracles.load_entry(mesh8, f, ids[probe], n=20)
        assert b[probe] == pytest.approx(ref, rel=1e-8)


def test_load_rejects_bad_quadrature_order(mesh8):
    with pytest.raises(ValueError):
        assemble_load(mesh8, lambda x, y: (x, y), 0, quad_order=0)
