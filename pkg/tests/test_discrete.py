import math

import numpy as np
import pytest
import scipy.sparse as sp

from fieldroad import (
    ConfigError,
    ModelParams,
    assemble_eigen_operator,
    assemble_evolution_operator,
    build_grid,
    build_window_grid,
    dump_operator,
    fv0,
    homogeneous_logistic,
    shift_bound,
)
from fieldroad.discrete import peclet_ok


def test_build_grid_examples():
    g = build_grid(ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=2), 8, 16)
    assert g.dx == pytest.approx(0.125)
    assert g.dy == pytest.approx(0.125)
    assert g.dim == 8 + 8 * 16 == 136

    g2 = build_grid(ModelParams(D=1, d=1, mu=1, nu=1, L=2, R=2), 4, 4)
    assert g2.dim == 4 + 16 == 20

    with pytest.raises(ConfigError):
        build_grid(ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=2), 2, 8)


def _dense_reference_alpha0(params, spec, grid):
    """Independent dense assembly of the alpha = 0 operator, by loops."""
    nx, ny, dx, dy = grid.nx, grid.ny, grid.dx, grid.dy
    D, d, mu, nu = params.D, params.d, params.mu, params.nu
    zeta = fv0(spec, grid.x_nodes)
    dim = nx + nx * ny
    A = np.zeros((dim, dim))
    fi = lambda i, j: nx + j * nx + i
    for i in range(nx):
        A[i, i] += 2 * D / dx**2 + mu
        A[i, (i + 1) % nx] += -D / dx**2
        A[i, (i - 1) % nx] += -D / dx**2
        A[i, fi(i, 0)] += -nu
    for j in range(ny):
        for i in range(nx):
            r = fi(i, j)
            A[r, r] += 2 * d / dx**2 + 2 * d / dy**2 - zeta[i]
            A[r, fi((i + 1) % nx, j)] += -d / dx**2
            A[r, fi((i - 1) % nx, j)] += -d / dx**2
            if j == 0:
                A[r, r] += 2 * nu / dy
                A[r, i] += -2 * mu / dy
                A[r, fi(i, 1)] += -2 * d / dy**2
            else:
                A[r, fi(i, j - 1)] += -d / dy**2
                if j < ny - 1:
                    A[r, fi(i, j + 1)] += -d / dy**2
    return A


def test_alpha0_structure_matches_reference(unit_params, unit_reaction):
    grid = build_grid(unit_params, 4, 4)
    A = assemble_eigen_operator(unit_params, unit_reaction, grid, 0.0).matrix.toarray()
    ref = _dense_reference_alpha0(unit_params, unit_reaction, grid)
    assert np.allclose(A, ref, atol=1e-14, rtol=0)


def test_alpha_symmetry_split(unit_params, cosine_reaction):
    grid = build_grid(unit_params, 8, 8)
    Ap = assemble_eigen_operator(unit_params, cosine_reaction, grid, 0.4).matrix
    Am = assemble_eigen_operator(unit_params, cosine_reaction, grid, -0.4).matrix
    A0 = assemble_eigen_operator(unit_params, cosine_reaction, grid, 0.0).matrix

    # odd part: advection only, zero diagonal, x-neighbor pattern
    odd = ((Ap - Am) / 2).tocoo()
    assert np.all(odd.row != odd.col)
    # even part differs from alpha = 0 only by the -alpha^2 diagonal
    even_shift = (Ap + Am) / 2 - A0
    even_shift = even_shift.toarray()
    expected = np.diag(
        np.concatenate(
            [
                -unit_params.D * 0.4**2 * np.ones(grid.nx),
                -unit_params.d * 0.4**2 * np.ones(grid.nx * grid.ny),
            ]
        )
    )
    assert np.allclose(even_shift, expected, atol=1e-14, rtol=0)


def test_tiny_instance_dense_eigen_oracle(unit_params, unit_reaction):
    grid = build_grid(unit_params, 4, 4)
    A = assemble_eigen_operator(unit_params, unit_reaction, grid, 0.5).matrix.toarray()
    w, V = np.linalg.eig(A)
    order = np.argsort(w.real)
    lam0 = w[order[0]]
    assert abs(lam0.imag) < 1e-12
    # unique minimal-real-part eigenvalue
    assert w[order[1]].real - lam0.real > 1e-8
    vec = V[:, order[0]].real
    vec = vec if vec[np.argmax(np.abs(vec))] > 0 else -vec
    assert np.all(vec > 0)


def test_evolution_interior_row_sums_zero(unit_params, unit_reaction):
    grid = build_grid(unit_params, 6, 6)
    A = assemble_evolution_operator(unit_params, unit_reaction, grid).matrix
    sums = np.asarray(A.sum(axis=1)).ravel()
    for j in range(1, grid.ny - 1):
        for i in range(grid.nx):
            assert sums[grid.field_index(i, j)] == pytest.approx(0.0, abs=1e-11)


def test_evolution_road_row_exchange_signs(unit_params, unit_reaction):
    grid = build_grid(unit_params, 6, 6)
    A = assemble_evolution_operator(unit_params, unit_reaction, grid).matrix.tocsr()
    i = 2
    assert A[i, i] == pytest.approx(2 * unit_params.D / grid.dx**2 + unit_params.mu)
    assert A[i, grid.field_index(i, 0)] == pytest.approx(-unit_params.nu)


def test_evolution_annihilates_capacity_except_cap(unit_params, unit_reaction):
    params = ModelParams(D=1.3, d=0.7, mu=0.9, nu=1.7, L=1, R=2)
    grid = build_grid(params, 6, 8)
    A = assemble_evolution_operator(params, unit_reaction, grid).matrix
    w = grid.join(
        np.full(grid.nx, params.nu / params.mu), np.ones((grid.ny, grid.nx))
    )
    out = A @ w
    cap_rows = [grid.field_index(i, grid.ny - 1) for i in range(grid.nx)]
    for r in range(grid.dim):
        if r in cap_rows:
            assert out[r] == pytest.approx(params.d / grid.dy**2)
        else:
            assert out[r] == pytest.approx(0.0, abs=1e-11)


@pytest.mark.parametrize("alpha", [0.0, 0.3, -0.45, 2.0, -3.5])
def test_m_matrix_sign_pattern(unit_params, cosine_reaction, alpha):
    grid = build_grid(unit_params, 8, 8)
    op = assemble_eigen_operator(unit_params, cosine_reaction, grid, alpha)
    expected_regime = "centered" if peclet_ok(alpha, grid.dx) else "upwind"
    assert op.regime == expected_regime
    shift = shift_bound(unit_params, cosine_reaction, alpha)
    M = op.shifted(shift).tocoo()
    diag = M.diagonal()
    assert np.all(diag > 0)
    off = M.data[M.row != M.col]
    assert np.all(off <= 1e-14)


def test_field_block_symmetric_for_alpha0_constant(unit_params, unit_reaction):
    # adjointness surrogate: interior field block is symmetric
    grid = build_grid(unit_params, 6, 6)
    A = assemble_eigen_operator(unit_params, unit_reaction, grid, 0.0).matrix.toarray()
    interior = [
        grid.field_index(i, j) for j in range(1, grid.ny - 1) for i in range(grid.nx)
    ]
    block = A[np.ix_(interior, interior)]
    assert np.allclose(block, block.T, atol=1e-14)


def test_grid_refinement_second_order(unit_params, cosine_reaction):
    from fieldroad import principal_eigen

    alpha = 0.4
    lams = []
    for scale in (1, 2, 4):
        grid = build_grid(unit_params, 8 * scale, 8 * scale)
        lams.append(principal_eigen(unit_params, cosine_reaction, grid, alpha, tol=1e-12).lam)
    ratio = (lams[2] - lams[1]) / (lams[1] - lams[0])
    assert ratio == pytest.approx(0.25, abs=0.05)


def test_window_grid_neumann_shape(unit_params):
    window = build_window_grid(unit_params, 8, 8, 6)
    assert window.nx == 48
    assert window.width == pytest.approx(6.0)
    assert window.x0 == pytest.approx(-3.0)
    assert not window.periodic
    with pytest.raises(ConfigError):
        build_window_grid(unit_params, 8, 8, 0)


def test_window_alpha_rejected(unit_params, unit_reaction):
    window = build_window_grid(unit_params, 8, 8, 2)
    with pytest.raises(ConfigError):
        assemble_eigen_operator(unit_params, unit_reaction, window, 0.3)


def test_dump_operator_roundtrip(tmp_path, unit_params, unit_reaction):
    grid = build_grid(unit_params, 4, 4)
    op = assemble_eigen_operator(unit_params, unit_reaction, grid, 0.2)
    path = tmp_path / "op.txt"
    dump_operator(op, path)
    rows, cols, vals = [], [], []
    for line in path.read_text().splitlines():
        r, c, v = line.split()
        rows.append(int(r))
        cols.append(int(c))
        vals.append(float(v))
    rebuilt = sp.coo_matrix((vals, (rows, cols)), shape=(grid.dim, grid.dim)).toarray()
    assert np.allclose(rebuilt, op.matrix.toarray(), atol=0, rtol=0)
