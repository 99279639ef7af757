"""Strip grid and sparse finite-difference operators.

Unknown ordering is fixed: the road block first (i = 0..nx-1), then the field
rows j = 0..ny-1 in row-major order (j outer, i inner). The node (i, ny)
carries the Dirichlet value v = 0 and is eliminated; the exchange condition at
y = 0 is eliminated through a second-order ghost node. Diffusion uses centered
second-order differences; the advection terms introduced by the twist
parameter alpha are centered while |alpha| dx <= 1/2 and first-order upwind
beyond that, so the shifted operator keeps the M-matrix sign pattern either
way. The regime actually used is recorded on the operator.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError
from .model import ModelParams, ReactionSpec, fv0

__all__ = [
    "StripGrid",
    "DiscreteOperator",
    "build_grid",
    "build_window_grid",
    "assemble_eigen_operator",
    "assemble_evolution_operator",
    "peclet_ok",
    "dump_operator",
]

PECLET_LIMIT = 0.5


@dataclass(frozen=True)
class StripGrid:
    """Discretization of one x-window of the strip [0, width) x [0, R].

    nx cells across the window (periodic wrap or homogeneous Neumann far
    ends), ny intervals across [0, R]; field unknowns live at y_j = j dy for
    j = 0..ny-1, the row j = ny being the eliminated Dirichlet cap.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    width: float
    R: float
    periodic: bool = True
    x0: float = 0.0

    @property
    def dim(self) -> int:
        return self.nx + self.nx * self.ny

    def road_index(self, i):
        return np.asarray(i) % self.nx if self.periodic else np.asarray(i)

    def field_index(self, i, j):
        return self.nx + np.asarray(j) * self.nx + np.asarray(i)

    @property
    def x_nodes(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def y_nodes(self) -> np.ndarray:
        """Field node ordinates, excluding the eliminated cap at y = R."""
        return self.dy * np.arange(self.ny)

    def split(self, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Split a dim-vector into the road part (nx,) and field part (ny, nx)."""
        vec = np.asarray(vec)
        return vec[: self.nx], vec[self.nx :].reshape(self.ny, self.nx)

    def join(self, road: np.ndarray, fld: np.ndarray) -> np.ndarray:
        return np.concatenate([np.asarray(road).ravel(), np.asarray(fld).ravel()])


@dataclass(frozen=True)
class DiscreteOperator:
    """Sparse operator A with A (p, q) ~ sigma (p, q) on the grid's ordering."""

    matrix: sp.csr_matrix
    grid: StripGrid
    alpha: float
    regime: str
    shift_applied: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def entries(self):
        """Coordinate triplets (row, col, value), deterministically ordered."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return np.stack(
            [coo.row[order], coo.col[order], coo.data[order]], axis=1
        )

    def shifted(self, shift: float) -> sp.csr_matrix:
        return (self.matrix + shift * sp.identity(self.dim, format="csr")).tocsr()


def build_grid(params: ModelParams, nx: int, ny: int) -> StripGrid:
    """Periodic grid over one x-period [0, L) with ny intervals across [0, R]."""
    _check_resolution(nx, ny)
    return StripGrid(
        nx=nx,
        ny=ny,
        dx=params.L / nx,
        dy=params.R / ny,
        width=params.L,
        R=params.R,
        periodic=True,
    )


def build_window_grid(params: ModelParams, nx_per_period: int, ny: int, copies: int) -> StripGrid:
    """Neumann-ended window of `copies` periods, centered at x = 0.

    Used by spreading runs; the far x-ends carry homogeneous Neumann
    conditions instead of the periodic wrap.
    """
    _check_resolution(nx_per_period, ny)
    if copies < 1:
        raise ConfigError(f"domain_copies must be >= 1, got {copies}")
    width = copies * params.L
    nx = copies * nx_per_period
    return StripGrid(
        nx=nx,
        ny=ny,
        dx=params.L / nx_per_period,
        dy=params.R / ny,
        width=width,
        R=params.R,
        periodic=False,
        x0=-width / 2.0,
    )


def _check_resolution(nx: int, ny: int):
    if nx < 4 or ny < 4:
        raise ConfigError(f"grid needs nx >= 4 and ny >= 4, got nx={nx}, ny={ny}")


def peclet_ok(alpha: float, dx: float) -> bool:
    return abs(alpha) * dx <= PECLET_LIMIT


class _CooBuilder:
    def __init__(self):
        self.rows = []
        self.cols = []
        self.vals = []

    def add(self, rows, cols, vals):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.broadcast_to(np.asarray(vals, dtype=float), rows.shape).ravel()
        self.rows.append(rows)
        self.cols.append(cols)
        self.vals.append(vals)

    def to_csr(self, dim):
        rows = np.concatenate(self.rows)
        cols = np.concatenate(self.cols)
        vals = np.concatenate(self.vals)
        return sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()


def _advection_coeffs(diffusivity: float, alpha: float, dx: float, centered: bool):
    """(diag, plus, minus) contributions of 2*diffusivity*alpha*d/dx."""
    if alpha == 0.0:
        return 0.0, 0.0, 0.0
    if centered:
        c = diffusivity * alpha / dx
        return 0.0, c, -c
    c = 2.0 * diffusivity * alpha / dx
    if alpha > 0:
        return c, 0.0, -c  # backward difference
    return -c, c, 0.0  # forward difference


def _x_neighbor_cols(nx: int, periodic: bool):
    i = np.arange(nx)
    ip = (i + 1) % nx
    im = (i - 1) % nx
    if not periodic:
        # homogeneous Neumann: ghost reflection folds the outer neighbor back in
        ip = ip.copy()
        im = im.copy()
        ip[nx - 1] = nx - 2
        im[0] = 1
    return i, ip, im


def _assemble(
    params: ModelParams,
    spec: ReactionSpec,
    grid: StripGrid,
    alpha: float,
    with_linearized_reaction: bool,
) -> DiscreteOperator:
    if not grid.periodic and alpha != 0.0:
        raise ConfigError("twisted operators are only defined on the periodic cell")
    centered = peclet_ok(alpha, grid.dx)
    regime = "centered" if centered else "upwind"
    D, d, mu, nu = params.D, params.d, params.mu, params.nu
    dx, dy, nx, ny = grid.dx, grid.dy, grid.nx, grid.ny
    zeta = np.asarray(fv0(spec, grid.x_nodes), dtype=float)

    b = _CooBuilder()
    i, ip, im = _x_neighbor_cols(nx, grid.periodic)

    # road block: -D p'' + 2 D alpha p' + (-D alpha^2 + mu) p - nu q(., 0)
    adv_diag, adv_plus, adv_minus = _advection_coeffs(D, alpha, dx, centered)
    b.add(i, i, 2.0 * D / dx**2 - D * alpha**2 + mu + adv_diag)
    b.add(i, ip, -D / dx**2 + adv_plus)
    b.add(i, im, -D / dx**2 + adv_minus)
    b.add(i, grid.field_index(i, 0), -nu)

    # field block: -d Lap q + 2 d alpha dq/dx - (d alpha^2 + zeta) q
    adv_diag, adv_plus, adv_minus = _advection_coeffs(d, alpha, dx, centered)
    zero_order = -d * alpha**2 + adv_diag
    if with_linearized_reaction:
        zero_order = zero_order - zeta
    for j in range(ny):
        rows = grid.field_index(i, j)
        diag = 2.0 * d / dx**2 + 2.0 * d / dy**2 + zero_order
        if j == 0:
            # ghost elimination of -d dq/dy(x,0) + nu q(x,0) - mu p = 0
            diag = diag + 2.0 * nu / dy
            b.add(rows, i, -2.0 * mu / dy)
            if ny > 1:
                b.add(rows, grid.field_index(i, 1), -2.0 * d / dy**2)
        else:
            b.add(rows, grid.field_index(i, j - 1), -d / dy**2)
            if j < ny - 1:
                b.add(rows, grid.field_index(i, j + 1), -d / dy**2)
            # j = ny-1: the neighbor at y = R is the eliminated Dirichlet node
        b.add(rows, rows, diag)
        b.add(rows, grid.field_index(ip, j), -d / dx**2 + adv_plus)
        b.add(rows, grid.field_index(im, j), -d / dx**2 + adv_minus)

    matrix = b.to_csr(grid.dim)
    return DiscreteOperator(matrix=matrix, grid=grid, alpha=alpha, regime=regime)


def assemble_eigen_operator(
    params: ModelParams, spec: ReactionSpec, grid: StripGrid, alpha: float
) -> DiscreteOperator:
    """Discrete operator of the twisted periodic eigenvalue problem."""
    return _assemble(params, spec, grid, alpha, with_linearized_reaction=True)


def assemble_evolution_operator(
    params: ModelParams, spec: ReactionSpec, grid: StripGrid
) -> DiscreteOperator:
    """Linear part (diffusion + exchange + Dirichlet cap) for the IMEX stepper.

    Identical to the eigen operator at alpha = 0 minus the zeroth-order
    reaction term.
    """
    return _assemble(params, spec, grid, 0.0, with_linearized_reaction=False)


def dump_operator(op: DiscreteOperator, path):
    """Write the operator as coordinate-format text: `row col value` per line."""
    with open(path, "w") as fh:
        for row, col, val in op.entries:
            fh.write(f"{int(row)} {int(col)} {format(float(val), '.17g')}\n")
