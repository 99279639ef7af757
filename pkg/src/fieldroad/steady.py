"""Nontrivial steady state of the truncated problem by monotone bracketing.

Above the persistence threshold the evolution started from the constant
supersolution (nu/mu, 1) decreases in time while the evolution from a small
multiple of the strict subsolution increases; both squeeze onto the unique
positive steady state, so the gap between them is a two-sided error
certificate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discrete import StripGrid
from .errors import ConvergenceError
from .model import ModelParams, ReactionSpec
from .simulate import SimConfig, State, Stepper, subsolution_profile

__all__ = [
    "PersistenceReport",
    "SteadyState",
    "persistence_check",
    "compute_steady",
    "tile_steady",
]


@dataclass(frozen=True)
class PersistenceReport:
    holds: bool
    margin: float


def persistence_check(params: ModelParams, spec: ReactionSpec) -> PersistenceReport:
    """Sufficient persistence condition m > d pi^2 / (4 R^2), with its margin."""
    margin = spec.m - params.d * math.pi**2 / (4.0 * params.R**2)
    return PersistenceReport(holds=margin > 0, margin=margin)


@dataclass
class SteadyState:
    """Bracketed steady profiles with stationarity and bracket diagnostics."""

    U: np.ndarray
    V: np.ndarray
    residual: float
    bracket_gap: float
    persistent: bool
    steps: int


def _stationary_residual(stepper: Stepper, state: State) -> float:
    grid = stepper.grid
    w = grid.join(state.u, state.v)
    r = np.zeros(grid.dim)
    r[grid.nx :] = stepper.reaction(state.v).ravel()
    return float(np.max(np.abs(stepper.operator.matrix @ w - r)))


def _largest_growing_epsilon(stepper: Stepper, base: State, eps_start: float) -> float:
    """Power-of-two search for the largest epsilon whose scaled subsolution
    is increased pointwise by one step."""
    eps = eps_start
    for _ in range(60):
        state = State(0.0, eps * base.u, eps * base.v)
        new = stepper.step(state)
        if np.all(new.u >= state.u - 1e-15) and np.all(new.v >= state.v - 1e-15):
            return eps
        eps *= 0.5
    raise ConvergenceError("no epsilon makes the subsolution grow under one step")


def compute_steady(
    params: ModelParams,
    spec: ReactionSpec,
    grid: StripGrid,
    tol: float = 1e-8,
    dt: float = None,
    max_steps: int = 500_000,
) -> SteadyState:
    """Squeeze the steady state between monotone upper and lower evolutions.

    Returns the zero state flagged non-persistent when the sufficient
    condition fails. Otherwise integrates from (nu/mu, 1) downward and from
    the largest admissible multiple of the x-uniform subsolution upward until
    both sequences move less than tol per step and their gap is below 10 tol;
    the average is returned together with both diagnostics.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    report = persistence_check(params, spec)
    if not report.holds:
        zero = np.zeros((grid.ny, grid.nx))
        return SteadyState(
            U=np.zeros(grid.nx), V=zero, residual=0.0, bracket_gap=0.0,
            persistent=False, steps=0,
        )

    if dt is None:
        dt = 0.4 / spec.M
    config = SimConfig(dt=dt, T=math.inf, scheme="imex_be")
    stepper = Stepper(params, spec, grid, config)

    cap_u, _ = params.capacity
    upper = State(0.0, np.full(grid.nx, cap_u), np.ones((grid.ny, grid.nx)))

    # x-uniform periodization of the strict subsolution (omega = 0 admissible
    # on the periodic cell since the road inequality only needs cos(beta R) < 0)
    _, _, _, Y = subsolution_profile(params, spec)
    yvals = Y(grid.y_nodes)
    base = State(0.0, np.ones(grid.nx), np.tile(yvals[:, None], (1, grid.nx)))
    eps_start = 0.5 * min(cap_u, 1.0 / float(np.max(yvals)))
    eps = _largest_growing_epsilon(stepper, base, eps_start)
    lower = State(0.0, eps * base.u, eps * base.v)

    gap = math.inf
    for k in range(1, max_steps + 1):
        upper_next = stepper.step(upper)
        lower_next = stepper.step(lower)
        change = max(
            float(np.max(np.abs(upper_next.u - upper.u))),
            float(np.max(np.abs(upper_next.v - upper.v))),
            float(np.max(np.abs(lower_next.u - lower.u))),
            float(np.max(np.abs(lower_next.v - lower.v))),
        )
        upper, lower = upper_next, lower_next
        gap = max(
            float(np.max(np.abs(upper.u - lower.u))),
            float(np.max(np.abs(upper.v - lower.v))),
        )
        if gap < 10.0 * tol and change < tol:
            break
    else:
        raise ConvergenceError(
            f"steady bracket did not close in {max_steps} steps",
            diagnostics={"gap": gap},
        )

    U = 0.5 * (upper.u + lower.u)
    V = 0.5 * (upper.v + lower.v)
    residual = _stationary_residual(stepper, State(0.0, U, V))
    return SteadyState(U=U, V=V, residual=residual, bracket_gap=gap, persistent=True, steps=k)


def tile_steady(steady: SteadyState, period_grid: StripGrid, window_grid: StripGrid):
    """Extend periodic steady profiles onto a window grid by periodic wrap.

    Window nodes are mapped to their phase in [0, L) and linearly
    interpolated between period nodes.
    """
    L = period_grid.width
    phase = (window_grid.x_nodes % L) / period_grid.dx
    i0 = np.floor(phase).astype(int) % period_grid.nx
    i1 = (i0 + 1) % period_grid.nx
    w = phase - np.floor(phase)
    U = (1.0 - w) * steady.U[i0] + w * steady.U[i1]
    if window_grid.ny != period_grid.ny:
        raise ValueError("window grid must share the period grid's y resolution")
    V = (1.0 - w)[None, :] * steady.V[:, i0] + w[None, :] * steady.V[:, i1]
    return U, V
