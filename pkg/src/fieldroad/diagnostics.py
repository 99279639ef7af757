"""Front measurements on trajectories and the two structural checks:
the spreading dichotomy and the pulsating-front periodicity relation.

All operations are pure post-processing over immutable trajectories.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DiagnosticsError
from .model import ModelParams
from .simulate import Trajectory
from .steady import SteadyState, tile_steady

__all__ = [
    "FrontTrace",
    "SpeedFit",
    "DichotomyReport",
    "PulsatingDeviation",
    "track_front",
    "estimate_speed",
    "dichotomy_check",
    "pulsating_diagnostic",
]


@dataclass
class FrontTrace:
    times: np.ndarray
    pos_right: np.ndarray
    pos_left: np.ndarray
    level: float

    @property
    def empty(self) -> bool:
        return bool(np.all(np.isnan(self.pos_right)))


@dataclass
class SpeedFit:
    c_hat: float
    stderr: float
    intercept: float
    r2: float
    n: int


def _crossings(x: np.ndarray, u: np.ndarray, level: float):
    """Outermost positions where u crosses level, linearly interpolated."""
    above = u >= level
    if not np.any(above):
        return math.nan, math.nan
    idx = np.nonzero(above)[0]
    i_r = idx[-1]
    if i_r == len(u) - 1:
        right = x[i_r]
    else:
        right = x[i_r] + (x[i_r + 1] - x[i_r]) * (u[i_r] - level) / (u[i_r] - u[i_r + 1])
    i_l = idx[0]
    if i_l == 0:
        left = x[0]
    else:
        left = x[i_l] - (x[i_l] - x[i_l - 1]) * (u[i_l] - level) / (u[i_l] - u[i_l - 1])
    return right, left


def track_front(trajectory: Trajectory, level: float) -> FrontTrace:
    """Per-snapshot outermost road positions where u crosses the level."""
    if level <= 0:
        raise ValueError("level must be > 0")
    x = trajectory.grid.x_nodes
    rights, lefts = [], []
    for state in trajectory.states:
        r, l = _crossings(x, state.u, level)
        rights.append(r)
        lefts.append(l)
    return FrontTrace(
        times=np.asarray(trajectory.times),
        pos_right=np.asarray(rights),
        pos_left=np.asarray(lefts),
        level=level,
    )


def estimate_speed(trace: FrontTrace, window_fraction: float = 0.5, side: str = "right") -> SpeedFit:
    """Least-squares front speed over the trailing window of the trace."""
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must be in (0, 1]")
    pos = trace.pos_right if side == "right" else trace.pos_left
    valid = ~np.isnan(pos)
    t = trace.times[valid]
    p = pos[valid]
    n_tail = int(math.ceil(window_fraction * len(t)))
    t, p = t[-n_tail:], p[-n_tail:]
    if len(t) < 10:
        raise DiagnosticsError(
            f"need >= 10 samples in the trailing window, have {len(t)}"
        )
    tbar = t - t.mean()
    denom = float(np.dot(tbar, tbar))
    slope = float(np.dot(tbar, p) / denom)
    intercept = float(p.mean() - slope * t.mean())
    resid = p - (slope * t + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(p - p.mean(), p - p.mean()))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    sigma2 = ss_res / max(len(t) - 2, 1)
    stderr = math.sqrt(sigma2 / denom)
    return SpeedFit(c_hat=slope, stderr=stderr, intercept=intercept, r2=r2, n=len(t))


@dataclass
class DichotomyReport:
    outer_pass: bool
    inner_pass: Optional[bool]
    outer_sup: float
    inner_sup: Optional[float]
    outer_region_empty: bool
    t_final: float

    @property
    def ok(self) -> bool:
        return self.outer_pass and self.inner_pass is not False


def dichotomy_check(
    trajectory: Trajectory,
    c_star: float,
    steady: SteadyState,
    period_grid,
    factor_out: float = 1.2,
    factor_in: float = 0.8,
    out_threshold: float = 1e-3,
    in_threshold: float = 5e-2,
) -> DichotomyReport:
    """Spreading dichotomy on the final snapshot.

    Outside |x| >= factor_out c* t the solution must be below out_threshold;
    inside |x| <= factor_in c* t it must be within in_threshold of the tiled
    steady state. The inner clause is marked inapplicable when the solution
    never grew above out_threshold (nothing spread).
    """
    grid = trajectory.grid
    state = trajectory.final
    t = state.t
    x = grid.x_nodes

    if state.sup_norm() < out_threshold:
        return DichotomyReport(
            outer_pass=True, inner_pass=None, outer_sup=state.sup_norm(),
            inner_sup=None, outer_region_empty=False, t_final=t,
        )

    outer = np.abs(x) >= factor_out * c_star * t
    if np.any(outer):
        outer_sup = max(
            float(np.max(np.abs(state.u[outer]))),
            float(np.max(np.abs(state.v[:, outer]))),
        )
        outer_empty = False
    else:
        outer_sup = 0.0
        outer_empty = True
    outer_pass = outer_sup < out_threshold

    inner = np.abs(x) <= factor_in * c_star * t
    if np.any(inner):
        U_w, V_w = tile_steady(steady, period_grid, grid)
        inner_sup = max(
            float(np.max(np.abs(state.u[inner] - U_w[inner]))),
            float(np.max(np.abs(state.v[:, inner] - V_w[:, inner]))),
        )
        inner_pass = inner_sup < in_threshold
    else:
        inner_sup = None
        inner_pass = None

    return DichotomyReport(
        outer_pass=outer_pass, inner_pass=inner_pass, outer_sup=outer_sup,
        inner_sup=inner_sup, outer_region_empty=outer_empty, t_final=t,
    )


@dataclass
class PulsatingDeviation:
    road: float
    field: float
    pairs: int

    @property
    def overall(self) -> float:
        return max(self.road, self.field)


def pulsating_diagnostic(
    trajectory: Trajectory,
    c: float,
    params: ModelParams,
    level: Optional[float] = None,
    late_fraction: float = 0.5,
    window_back: float = 5.0,
    window_fwd: float = 3.0,
    y_fracs=(0.0, 0.25, 0.5),
) -> PulsatingDeviation:
    """Deviation from the pulsating relation u(t + L/c, x) = u(t, x - L).

    Snapshot times must contain t and t + L/c on their grid (align dt before
    recording), and the window spacing must resolve one period exactly. The
    sup runs over late-time snapshot pairs and an x-window following the
    front; the field is probed at the given fractions of the width.
    """
    if c <= 0:
        raise ValueError("c must be > 0")
    grid = trajectory.grid
    L = params.L
    times = np.asarray(trajectory.times)
    if len(times) < 3:
        raise DiagnosticsError("trajectory too short for the pulsating diagnostic")
    tau = L / c
    # pair each snapshot with the one a time tau later, by time lookup
    tol_t = 1e-6 * max(tau, 1.0)
    partners = np.full(len(times), -1)
    for idx, t in enumerate(times):
        j = int(np.searchsorted(times, t + tau))
        for cand in (j - 1, j):
            if 0 <= cand < len(times) and abs(times[cand] - (t + tau)) <= tol_t:
                partners[idx] = cand
                break
    if not np.any(partners >= 0):
        raise DiagnosticsError(
            f"L/c = {tau:.6g} is not an integer multiple of the snapshot spacing; "
            "adjust dt"
        )
    shift = L / grid.dx
    if abs(shift - round(shift)) > 1e-9:
        raise DiagnosticsError("one period is not an integer number of x cells")
    shift = int(round(shift))

    if level is None:
        level = 0.1 * params.capacity[0]
    x = grid.x_nodes
    t_min = times[0] + late_fraction * (times[-1] - times[0])
    dev_road = 0.0
    dev_field = 0.0
    pairs = 0
    j_rows = sorted({min(int(round(f * grid.ny)), grid.ny - 1) for f in y_fracs})
    for idx in range(len(times)):
        if times[idx] < t_min or partners[idx] < 0:
            continue
        s0 = trajectory.states[idx]
        s1 = trajectory.states[partners[idx]]
        right, _ = _crossings(x, s0.u, level)
        if math.isnan(right):
            continue
        in_window = (x >= right - window_back * L) & (x <= right + window_fwd * L)
        sel = np.nonzero(in_window)[0]
        sel = sel[sel >= shift]  # x - L must stay on the grid
        if len(sel) == 0:
            continue
        pairs += 1
        dev_road = max(dev_road, float(np.max(np.abs(s1.u[sel] - s0.u[sel - shift]))))
        for j in j_rows:
            dev_field = max(
                dev_field, float(np.max(np.abs(s1.v[j, sel] - s0.v[j, sel - shift])))
            )
    if pairs == 0:
        raise DiagnosticsError("no usable snapshot pairs for the pulsating diagnostic")
    return PulsatingDeviation(road=dev_road, field=dev_field, pairs=pairs)
