"""Principal eigenvalue of the twisted periodic problem and its half-plane limit.

The eigenvalue with a positive eigenfunction pair is isolated by shifting:
for Lambda at least the explicit bound of :func:`shift_bound`, the shifted
operator has the M-matrix sign pattern, so its inverse is positive and the
target eigenvalue is the reciprocal of the inverse's dominant one. Power
iteration on a sparse LU factorization of the shifted operator therefore
converges to the positive pair from the all-ones vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .discrete import DiscreteOperator, StripGrid, assemble_eigen_operator, build_grid
from .errors import ConvergenceError, NumericalError
from .model import ModelParams, ReactionSpec

__all__ = [
    "EigenPair",
    "HalfPlaneEigen",
    "GridPolicy",
    "shift_bound",
    "principal_eigen",
    "eigen_bounds",
    "verify_eigen_properties",
    "halfplane_eigen",
]


def shift_bound(params: ModelParams, spec: ReactionSpec, alpha: float) -> float:
    """Shift above which the shifted operator is invertible with positive inverse.

    Equals max(D a^2 + nu - mu + mu nu / d, d (a^2 + 1) + M); even in alpha.
    """
    road = params.D * alpha**2 + params.nu - params.mu + params.mu * params.nu / params.d
    fld = params.d * (alpha**2 + 1.0) + spec.M
    return max(road, fld)


def eigen_bounds(params: ModelParams, spec: ReactionSpec, alpha: float, R: float):
    """Two-sided strip bounds (lower, upper) on -lambda_R(alpha)."""
    lower = max(
        params.D * alpha**2 - params.mu,
        params.d * alpha**2 + spec.m - params.d * math.pi**2 / R**2,
    )
    upper = max(
        params.D * alpha**2 + params.nu - params.mu + params.mu * params.nu / params.d,
        params.d * (alpha**2 + 1.0) + spec.M,
    )
    return lower, upper


@dataclass
class EigenPair:
    """Converged eigen data: A (p, q) = lam (p, q) with p, q > 0, ||p||_inf = 1."""

    alpha: float
    lam: float
    p: np.ndarray
    q: np.ndarray
    residual: float
    iterations: int
    shift_used: float
    regime: str

    def vector(self, grid: StripGrid) -> np.ndarray:
        return grid.join(self.p, self.q)


def principal_eigen(
    params: ModelParams,
    spec: ReactionSpec,
    grid: StripGrid,
    alpha: float,
    tol: float = 1e-10,
    max_iter: int = 200_000,
    v0: Optional[np.ndarray] = None,
    operator: Optional[DiscreteOperator] = None,
) -> EigenPair:
    """Principal eigenvalue and positive eigenvector pair on the strip.

    Factorizes (A + Lambda I) with Lambda = shift_bound + 1 and runs power
    iteration on its inverse, by default from the all-ones vector, until both
    the eigenvector sup-change and the eigen residual drop below tol. Returns
    lam = 1/rho - Lambda where rho is the converged Rayleigh quotient of the
    inverse. An optional v0 (nonnegative, nonzero) warm-starts sweeps; the
    default start keeps standalone calls deterministic. Tolerances below the
    rounding floor 100 eps ||A|| of the residual evaluation are clamped to it.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    op = operator if operator is not None else assemble_eigen_operator(params, spec, grid, alpha)
    lam_shift = shift_bound(params, spec, alpha) + 1.0
    shifted = op.shifted(lam_shift).tocsc()
    lu = spla.splu(shifted)

    # residual cannot drop below the rounding floor of applying A itself
    norm_A = float(np.max(np.abs(op.matrix).sum(axis=1)))
    res_target = max(tol, 100.0 * np.finfo(float).eps * norm_A)

    if v0 is None:
        x = np.ones(grid.dim)
    else:
        x = np.asarray(v0, dtype=float).copy()
        if x.shape != (grid.dim,) or np.any(x < 0) or not np.any(x > 0):
            raise ValueError("v0 must be a nonnegative, nonzero vector of grid dimension")
        x /= np.max(x)

    A = op.matrix
    lam = math.nan
    res = math.inf
    supchange = math.inf
    for iteration in range(1, max_iter + 1):
        y = lu.solve(x)
        if np.min(y) <= 0.0:
            raise NumericalError(
                "non-positive power iterate: M-matrix structure violated, refine the grid "
                f"(alpha={alpha}, regime={op.regime})"
            )
        rho = float(np.dot(x, y) / np.dot(x, x))
        lam = 1.0 / rho - lam_shift
        y_max = float(np.max(y))
        x_new = y / y_max
        supchange = float(np.max(np.abs(x_new - x)))
        x = x_new
        if supchange < tol:
            res = float(np.max(np.abs(A @ x - lam * x)) / np.max(np.abs(x)))
            if res <= res_target:
                break
    else:
        raise ConvergenceError(
            f"power iteration did not converge in {max_iter} iterations",
            diagnostics={
                "alpha": alpha,
                "sup_change": supchange,
                "residual": res,
                "lambda": lam,
            },
        )

    p, q = grid.split(x)
    scale = float(np.max(p))
    p = p / scale
    q = q / scale
    return EigenPair(
        alpha=alpha,
        lam=lam,
        p=p,
        q=q,
        residual=res,
        iterations=iteration,
        shift_used=lam_shift,
        regime=op.regime,
    )


# ---------------------------------------------------------------------------
# half-plane limit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridPolicy:
    """How grids grow along the width schedule R0 * {1, 2, 4, ...}.

    nx is fixed on one period; dy is held fixed so ny scales with R. The
    schedule stops at R_max; eigen solves run at eigen_tol.
    """

    nx: int = 64
    dy: float = 0.1
    R0: float = 5.0
    R_max: float = 40.0
    eigen_tol: float = 1e-8

    def schedule(self) -> list[float]:
        widths = []
        R = self.R0
        while R <= self.R_max * (1.0 + 1e-12):
            widths.append(R)
            R *= 2.0
        return widths

    def grid_for(self, params: ModelParams, R: float):
        params_R = replace(params, R=R)
        ny = max(4, int(round(R / self.dy)))
        return params_R, build_grid(params_R, self.nx, ny)


@dataclass
class HalfPlaneEigen:
    """lambda_R(alpha) along the width schedule and its monotone limit."""

    alpha: float
    lambda_inf: float
    R_schedule: list[float]
    lambdas: list[float]
    converged: bool
    pairs_last: Optional[EigenPair] = None


def _prolong_field(p: np.ndarray, q: np.ndarray, grid_new: StripGrid) -> np.ndarray:
    """Extend an eigenvector from a narrower strip onto a wider grid."""
    ny_old, nx = q.shape
    v = np.zeros((grid_new.ny, nx))
    v[:ny_old, :] = q
    extra = grid_new.ny - ny_old
    if extra > 0:
        taper = 1.0 - (np.arange(1, extra + 1) / extra)
        v[ny_old:, :] = q[-1, :][None, :] * taper[:, None]
    return np.concatenate([p, v.ravel()])


def halfplane_eigen(
    params: ModelParams,
    spec: ReactionSpec,
    alpha: float,
    grid_policy: GridPolicy,
    tol_limit: float = 1e-3,
    warm_cache: Optional[dict] = None,
) -> HalfPlaneEigen:
    """Monotone approximation of the half-plane eigenvalue lambda(alpha).

    Runs the width schedule until successive values differ by less than
    tol_limit (converged) or the schedule is exhausted. The sequence must be
    strictly decreasing; each value is checked against the two-sided strip
    bounds, whose lower side carries the d pi^2 / R^2 width correction (the
    uncorrected half-plane lower bound is only reached in the limit).

    A warm_cache dict (keyed by width) lets sweeps reuse the eigenvector of
    the previous call at the same width as the power-iteration start; it is
    updated in place and never changes the converged values.
    """
    if tol_limit <= 0:
        raise ValueError("tol_limit must be > 0")
    lambdas: list[float] = []
    widths: list[float] = []
    converged = False
    pair = None
    for R in grid_policy.schedule():
        params_R, grid_R = grid_policy.grid_for(params, R)
        v0 = None if warm_cache is None else warm_cache.get(R)
        if v0 is not None and v0.shape != (grid_R.dim,):
            v0 = None
        if v0 is None and pair is not None:
            v0 = _prolong_field(pair.p, pair.q, grid_R)
        pair = principal_eigen(
            params_R, spec, grid_R, alpha, tol=grid_policy.eigen_tol, v0=v0
        )
        if warm_cache is not None:
            warm_cache[R] = grid_R.join(pair.p, pair.q)
        lower, upper = eigen_bounds(params_R, spec, alpha, R)
        if not (lower < -pair.lam < upper):
            raise NumericalError(
                f"eigenvalue bound violated at R={R}: -lambda={-pair.lam}, "
                f"bounds=({lower}, {upper}); grid too coarse"
            )
        widths.append(R)
        lambdas.append(pair.lam)
        if len(lambdas) >= 2:
            if not lambdas[-1] < lambdas[-2]:
                raise NumericalError(
                    f"lambda_R failed to decrease between R={widths[-2]} and R={R}; "
                    "grid too coarse"
                )
            if abs(lambdas[-1] - lambdas[-2]) < tol_limit:
                converged = True
                break
    return HalfPlaneEigen(
        alpha=alpha,
        lambda_inf=lambdas[-1],
        R_schedule=widths,
        lambdas=lambdas,
        converged=converged,
        pairs_last=pair,
    )


# ---------------------------------------------------------------------------
# structural property verification
# ---------------------------------------------------------------------------


@dataclass
class PropertyCheck:
    name: str
    passed: bool
    worst_margin: float
    details: list = field(default_factory=list)


@dataclass
class EigenPropertyReport:
    checks: dict
    refined: bool = False

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def lines(self):
        for name, check in self.checks.items():
            status = "pass" if check.passed else "FAIL"
            yield f"{name:<24s} {status}  worst margin {check.worst_margin:+.3e}"


def _shift_linearization(spec: ReactionSpec, delta: float) -> ReactionSpec:
    """Reaction spec whose linearization is fv0(spec, x) + delta."""
    if spec.family == "logistic":
        coeff = replace(spec.coefficient, mean=spec.coefficient.mean + delta)
        return replace(spec, coefficient=coeff)
    base_fv0 = spec.f_v0
    base_f = spec.f
    return ReactionSpec(
        family="custom",
        period=spec.period,
        f=lambda x, v: base_f(x, v) + delta * v,
        f_v0=lambda x: base_fv0(x) + delta,
    )


def verify_eigen_properties(
    params: ModelParams,
    spec: ReactionSpec,
    grid: StripGrid,
    alphas: Sequence[float],
    R_list: Sequence[float],
    tol_num: float = 1e-8,
    eigen_tol: float = 1e-10,
    auto_refine: bool = True,
) -> EigenPropertyReport:
    """Check bounds, evenness, R-monotonicity, concavity and zeta-monotonicity.

    Samples every (alpha, R) pair on grids that keep the given grid's spacing
    (ny rescales with R). A failing check triggers one automatic refinement
    (double nx, halve dy) before the failure is reported.
    """
    if not alphas or not R_list:
        raise ValueError("alphas and R_list must be nonempty")

    def run(nx: int, dy: float) -> EigenPropertyReport:
        alpha_sorted = sorted(set(float(a) for a in alphas))
        R_sorted = sorted(set(float(R) for R in R_list))
        lam = {}

        def eig(a: float, R: float, rspec: ReactionSpec = spec) -> float:
            key = (a, R, id(rspec))
            if key not in lam:
                params_R = replace(params, R=R)
                grid_R = build_grid(params_R, nx, max(4, int(round(R / dy))))
                lam[key] = principal_eigen(params_R, rspec, grid_R, a, tol=eigen_tol).lam
            return lam[key]

        checks = {}

        # (a) strict two-sided bounds at every sampled pair
        margins = []
        details = []
        for R in R_sorted:
            for a in alpha_sorted:
                lower, upper = eigen_bounds(params, spec, a, R)
                neg = -eig(a, R)
                lo_margin = neg - lower
                hi_margin = upper - neg
                margins.extend([lo_margin, hi_margin])
                if lo_margin <= 0 or hi_margin <= 0:
                    details.append(f"bounds fail at alpha={a}, R={R}: -lambda={neg}")
        checks["bounds"] = PropertyCheck("bounds", not details, min(margins), details)

        # (b) evenness lambda(alpha) = lambda(-alpha)
        margins = []
        details = []
        for R in R_sorted:
            for a in alpha_sorted:
                if a <= 0:
                    continue
                l1, l2 = eig(a, R), eig(-a, R)
                rel = abs(l1 - l2) / max(1.0, abs(l1))
                margins.append(tol_num - rel)
                if rel > tol_num:
                    details.append(f"evenness fails at alpha={a}, R={R}: rel diff {rel}")
        if not margins:
            margins = [0.0]
        checks["evenness"] = PropertyCheck("evenness", not details, min(margins), details)

        # (c) strict decrease in R
        margins = []
        details = []
        for a in alpha_sorted:
            for R1, R2 in zip(R_sorted, R_sorted[1:]):
                drop = eig(a, R1) - eig(a, R2)
                margins.append(drop)
                if drop <= 0:
                    details.append(f"lambda not decreasing in R at alpha={a}: R {R1}->{R2}")
        checks["R-monotonicity"] = PropertyCheck("R-monotonicity", not details, min(margins), details)

        # (d) midpoint concavity on consecutive alpha pairs
        margins = []
        details = []
        for R in R_sorted:
            for a1, a2 in zip(alpha_sorted, alpha_sorted[1:]):
                mid = 0.5 * (a1 + a2)
                surplus = eig(mid, R) - 0.5 * (eig(a1, R) + eig(a2, R)) + tol_num
                margins.append(surplus)
                if surplus < 0:
                    details.append(f"concavity fails on ({a1}, {a2}) at R={R}")
        checks["concavity"] = PropertyCheck("concavity", not details, min(margins), details)

        # (e) lambda non-increasing when the linearization is raised by 0.1
        raised = _shift_linearization(spec, 0.1)
        margins = []
        details = []
        for R in R_sorted:
            for a in alpha_sorted:
                drop = eig(a, R) - eig(a, R, raised)
                margins.append(drop + tol_num)
                if drop < -tol_num:
                    details.append(f"zeta-monotonicity fails at alpha={a}, R={R}")
        checks["zeta-monotonicity"] = PropertyCheck("zeta-monotonicity", not details, min(margins), details)

        return EigenPropertyReport(checks=checks)

    report = run(grid.nx, grid.dy)
    if not report.ok and auto_refine:
        report = run(2 * grid.nx, grid.dy / 2.0)
        report.refined = True
    return report
