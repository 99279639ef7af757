import math

import numpy as np
import pytest

from fieldroad import (
    DomainError,
    GridPolicy,
    ModelParams,
    PeriodicCoefficient,
    build_grid,
    homogeneous_logistic,
    logistic_reaction,
    principal_eigen,
    sample_dispersion,
    speed_halfplane,
    speed_strip,
)


def test_homogeneous_strip_speed_near_kpp():
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=30.0)
    spec = homogeneous_logistic(1.0, 1.0)
    grid = build_grid(params, 32, 300)
    res = speed_strip(params, spec, grid, tol_alpha=1e-3, eigen_tol=1e-8)
    assert res.c_star < 2.0
    assert abs(res.c_star - 2.0) / 2.0 < 0.05
    assert res.alpha_star == pytest.approx(1.0, abs=0.05)


def test_fast_road_enhances_speed():
    params = ModelParams(D=10, d=1, mu=1, nu=1, L=1, R=30.0)
    spec = homogeneous_logistic(1.0, 1.0)
    grid = build_grid(params, 32, 300)
    res = speed_strip(params, spec, grid, tol_alpha=1e-3, eigen_tol=1e-8)
    assert res.c_star > 2.05


def test_left_right_coincide():
    params = ModelParams(D=2, d=1, mu=0.7, nu=1.3, L=1, R=10.0)
    spec = logistic_reaction(PeriodicCoefficient(period=1.0, mean=1.0, cos_amps=(0.5,)))
    grid = build_grid(params, 32, 100)
    right = speed_strip(params, spec, grid, "right", tol_alpha=1e-5, eigen_tol=1e-10)
    left = speed_strip(params, spec, grid, "left", tol_alpha=1e-5, eigen_tol=1e-10)
    assert abs(right.c_star - left.c_star) <= 1e-6


def test_below_persistence_raises():
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=1.0)
    spec = homogeneous_logistic(1.0, 1.0)
    grid = build_grid(params, 8, 8)
    with pytest.raises(DomainError, match="persistence"):
        speed_strip(params, spec, grid)


def test_minimizer_certificate():
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=10.0)
    spec = homogeneous_logistic(1.0, 1.0)
    grid = build_grid(params, 8, 100)
    res = speed_strip(params, spec, grid, tol_alpha=1e-4, eigen_tol=1e-10)
    a, b = res.bracket
    assert a < res.alpha_star < b
    assert b - a <= 2e-4
    for alpha in (a, b):
        lam = principal_eigen(params, spec, grid, alpha, tol=1e-10).lam
        assert -lam / alpha >= res.c_star - 1e-9


def test_homogeneous_scaling_case():
    # a = 2 with D <= 2d: c* should match 2 sqrt(d a) = 2 sqrt(2)
    params = ModelParams(D=1.5, d=1, mu=1, nu=1, L=1, R=30.0)
    spec = homogeneous_logistic(2.0, 1.0)
    grid = build_grid(params, 16, 250)
    res = speed_strip(params, spec, grid, tol_alpha=1e-3, eigen_tol=1e-8)
    assert res.c_star == pytest.approx(2 * math.sqrt(2.0), rel=0.03)


def test_unimodal_audit():
    params = ModelParams(D=3, d=1, mu=1, nu=1, L=1, R=10.0)
    spec = logistic_reaction(PeriodicCoefficient(period=1.0, mean=1.0, cos_amps=(0.5,)))
    grid = build_grid(params, 16, 100)
    res = speed_strip(params, spec, grid, tol_alpha=1e-4, eigen_tol=1e-9)
    alphas = res.alpha_star * np.geomspace(0.4, 2.5, 40)
    g = sample_dispersion(params, spec, grid, alphas, eigen_tol=1e-9)
    minima = [k for k in range(1, 39) if g[k] < g[k - 1] and g[k] < g[k + 1]]
    assert len(minima) == 1


def test_heterogeneity_monotonicity():
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=10.0)
    lo = logistic_reaction(PeriodicCoefficient(period=1.0, mean=1.0, cos_amps=(0.5,)))
    hi = logistic_reaction(PeriodicCoefficient(period=1.0, mean=1.2, cos_amps=(0.5,)))
    grid = build_grid(params, 32, 100)
    c_lo = speed_strip(params, lo, grid, tol_alpha=1e-3, eigen_tol=1e-8).c_star
    c_hi = speed_strip(params, hi, grid, tol_alpha=1e-3, eigen_tol=1e-8).c_star
    assert c_lo <= c_hi + 1e-9


def test_halfplane_speed_small_schedule():
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=2.0)
    spec = homogeneous_logistic(1.0, 1.0)
    policy = GridPolicy(nx=8, dy=0.2, R0=2.0, R_max=16.0, eigen_tol=1e-8)
    res = speed_halfplane(params, spec, policy, tol_alpha=1e-3, tol_limit=1e-9)
    speeds = [c for _, c in res.strip_speeds]
    assert all(a < b for a, b in zip(speeds, speeds[1:]))
    assert speeds[-1] < res.c_star
    assert res.c_star == pytest.approx(2.0, rel=0.05)
    assert res.halfplane_at_min is not None


def test_halfplane_lower_bound_with_width_correction():
    # heterogeneous m = 0.5: c* >= 2 sqrt(d (m - d pi^2 / R_last^2))
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=2.0)
    spec = logistic_reaction(PeriodicCoefficient(period=1.0, mean=1.0, cos_amps=(0.5,)))
    policy = GridPolicy(nx=16, dy=0.2, R0=4.0, R_max=32.0, eigen_tol=1e-8)
    res = speed_halfplane(params, spec, policy, tol_alpha=1e-3, tol_limit=1e-9)
    R_last = policy.schedule()[-1]
    floor = 2 * math.sqrt(0.5 - math.pi**2 / R_last**2)
    assert res.c_star >= floor
