import math

import numpy as np
import pytest

from fieldroad import (
    ConfigError,
    DomainError,
    ModelParams,
    NumericalError,
    SimConfig,
    State,
    Stepper,
    build_grid,
    build_window_grid,
    bump_init,
    compute_steady,
    homogeneous_logistic,
    kpp_subsolution,
    simulate,
    step,
    subsolution_profile,
)


def _zero_state(grid):
    return State(0.0, np.zeros(grid.nx), np.zeros((grid.ny, grid.nx)))


def test_zero_is_stationary(unit_params, unit_reaction):
    grid = build_grid(unit_params, 8, 8)
    cfg = SimConfig(dt=0.25, T=1.0)
    state = _zero_state(grid)
    for _ in range(5):
        state = step(state, unit_params, unit_reaction, grid, cfg)
    assert state.sup_norm() == 0.0


def test_decrease_from_above_capacity(unit_params, unit_reaction):
    grid = build_grid(unit_params, 8, 16)
    cfg = SimConfig(dt=0.25, T=1.0)
    cap_u, _ = unit_params.capacity
    state = State(0.0, 2 * cap_u * np.ones(grid.nx), 2 * np.ones((grid.ny, grid.nx)))
    prev_u, prev_v = state.u.copy(), state.v.copy()
    norms = []
    for k in range(100):
        state = step(state, unit_params, unit_reaction, grid, cfg)
        if k >= 1:
            # strict decrease at every node once the coupling has engaged
            assert np.all(state.u < prev_u)
            assert np.all(state.v < prev_v)
        prev_u, prev_v = state.u.copy(), state.v.copy()
        norms.append(state.sup_norm())
    assert all(a > b for a, b in zip(norms, norms[1:]))


def test_order_preservation_random_pairs(unit_params, unit_reaction, rng):
    grid = build_grid(unit_params, 8, 8)
    cfg = SimConfig(dt=0.25, T=1.0)
    cap_u, _ = unit_params.capacity
    stepper = Stepper(unit_params, unit_reaction, grid, cfg)
    for _ in range(5):
        u2 = cap_u * rng.uniform(0.2, 1.0, grid.nx)
        v2 = rng.uniform(0.2, 1.0, (grid.ny, grid.nx))
        shrink = rng.uniform(0.0, 1.0)
        lo = State(0.0, shrink * u2, shrink * v2)
        hi = State(0.0, u2, v2)
        for _ in range(20):
            lo = stepper.step(lo)
            hi = stepper.step(hi)
            assert np.all(lo.u <= hi.u + 1e-13)
            assert np.all(lo.v <= hi.v + 1e-13)


def test_invariant_region(unit_params, unit_reaction, rng):
    grid = build_grid(unit_params, 8, 8)
    cfg = SimConfig(dt=0.25, T=1.0)
    cap_u, _ = unit_params.capacity
    state = State(
        0.0, cap_u * rng.uniform(0, 1, grid.nx), rng.uniform(0, 1, (grid.ny, grid.nx))
    )
    for _ in range(50):
        state = step(state, unit_params, unit_reaction, grid, cfg)
        assert np.all(state.u >= -1e-12) and np.all(state.u <= cap_u + 1e-12)
        assert np.all(state.v >= -1e-12) and np.all(state.v <= 1.0 + 1e-12)


def test_t_zero_trajectory_has_only_initial(unit_params, unit_reaction):
    grid = build_grid(unit_params, 8, 8)
    cfg = SimConfig(dt=0.1, T=0.0)
    init = _zero_state(grid)
    traj = simulate(init, unit_params, unit_reaction, grid, cfg)
    assert len(traj.states) == 1
    assert traj.times == [0.0]


def test_determinism(unit_params, unit_reaction):
    grid = build_grid(unit_params, 8, 8)
    cfg = SimConfig(dt=0.2, T=2.0, record_every=3)
    init = bump_init(grid, unit_params, 0.5, 0.3, 0.4, 0.4)
    t1 = simulate(init, unit_params, unit_reaction, grid, cfg)
    t2 = simulate(init, unit_params, unit_reaction, grid, cfg)
    for s1, s2 in zip(t1.states, t2.states):
        assert np.array_equal(s1.u, s2.u)
        assert np.array_equal(s1.v, s2.v)


def test_growth_toward_steady_above_threshold():
    # R = pi > pi/2 with d = m = 1: a small bump grows to the steady state
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=math.pi)
    spec = homogeneous_logistic(1.0, 1.0)
    grid = build_grid(params, 64, 48)
    steady = compute_steady(params, spec, grid, tol=1e-8)
    cfg = SimConfig(dt=0.25, T=60.0, record_every=10**6)
    init = bump_init(grid, params, 0.5, 0.4, 0.2, 0.2)
    traj = simulate(init, params, spec, grid, cfg)
    final = traj.final
    assert final.sup_norm() > init.sup_norm()
    assert np.max(np.abs(final.u - steady.U)) < 1e-2
    assert np.max(np.abs(final.v - steady.V)) < 1e-2


def test_decay_below_threshold():
    # R = 1 < pi/2 with d = m = 1: everything dies out
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=1.0)
    spec = homogeneous_logistic(1.0, 1.0)
    grid = build_grid(params, 16, 16)
    # the road carries no Dirichlet loss, so decay runs at the coupled rate
    # lambda_R(0) ~ 0.4, much slower than the field-only rate
    cfg = SimConfig(dt=0.25, T=45.0, record_every=10**6)
    init = bump_init(grid, params, 0.5, 0.3, 0.5, 0.5)
    traj = simulate(init, params, spec, grid, cfg)
    assert traj.final.sup_norm() < 1e-4
    assert traj.final.sup_norm() < init.sup_norm()


def test_bump_init_properties(unit_params):
    grid = build_window_grid(unit_params, 16, 16, 8)
    zero = bump_init(grid, unit_params, 0.0, 1.0, 0.0, 0.0)
    assert zero.sup_norm() == 0.0

    bump = bump_init(grid, unit_params, 0.5, 1.2, 0.7, 0.6)
    x = grid.x_nodes
    outside = np.abs(x - 0.5) >= 1.2
    assert np.all(bump.u[outside] == 0.0)
    assert np.all(bump.v[:, outside] == 0.0)
    assert np.max(bump.u) <= 0.7 + 1e-15
    # the y-taper keeps the top row near the Dirichlet cap small
    assert np.max(bump.v[-1, :]) < 0.1 * np.max(bump.v[0, :])

    with pytest.raises(ConfigError):
        bump_init(grid, unit_params, 0.0, 1.0, 1.5 * unit_params.capacity[0], 0.5)
    with pytest.raises(ConfigError):
        bump_init(grid, unit_params, 0.0, -1.0, 0.5, 0.5)


def test_subsolution_formula_and_growth():
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=math.pi)
    spec = homogeneous_logistic(1.0, 1.0)
    delta, beta, kappa, Y = subsolution_profile(params, spec)
    assert delta == pytest.approx(0.1)  # min(m/10, margin/2) = m/10 here
    assert beta == pytest.approx(1.05 * math.pi / (2 * math.pi))
    # oracle: kappa = min(mu d beta |cos(beta R)| / (D (d beta cos + nu sin)),
    #                     (m - delta)/d - beta^2) evaluated by hand here
    den = beta * math.cos(beta * math.pi) + math.sin(beta * math.pi)
    kappa_oracle = min(-beta * math.cos(beta * math.pi) / den, 0.9 - beta**2)
    assert kappa == pytest.approx(kappa_oracle, abs=1e-14)
    assert kappa == pytest.approx(0.0430991852916567, abs=1e-10)  # frozen
    assert Y(0.0) == pytest.approx(math.sin(beta * math.pi) / den)
    assert Y(params.R) == pytest.approx(0.0, abs=1e-15)

    grid = build_window_grid(params, 8, 24, 16)
    sub = kpp_subsolution(params, spec, grid, 1e-3, center=0.0)
    assert sub.sup_norm() > 0
    inside = sub.u > 0
    assert np.all(sub.v[:-1, inside] > 0)

    state = sub
    cfg = SimConfig(dt=0.2, T=2.0)
    for _ in range(10):
        state = step(state, params, spec, grid, cfg)
    assert np.all(state.u[inside] > sub.u[inside])
    assert np.all(state.v[sub.v > 0] > sub.v[sub.v > 0])


def test_subsolution_requires_persistence():
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=1.0)
    spec = homogeneous_logistic(1.0, 1.0)
    grid = build_grid(params, 8, 8)
    with pytest.raises(DomainError):
        kpp_subsolution(params, spec, grid, 1e-3)


def test_dt_bounds_enforced(unit_params, unit_reaction):
    grid = build_grid(unit_params, 8, 8)
    with pytest.raises(ConfigError):
        Stepper(unit_params, unit_reaction, grid, SimConfig(dt=0.6, T=1.0))  # > 0.5/M
    with pytest.raises(ConfigError):
        Stepper(unit_params, unit_reaction, grid, SimConfig(dt=0.01, T=1.0, scheme="explicit"))


def test_explicit_scheme_matches_imex_loosely(unit_params, unit_reaction):
    grid = build_grid(unit_params, 8, 8)
    from fieldroad.simulate import explicit_dt_max

    dt = 0.9 * explicit_dt_max(unit_params, unit_reaction, grid)
    init = bump_init(grid, unit_params, 0.5, 0.3, 0.3, 0.3)
    cfg_e = SimConfig(dt=dt, T=0.5, scheme="explicit")
    cfg_i = SimConfig(dt=dt, T=0.5, scheme="imex_be")
    te = simulate(init, unit_params, unit_reaction, grid, cfg_e)
    ti = simulate(init, unit_params, unit_reaction, grid, cfg_i)
    assert np.all(te.final.v >= -1e-12)
    assert np.max(np.abs(te.final.v - ti.final.v)) < 0.05


def test_guard_aborts_when_front_reaches_edge(unit_reaction):
    params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=4)
    grid = build_window_grid(params, 8, 16, 12)  # narrow window
    cfg = SimConfig(dt=0.25, T=30.0, guard_level=0.1, record_every=10)
    init = bump_init(grid, params, 0.0, 1.0, 0.5, 0.5)
    with pytest.raises(NumericalError, match="guard"):
        simulate(init, params, unit_reaction, grid, cfg)


def test_probe_series_recorded(unit_params, unit_reaction):
    grid = build_grid(unit_params, 8, 8)
    cfg = SimConfig(dt=0.25, T=1.0, record_every=2)
    init = bump_init(grid, unit_params, 0.5, 0.3, 0.3, 0.3)
    traj = simulate(
        init, unit_params, unit_reaction, grid, cfg,
        probes=[("sup_u", lambda s, g: float(np.max(s.u)))],
    )
    series = traj.probes["sup_u"]
    assert len(series) == 5  # initial + 4 steps
    assert series[0][0] == 0.0
