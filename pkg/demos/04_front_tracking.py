"""Spreading simulation with front tracking.

Starts a compact bump in a wide Neumann window, tracks the outermost level
crossings of the road density, fits the front speed, and compares it with
the variational speed from the eigenvalue problem. Writes
demos/out/front_demo.csv.
"""
import math
import os

from fieldroad import (
    ModelParams,
    SimConfig,
    build_grid,
    build_window_grid,
    bump_init,
    estimate_speed,
    homogeneous_logistic,
    simulate,
    speed_strip,
    track_front,
)
from fieldroad.csvio import write_csv

params = ModelParams(D=1, d=1, mu=1, nu=1, L=1, R=8.0)
spec = homogeneous_logistic(1.0, 1.0)

grid_eig = build_grid(params, 32, 80)
strip = speed_strip(params, spec, grid_eig, tol_alpha=1e-3, eigen_tol=1e-8)
print(f"variational speed: c*_R = {strip.c_star:.5f} at alpha* = {strip.alpha_star:.4f}")

T = 30.0
copies = 2 * int(math.ceil(1.2 * strip.c_star * T + 10))
window = build_window_grid(params, 16, 48, copies)
sim = SimConfig(dt=0.1, T=T, record_every=10, guard_level=0.1)
init = bump_init(window, params, 0.0, 4.0, 1.0, 1.0)
print(f"window: {copies} periods, {window.dim} unknowns, T = {T}")
traj = simulate(init, params, spec, window, sim)

trace = track_front(traj, 0.1)
fit = estimate_speed(trace, 0.5)
print(f"tracked front: c_hat = {fit.c_hat:.5f} +- {fit.stderr:.1e} (r2 = {fit.r2:.6f})")
print(f"eigen vs simulation: {abs(fit.c_hat - strip.c_star) / strip.c_star:.2%} apart")
print("(the simulated front lags by the usual logarithmic-in-time delay)")

out = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out, exist_ok=True)
write_csv(
    os.path.join(out, "front_demo.csv"),
    ["t", "pos_left", "pos_right"],
    zip(trace.times, trace.pos_left, trace.pos_right),
)
print("wrote demos/out/front_demo.csv")
