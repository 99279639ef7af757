"""Configuration parsing, run orchestration and CSV emission.

Configs are flat `key = value` text with dotted sections; command-line
`--set key=value` pairs override the file. Every run writes a manifest.cfg
echoing the fully resolved configuration, so a run is reproducible from its
manifest alone. Exit codes: 0 success, 2 config error, 3 numerical or
convergence error, 4 property failure.
"""
from __future__ import annotations

import argparse
import difflib
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import csvio
from .discrete import build_grid, build_window_grid, assemble_eigen_operator, dump_operator, peclet_ok
from .errors import (
    ConfigError,
    DiagnosticsError,
    DomainError,
    FieldRoadError,
    NumericalError,
    PropertyError,
)
from .model import (
    ModelParams,
    PeriodicCoefficient,
    ReactionSpec,
    kpp_check,
    logistic_reaction,
)
from .simulate import SimConfig, bump_init, simulate
from .spectral import GridPolicy, principal_eigen, verify_eigen_properties
from .speed import sample_dispersion, speed_halfplane, speed_strip
from .steady import compute_steady, persistence_check
from .diagnostics import dichotomy_check, estimate_speed, pulsating_diagnostic, track_front

__all__ = ["RunConfig", "parse_config", "run_sweep", "verify_all", "main"]

COMMANDS = ("simulate", "steady", "eigen", "speed", "sweep", "verify", "front")

# key -> (type tag, default); "auto" defaults are resolved during parsing
_KEY_SPEC = {
    "command": ("str", "verify"),
    "D": ("float_list", [1.0]),
    "d": ("float_list", [1.0]),
    "mu": ("float_list", [1.0]),
    "nu": ("float_list", [1.0]),
    "L": ("float", 1.0),
    "R": ("float_list", [10.0]),
    "reaction.type": ("str", "logistic"),
    "reaction.mean": ("float_list", [1.0]),
    "reaction.cos_amps": ("floats", []),
    "reaction.sin_amps": ("floats", []),
    "reaction.table": ("floats", []),
    "grid.nx": ("int", 64),
    "grid.ny": ("int", 64),
    "sim.dt": ("float", "auto"),
    "sim.T": ("float", 10.0),
    "sim.scheme": ("str", "imex_be"),
    "sim.record_every": ("int", 10),
    "sim.domain_copies": ("int", 1),
    "sim.record_from": ("float", 0.0),
    "sim.guard": ("bool", True),
    "sim.bump_center": ("float", 0.0),
    "sim.bump_width": ("float", 1.0),
    "sim.bump_amplitude_u": ("float", "auto"),
    "sim.bump_amplitude_v": ("float", 0.25),
    "spectral.alphas": ("floats", [0.0]),
    "spectral.tol": ("float", 1e-10),
    "spectral.R0": ("float", 5.0),
    "spectral.R_max": ("float", 40.0),
    "spectral.dy": ("float", 0.1),
    "spectral.nx": ("int", "auto"),
    "spectral.tol_limit": ("float", 1e-3),
    "spectral.halfplane_tol": ("float", 1e-8),
    "speed.direction": ("str", "right"),
    "speed.tol_alpha": ("float", 1e-4),
    "speed.halfplane": ("bool", False),
    "front.level": ("float", "auto"),
    "front.window_fraction": ("float", 0.5),
    "front.pulsating": ("bool", False),
    "sweep.target": ("str", "eigen"),
    "sweep.cap": ("int", 1000),
    "output_dir": ("str", "out"),
    "threads": ("int", 1),
    "seed": ("int", 0),
    "dump_operator": ("bool", False),
}

_SWEEPABLE = ("D", "d", "mu", "nu", "R", "reaction.mean")

_ALIASES = {
    "diffusivity": "D",
    "road_diffusivity": "D",
    "field_diffusivity": "d",
    "exchange_mu": "mu",
    "exchange_nu": "nu",
    "period": "L",
    "width": "R",
    "alpha": "spectral.alphas",
    "alphas": "spectral.alphas",
    "nx": "grid.nx",
    "ny": "grid.ny",
    "dt": "sim.dt",
    "T": "sim.T",
    "out": "output_dir",
}


def _suggest(key: str):
    if key in _ALIASES:
        return _ALIASES[key]
    close = difflib.get_close_matches(key, _KEY_SPEC.keys(), n=1, cutoff=0.5)
    return close[0] if close else None


def _parse_value(key: str, raw):
    kind, _ = _KEY_SPEC[key]
    if isinstance(raw, (int, float, bool, list)):
        return raw
    raw = raw.strip()
    try:
        if kind == "str":
            return raw
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if kind in ("floats", "float_list"):
            if raw == "":
                return []
            return [float(tok) for tok in raw.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r} for key {key!r} as {kind}")
    raise ConfigError(f"unhandled kind {kind}")  # pragma: no cover


@dataclass
class RunConfig:
    """Fully resolved configuration; see _KEY_SPEC for the key set."""

    values: dict

    def __getitem__(self, key):
        return self.values[key]

    # -- scalar accessors ---------------------------------------------------
    def _scalar(self, key):
        value = self.values[key]
        if isinstance(value, list):
            if len(value) != 1:
                raise ConfigError(
                    f"key {key!r} holds a list {value}; this command needs a scalar "
                    "(did you mean command = sweep?)"
                )
            return value[0]
        return value

    def model(self) -> ModelParams:
        return ModelParams(
            D=self._scalar("D"), d=self._scalar("d"), mu=self._scalar("mu"),
            nu=self._scalar("nu"), L=self.values["L"], R=self._scalar("R"),
        )

    def reaction(self) -> ReactionSpec:
        if self.values["reaction.type"] != "logistic":
            raise ConfigError(
                "config files support reaction.type = logistic; custom reactions "
                "are available through the library API"
            )
        L = self.values["L"]
        if self.values["reaction.table"]:
            coeff = PeriodicCoefficient(period=L, table=tuple(self.values["reaction.table"]))
        else:
            coeff = PeriodicCoefficient(
                period=L,
                mean=self._scalar("reaction.mean"),
                cos_amps=tuple(self.values["reaction.cos_amps"]),
                sin_amps=tuple(self.values["reaction.sin_amps"]),
            )
        return logistic_reaction(coeff)

    def grid(self, params: ModelParams):
        return build_grid(params, self.values["grid.nx"], self.values["grid.ny"])

    def sim_config(self, params: ModelParams) -> SimConfig:
        guard_level = self.values["front.level"] if self.values["sim.guard"] else None
        if self.values["sim.domain_copies"] <= 1:
            guard_level = None
        return SimConfig(
            dt=self.values["sim.dt"],
            T=self.values["sim.T"],
            scheme=self.values["sim.scheme"],
            record_every=self.values["sim.record_every"],
            domain_copies=self.values["sim.domain_copies"],
            record_from=self.values["sim.record_from"],
            guard_level=guard_level,
        )

    def sim_grid(self, params: ModelParams):
        copies = self.values["sim.domain_copies"]
        if copies <= 1:
            return self.grid(params)
        ny = self.values["grid.ny"]
        return build_window_grid(params, self.values["grid.nx"], ny, copies)

    def grid_policy(self) -> GridPolicy:
        return GridPolicy(
            nx=self.values["spectral.nx"],
            dy=self.values["spectral.dy"],
            R0=self.values["spectral.R0"],
            R_max=self.values["spectral.R_max"],
            eigen_tol=self.values["spectral.halfplane_tol"],
        )

    def manifest(self) -> str:
        lines = []
        for key in sorted(self.values):
            value = self.values[key]
            if isinstance(value, list):
                text = ",".join(csvio.fmt(v) for v in value)
            else:
                text = csvio.fmt(value)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"


def _read_config_text(text: str) -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, value = stripped.split("=", 1)
        raw[key.strip()] = value.strip()
    return raw


def parse_config(path=None, overrides=None, text=None) -> RunConfig:
    """Load, validate and resolve a configuration.

    Unknown keys are rejected with a suggestion; invariant violations name
    the offending field. Defaults marked auto are resolved here so the
    manifest is complete.
    """
    raw = {}
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            raw.update(_read_config_text(fh.read()))
    if text is not None:
        raw.update(_read_config_text(text))
    for key, value in (overrides or {}).items():
        raw[key] = value

    values = {key: default for key, (_, default) in _KEY_SPEC.items()}
    for key, value in raw.items():
        if key not in _KEY_SPEC:
            suggestion = _suggest(key)
            hint = f" (did you mean {suggestion!r}?)" if suggestion else ""
            raise ConfigError(f"unknown config key {key!r}{hint}")
        values[key] = _parse_value(key, value)

    if values["command"] not in COMMANDS:
        raise ConfigError(f"unknown command {values['command']!r}; choose from {COMMANDS}")
    for key in ("D", "d", "mu", "nu", "R", "reaction.mean"):
        entries = values[key] if isinstance(values[key], list) else [values[key]]
        if not entries and key != "reaction.mean":
            raise ConfigError(f"{key} must hold at least one value")
        for entry in entries:
            if key != "reaction.mean" and entry <= 0:
                raise ConfigError(f"{key} must be > 0, got {entry}")
    if values["L"] <= 0:
        raise ConfigError(f"L must be > 0, got {values['L']}")
    if values["grid.nx"] < 4 or values["grid.ny"] < 4:
        raise ConfigError("grid.nx and grid.ny must be >= 4")
    if values["spectral.tol"] <= 0 or values["spectral.halfplane_tol"] <= 0:
        raise ConfigError("spectral tolerances must be > 0")
    if values["speed.direction"] not in ("right", "left"):
        raise ConfigError("speed.direction must be right or left")
    if values["sweep.target"] not in ("eigen", "speed"):
        raise ConfigError("sweep.target must be eigen or speed")
    if values["threads"] < 1:
        raise ConfigError("threads must be >= 1")

    # resolve auto defaults so the manifest is self-contained
    config = RunConfig(values=values)
    spec = config.reaction()
    if values["sim.dt"] == "auto":
        values["sim.dt"] = 0.4 / spec.M
    if values["sim.dt"] <= 0:
        raise ConfigError("sim.dt must be > 0")
    if values["spectral.nx"] == "auto":
        values["spectral.nx"] = values["grid.nx"]
    nu_over_mu = (values["nu"][0] if isinstance(values["nu"], list) else values["nu"]) / (
        values["mu"][0] if isinstance(values["mu"], list) else values["mu"]
    )
    if values["front.level"] == "auto":
        values["front.level"] = 0.1 * nu_over_mu
    if values["sim.bump_amplitude_u"] == "auto":
        values["sim.bump_amplitude_u"] = 0.25 * nu_over_mu
    return config


def _write_manifest(config: RunConfig, out_dir: str):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "manifest.cfg"), "w") as fh:
        fh.write(config.manifest())


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_eigen(config: RunConfig, out_dir: str) -> int:
    params = config.model()
    spec = config.reaction()
    grid = config.grid(params)
    rows = []
    for alpha in config["spectral.alphas"]:
        pair = principal_eigen(params, spec, grid, alpha, tol=config["spectral.tol"])
        rows.append((alpha, params.R, pair.lam, pair.residual, pair.iterations))
        if config["dump_operator"]:
            op = assemble_eigen_operator(params, spec, grid, alpha)
            dump_operator(op, os.path.join(out_dir, f"operator_alpha_{alpha}.txt"))
    csvio.write_csv(
        os.path.join(out_dir, "dispersion.csv"),
        ["alpha", "R", "lambda", "residual", "iterations"],
        rows,
    )
    print(f"eigen: wrote {len(rows)} row(s) to dispersion.csv")
    return 0


def _cmd_speed(config: RunConfig, out_dir: str) -> int:
    params = config.model()
    spec = config.reaction()
    rows = []
    if config["speed.halfplane"]:
        policy = config.grid_policy()
        result = speed_halfplane(
            params, spec, policy,
            tol_alpha=config["speed.tol_alpha"],
            tol_limit=config["spectral.tol_limit"],
        )
        for R, c in result.strip_speeds:
            rows.append(("strip", R, "right", "", c, ""))
        rows.append(("halfplane", "", "right", result.alpha_star, result.c_star, result.evaluations))
        hp = result.halfplane_at_min
        hp_rows = [
            (result.alpha_star, R, lam, "", "", hp.converged and R == hp.R_schedule[-1])
            for R, lam in zip(hp.R_schedule, hp.lambdas)
        ]
        csvio.write_csv(
            os.path.join(out_dir, "halfplane.csv"),
            ["alpha", "R", "lambda", "residual", "iterations", "converged"],
            hp_rows,
        )
        print(f"speed: c* = {result.c_star:.8g} at alpha* = {result.alpha_star:.6g}")
    else:
        grid = config.grid(params)
        result = speed_strip(
            params, spec, grid,
            direction=config["speed.direction"],
            tol_alpha=config["speed.tol_alpha"],
            eigen_tol=config["spectral.halfplane_tol"],
        )
        rows.append(
            ("strip", params.R, result.direction, result.alpha_star, result.c_star, result.evaluations)
        )
        print(f"speed: c*_R = {result.c_star:.8g} at alpha* = {result.alpha_star:.6g}")
    csvio.write_csv(
        os.path.join(out_dir, "speed.csv"),
        ["mode", "R", "direction", "alpha_star", "c_star", "evaluations"],
        rows,
    )
    return 0


def _cmd_steady(config: RunConfig, out_dir: str) -> int:
    params = config.model()
    spec = config.reaction()
    grid = config.grid(params)
    steady = compute_steady(params, spec, grid, tol=1e-8)
    rows = []
    for j, y in enumerate(grid.y_nodes):
        for i, x in enumerate(grid.x_nodes):
            rows.append((x, y, steady.U[i], steady.V[j, i]))
    csvio.write_csv(os.path.join(out_dir, "steady.csv"), ["x", "y", "U", "V"], rows)
    report = persistence_check(params, spec)
    print(
        f"steady: persistent={steady.persistent} margin={report.margin:.6g} "
        f"bracket_gap={steady.bracket_gap:.3g} residual={steady.residual:.3g}"
    )
    return 0


def _run_simulation(config: RunConfig):
    params = config.model()
    spec = config.reaction()
    grid = config.sim_grid(params)
    sim = config.sim_config(params)
    width = grid.width
    bump_width = min(config["sim.bump_width"], 0.25 * width)
    init = bump_init(
        grid, params,
        center=config["sim.bump_center"],
        width=bump_width,
        amplitude_u=config["sim.bump_amplitude_u"],
        amplitude_v=config["sim.bump_amplitude_v"],
    )
    probes = [
        ("sup_u", lambda s, g: float(np.max(np.abs(s.u)))),
        ("sup_v", lambda s, g: float(np.max(np.abs(s.v)))),
    ]
    return params, spec, grid, simulate(init, params, spec, grid, sim, probes)


def _cmd_simulate(config: RunConfig, out_dir: str) -> int:
    params, spec, grid, traj = _run_simulation(config)
    rows = []
    for t, state in zip(traj.times, traj.states):
        for i, x in enumerate(grid.x_nodes):
            rows.append((t, x, None, state.u[i], None))
        for j, y in enumerate(grid.y_nodes):
            for i, x in enumerate(grid.x_nodes):
                rows.append((t, x, y, None, state.v[j, i]))
    csvio.write_csv(os.path.join(out_dir, "snapshots.csv"), ["t", "x", "y", "u", "v"], rows)
    probe_rows = []
    for name, series in traj.probes.items():
        for t, value in series:
            probe_rows.append((t, name, value))
    csvio.write_csv(os.path.join(out_dir, "probes.csv"), ["t", "probe_name", "value"], probe_rows)
    print(f"simulate: {len(traj.states)} snapshot(s) to t = {traj.final.t:.6g}")
    return 0


def _cmd_front(config: RunConfig, out_dir: str) -> int:
    params, spec, grid, traj = _run_simulation(config)
    trace = track_front(traj, config["front.level"])
    csvio.write_csv(
        os.path.join(out_dir, "front.csv"),
        ["t", "pos_left", "pos_right"],
        zip(trace.times, trace.pos_left, trace.pos_right),
    )
    if trace.empty:
        print("front: level never attained, empty trace")
        csvio.write_csv(
            os.path.join(out_dir, "summary.csv"),
            ["c_hat", "stderr", "r2", "deviation"],
            [(math.nan, math.nan, math.nan, math.nan)],
        )
        return 0
    fit = estimate_speed(trace, config["front.window_fraction"])
    deviation = math.nan
    if config["front.pulsating"]:
        # rerun with dt realigned so L / c_hat spans exactly six snapshots;
        # ceil keeps the aligned dt at or below the configured one
        tau = params.L / fit.c_hat
        stride = 6 * max(1, math.ceil(tau / (6.0 * config["sim.dt"]) - 1e-12))
        sim = config.sim_config(params)
        aligned = SimConfig(
            dt=tau / stride, T=sim.T, scheme=sim.scheme, record_every=stride // 6,
            domain_copies=sim.domain_copies, record_from=0.75 * sim.T,
            guard_level=sim.guard_level,
        )
        grid = config.sim_grid(params)
        init = bump_init(
            grid, params,
            center=config["sim.bump_center"],
            width=min(config["sim.bump_width"], 0.25 * grid.width),
            amplitude_u=config["sim.bump_amplitude_u"],
            amplitude_v=config["sim.bump_amplitude_v"],
        )
        aligned_traj = simulate(init, params, spec, grid, aligned)
        deviation = pulsating_diagnostic(aligned_traj, fit.c_hat, params).overall
    csvio.write_csv(
        os.path.join(out_dir, "summary.csv"),
        ["c_hat", "stderr", "r2", "deviation"],
        [(fit.c_hat, fit.stderr, fit.r2, deviation)],
    )
    print(f"front: c_hat = {fit.c_hat:.6g} +- {fit.stderr:.2g} (r2 = {fit.r2:.6f})")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_points(config: RunConfig):
    axes = []
    for key in _SWEEPABLE:
        value = config.values[key]
        entries = value if isinstance(value, list) else [value]
        axes.append([(key, v) for v in entries])
    if config["sweep.target"] == "eigen":
        axes.append([("alpha", a) for a in config["spectral.alphas"]])
    points = [()]
    for axis in axes:
        points = [p + (choice,) for p in points for choice in axis]
    return [dict(p) for p in points]


def _sweep_worker(args):
    base_values, point = args
    values = dict(base_values)
    for key, v in point.items():
        if key != "alpha":
            values[key] = [v]
    config = RunConfig(values=values)
    params = config.model()
    spec = config.reaction()
    prefix = [point[k] for k in _SWEEPABLE]
    try:
        if values["sweep.target"] == "eigen":
            grid = config.grid(params)
            pair = principal_eigen(params, spec, grid, point["alpha"], tol=values["spectral.tol"])
            return prefix + [point["alpha"], pair.lam, pair.residual, pair.iterations, "ok"]
        if values["speed.halfplane"]:
            result = speed_halfplane(
                params, spec, config.grid_policy(),
                tol_alpha=values["speed.tol_alpha"], tol_limit=values["spectral.tol_limit"],
            )
        else:
            result = speed_strip(
                params, spec, config.grid(params),
                direction=values["speed.direction"], tol_alpha=values["speed.tol_alpha"],
                eigen_tol=values["spectral.halfplane_tol"],
            )
        return prefix + [result.mode, result.direction, result.alpha_star, result.c_star, result.evaluations, "ok"]
    except Exception as exc:  # isolation: a failing point never aborts the sweep
        pad = 4 if values["sweep.target"] == "eigen" else 5
        return prefix + [""] * pad + [f"error: {exc}"]


def run_sweep(config: RunConfig, out_dir: str) -> int:
    """Run the cross product of all list-valued keys, one CSV row per point.

    Points run in parallel up to `threads`, each isolated; the row order is
    the deterministic cross-product order regardless of completion order.
    """
    points = _sweep_points(config)
    if len(points) > config["sweep.cap"]:
        raise ConfigError(
            f"sweep size {len(points)} exceeds sweep.cap = {config['sweep.cap']}"
        )
    if config["sweep.target"] == "eigen":
        header = ["D", "d", "mu", "nu", "R", "reaction_mean",
                  "alpha", "lambda", "residual", "iterations", "status"]
    else:
        header = ["D", "d", "mu", "nu", "R", "reaction_mean",
                  "mode", "direction", "alpha_star", "c_star", "evaluations", "status"]
    args = [(config.values, point) for point in points]
    if config["threads"] > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=config["threads"]) as pool:
            rows = list(pool.map(_sweep_worker, args))
    else:
        rows = [_sweep_worker(a) for a in args]
    csvio.write_csv(os.path.join(out_dir, "sweep.csv"), header, rows)
    n_err = sum(1 for r in rows if str(r[-1]).startswith("error"))
    print(f"sweep: {len(rows)} point(s), {n_err} failure(s)")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def verify_all(config: RunConfig, out_dir: str) -> int:
    """Bundled property checks; exit 0 iff all pass.

    A below-persistence configuration is an expected negative: the speed
    check records it and still passes. Upwind-fallback regimes are noted.
    """
    params = config.model()
    spec = config.reaction()
    lines = []
    failures = 0

    report = kpp_check(spec)
    lines.append(("kpp_check", report.m, report.ok))
    failures += 0 if report.ok else 1

    alphas = sorted(set(list(config["spectral.alphas"]) + [0.0, 0.5, -0.5]))
    R_list = [params.R, 1.5 * params.R]
    grid = config.grid(params)
    eigen_report = verify_eigen_properties(
        params, spec, grid, alphas, R_list, eigen_tol=min(1e-9, config["spectral.tol"])
    )
    for name, check in eigen_report.checks.items():
        lines.append((f"eigen.{name}", check.worst_margin, check.passed))
        failures += 0 if check.passed else 1

    if any(not peclet_ok(a, grid.dx) for a in alphas):
        lines.append(("eigen.upwind_fallback_noted", 0.0, True))

    lam0 = principal_eigen(params, spec, grid, 0.0, tol=config["spectral.tol"]).lam
    if lam0 >= 0:
        lines.append(("speed.below_persistence_expected_negative", lam0, True))
    else:
        right = speed_strip(params, spec, grid, "right", tol_alpha=1e-3, eigen_tol=1e-9)
        left = speed_strip(params, spec, grid, "left", tol_alpha=1e-3, eigen_tol=1e-9)
        agree = abs(right.c_star - left.c_star)
        lines.append(("speed.left_right_agree", 1e-6 - agree, agree <= 1e-6))
        failures += 0 if agree <= 1e-6 else 1
        alpha_grid = right.alpha_star * np.geomspace(0.5, 2.0, 21)
        gvals = sample_dispersion(params, spec, grid, alpha_grid, eigen_tol=1e-9)
        minima = [
            k for k in range(1, len(gvals) - 1)
            if gvals[k] < gvals[k - 1] and gvals[k] < gvals[k + 1]
        ]
        unimodal = len(minima) <= 1
        lines.append(("speed.unimodal", float(len(minima)), unimodal))
        failures += 0 if unimodal else 1

        # spreading run against the dichotomy; the inner clause needs rough
        # twenty length units between the front and factor_in * c* * t, and
        # that margin only grows like 0.2 c* t minus a logarithmic delay, so
        # the run is long and the wide full-height bump gives a head start
        T = 100.0
        upper_bound = max(
            2.0 * math.sqrt(params.d * spec.M),
            2.0 * math.sqrt(params.D * spec.M) if params.D > 2 * params.d else 0.0,
            right.c_star,
        )
        copies = 2 * int(math.ceil((1.3 * upper_bound * T + 12.0 * params.L) / params.L))
        ny = min(grid.ny, 64)
        window = build_window_grid(params, min(grid.nx, 16), ny, copies)
        sim = SimConfig(
            dt=min(0.4 / spec.M, 0.2), T=T, record_every=10**9,
            guard_level=config["front.level"], domain_copies=copies,
        )
        init = bump_init(window, params, 0.0, 6.0 * params.L, params.capacity[0], 1.0)
        period_grid = build_grid(params, min(grid.nx, 16), ny)
        steady_p = compute_steady(params, spec, period_grid, tol=1e-7)
        traj = simulate(init, params, spec, window, sim)
        dich = dichotomy_check(traj, right.c_star, steady_p, period_grid)
        lines.append(("dichotomy.outer", dich.outer_sup, dich.outer_pass))
        lines.append(("dichotomy.inner", dich.inner_sup if dich.inner_sup is not None else 0.0,
                      dich.inner_pass is not False))
        failures += 0 if dich.outer_pass else 1
        failures += 0 if dich.inner_pass is not False else 1

    width = max(len(name) for name, _, _ in lines)
    for name, margin, passed in lines:
        status = "pass" if passed else "FAIL"
        print(f"{name:<{width}s}  {csvio.fmt(float(margin)):>24s}  {status}")
    csvio.write_csv(
        os.path.join(out_dir, "verify.csv"),
        ["property", "margin", "passed"],
        [(n, float(m), p) for n, m, p in lines],
    )
    return 0 if failures == 0 else 4


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_argparser():
    parser = argparse.ArgumentParser(
        prog="fieldroad",
        description="Field-road KPP laboratory: eigenvalues, speeds, simulation",
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS, help="run command")
    parser.add_argument("--config", help="config file path")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    parser.add_argument("--alpha", type=float, help="shorthand for spectral.alphas")
    parser.add_argument("--halfplane", action="store_true", help="half-plane speed mode")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--dump-operator", action="store_true",
                        help="dump assembled operators as coordinate text")
    parser.add_argument("--threads", type=int, help="parallel sweep workers")
    return parser


def main(argv=None) -> int:
    args = _build_argparser().parse_args(argv)
    overrides = {}
    for item in args.set:
        if "=" not in item:
            print(f"config error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return 2
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.command:
        overrides["command"] = args.command
    if args.alpha is not None:
        overrides["spectral.alphas"] = str(args.alpha)
    if args.halfplane:
        overrides["speed.halfplane"] = "true"
    if args.out:
        overrides["output_dir"] = args.out
    if args.dump_operator:
        overrides["dump_operator"] = "true"
    if args.threads is not None:
        overrides["threads"] = str(args.threads)

    try:
        config = parse_config(path=args.config, overrides=overrides)
        out_dir = config["output_dir"]
        _write_manifest(config, out_dir)
        command = config["command"]
        if command == "eigen":
            return _cmd_eigen(config, out_dir)
        if command == "speed":
            return _cmd_speed(config, out_dir)
        if command == "steady":
            return _cmd_steady(config, out_dir)
        if command == "simulate":
            return _cmd_simulate(config, out_dir)
        if command == "front":
            return _cmd_front(config, out_dir)
        if command == "sweep":
            return run_sweep(config, out_dir)
        if command == "verify":
            return verify_all(config, out_dir)
        raise ConfigError(f"unknown command {command!r}")  # pragma: no cover
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PropertyError as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        return 4
    except (NumericalError, DiagnosticsError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except FieldRoadError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
