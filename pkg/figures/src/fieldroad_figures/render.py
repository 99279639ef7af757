"""Render fieldroad CSV outputs into publication-style figures.

Four kinds: dispersion (-lambda/alpha with the minimizer marked and, when a
manifest is given, the two-sided bound band), convergence (lambda_R against
R on a log axis), front (tracked positions with the fitted speed annotated
from the summary CSV), heatmap (steady-state field V with the road profile U
on top). Figures never re-run physics: everything plotted comes from CSV
columns, plus closed-form bound constants read off the manifest.

Rendering is deterministic: fixed style, Agg backend, no timestamps.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "SchemaError", "render", "main"]

KINDS = ("dispersion", "convergence", "front", "heatmap")

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
}

_REQUIRED = {
    "dispersion": ("alpha", "R", "lambda"),
    "convergence": ("alpha", "R", "lambda"),
    "front": ("t", "pos_left", "pos_right"),
    "heatmap": ("x", "y", "U", "V"),
}


class SchemaError(ValueError):
    """An input CSV does not carry the columns its figure kind needs."""


@dataclass
class FigureSpec:
    kind: str
    input_csv: str
    output: str
    manifest: Optional[str] = None
    summary: Optional[str] = None
    title: Optional[str] = None
    log_x: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def _read_csv(path: str, required: tuple) -> dict:
    with open(path) as fh:
        reader = csv.DictReader(fh)
        headers = reader.fieldnames or []
        for column in required:
            if column not in headers:
                raise SchemaError(f"{path}: missing required column {column!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    out = {}
    for column in headers:
        values = []
        for row in rows:
            raw = row[column]
            if raw is None or raw == "":
                values.append(math.nan)
            elif raw in ("true", "false"):
                values.append(1.0 if raw == "true" else 0.0)
            else:
                try:
                    values.append(float(raw))
                except ValueError:
                    values.append(math.nan)
        out[column] = np.asarray(values)
    return out


def _read_manifest(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, raw = (part.strip() for part in line.split("=", 1))
            values[key] = raw
    return values


def _coefficient_range(manifest: dict) -> tuple:
    """(m, M) of the linearization from the manifest's reaction keys."""
    mean = float(manifest.get("reaction.mean", "1"))
    table = manifest.get("reaction.table", "")
    if table:
        vals = [float(tok) for tok in table.split(",") if tok.strip()]
        return min(vals), max(vals)
    cos_amps = [float(tok) for tok in manifest.get("reaction.cos_amps", "").split(",") if tok.strip()]
    sin_amps = [float(tok) for tok in manifest.get("reaction.sin_amps", "").split(",") if tok.strip()]
    x = np.linspace(0.0, 1.0, 4096, endpoint=False)
    a = np.full_like(x, mean)
    for k, c in enumerate(cos_amps, start=1):
        a += c * np.cos(2 * np.pi * k * x)
    for k, s in enumerate(sin_amps, start=1):
        a += s * np.sin(2 * np.pi * k * x)
    return float(a.min()), float(a.max())


def _dispersion(spec: FigureSpec, ax):
    data = _read_csv(spec.input_csv, _REQUIRED["dispersion"])
    pos = data["alpha"] > 0
    if not np.any(pos):
        raise SchemaError(f"{spec.input_csv}: dispersion needs rows with alpha > 0")
    for R in sorted(set(data["R"][pos])):
        sel = pos & (data["R"] == R)
        alpha = data["alpha"][sel]
        ratio = -data["lambda"][sel] / alpha
        order = np.argsort(alpha)
        alpha, ratio = alpha[order], ratio[order]
        ax.plot(alpha, ratio, marker="o", markersize=3, label=f"R = {R:g}")
        k = int(np.argmin(ratio))
        ax.plot([alpha[k]], [ratio[k]], marker="*", markersize=12, color="crimson", zorder=5)
        if spec.manifest:
            man = _read_manifest(spec.manifest)
            D = float(man["D"]) if "D" in man else 1.0
            d = float(man["d"]) if "d" in man else 1.0
            mu = float(man["mu"]) if "mu" in man else 1.0
            nu = float(man["nu"]) if "nu" in man else 1.0
            m, M = _coefficient_range(man)
            grid = np.linspace(alpha.min(), alpha.max(), 200)
            lower = np.maximum(D * grid**2 - mu, d * grid**2 + m - d * np.pi**2 / R**2) / grid
            upper = np.maximum(D * grid**2 + nu - mu + mu * nu / d, d * (grid**2 + 1) + M) / grid
            ax.fill_between(grid, lower, upper, alpha=0.15, label=f"bounds, R = {R:g}")
    ax.set_xlabel("alpha")
    ax.set_ylabel("-lambda(alpha) / alpha")
    ax.legend(loc="best")


def _convergence(spec: FigureSpec, ax):
    data = _read_csv(spec.input_csv, _REQUIRED["convergence"])
    for alpha in sorted(set(data["alpha"])):
        sel = data["alpha"] == alpha
        R = data["R"][sel]
        lam = data["lambda"][sel]
        order = np.argsort(R)
        ax.plot(R[order], lam[order], marker="o", markersize=4, label=f"alpha = {alpha:g}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("strip width R")
    ax.set_ylabel("lambda_R")
    ax.legend(loc="best")


def _front(spec: FigureSpec, ax):
    data = _read_csv(spec.input_csv, _REQUIRED["front"])
    t = data["t"]
    ax.plot(t, data["pos_right"], label="rightmost crossing")
    ax.plot(t, data["pos_left"], label="leftmost crossing")
    if spec.summary:
        summary = _read_csv(spec.summary, ("c_hat",))
        c_hat = float(summary["c_hat"][0])
        keep = ~np.isnan(data["pos_right"])
        if np.any(keep):
            t0 = t[keep][len(t[keep]) // 2]
            p0 = data["pos_right"][keep][len(t[keep]) // 2]
            ax.plot(t, p0 + c_hat * (t - t0), linestyle="--", color="k",
                    label=f"slope c_hat = {c_hat:.4g}")
    ax.set_xlabel("t")
    ax.set_ylabel("front position")
    ax.legend(loc="best")


def _heatmap(spec: FigureSpec, fig, ax):
    data = _read_csv(spec.input_csv, _REQUIRED["heatmap"])
    xs = np.unique(data["x"])
    ys = np.unique(data["y"])
    V = np.full((len(ys), len(xs)), np.nan)
    U = np.full(len(xs), np.nan)
    ix = {v: i for i, v in enumerate(xs)}
    iy = {v: j for j, v in enumerate(ys)}
    for x, y, u, v in zip(data["x"], data["y"], data["U"], data["V"]):
        V[iy[y], ix[x]] = v
        U[ix[x]] = u
    if np.any(np.isnan(V)):
        raise SchemaError(f"{spec.input_csv}: x/y grid is not complete")
    mesh = ax.pcolormesh(xs, ys, V, shading="nearest", cmap="viridis", vmin=0.0)
    fig.colorbar(mesh, ax=ax, label="field density V")
    twin = ax.twinx()
    twin.plot(xs, U, color="crimson", label="road density U")
    twin.set_ylabel("road density U", color="crimson")
    twin.grid(False)
    ax.set_xlabel("x")
    ax.set_ylabel("y")


def render(spec: FigureSpec) -> str:
    """Render one figure deterministically; returns the output path."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            if spec.kind == "dispersion":
                _dispersion(spec, ax)
            elif spec.kind == "convergence":
                _convergence(spec, ax)
            elif spec.kind == "front":
                _front(spec, ax)
            else:
                _heatmap(spec, fig, ax)
            if spec.title:
                ax.set_title(spec.title)
            if spec.log_x and spec.kind != "convergence":
                ax.set_xscale("log")
            fig.tight_layout()
            fig.savefig(spec.output, metadata={"Software": None})
        finally:
            plt.close(fig)
    return spec.output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render fieldroad CSVs into figures"
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="input_csv", required=True, help="input CSV path")
    parser.add_argument("--out", dest="output", required=True, help="output image path")
    parser.add_argument("--manifest", help="manifest.cfg for the bound band (dispersion)")
    parser.add_argument("--summary", help="summary.csv for the speed annotation (front)")
    parser.add_argument("--title")
    parser.add_argument("--log-x", action="store_true")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            input_csv=args.input_csv,
            output=args.output,
            manifest=args.manifest,
            summary=args.summary,
            title=args.title,
            log_x=args.log_x,
        )
        render(spec)
    except (SchemaError, OSError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
