import os
import subprocess
import sys

import pytest

from fieldroad_figures import FigureSpec, SchemaError, render


def _write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def dispersion_csv(tmp_path):
    rows = ["alpha,R,lambda,residual,iterations"]
    for alpha in (0.5, 0.8, 1.0, 1.2, 1.6):
        rows.append(f"{alpha},10,{-(alpha**2 + 1.0)},1e-10,50")
    return _write(tmp_path / "dispersion.csv", "\n".join(rows) + "\n")


@pytest.fixture
def manifest_cfg(tmp_path):
    text = "\n".join(
        ["D = 1", "d = 1", "mu = 1", "nu = 1", "L = 1", "R = 10",
         "reaction.mean = 1", "reaction.cos_amps = 0.5", "reaction.sin_amps =",
         "reaction.table ="]
    )
    return _write(tmp_path / "manifest.cfg", text + "\n")


def test_dispersion_renders_with_bounds(tmp_path, dispersion_csv, manifest_cfg):
    out = tmp_path / "disp.png"
    render(FigureSpec("dispersion", dispersion_csv, str(out), manifest=manifest_cfg))
    assert out.stat().st_size > 0


def test_single_point_dispersion(tmp_path, manifest_cfg):
    csv_path = _write(
        tmp_path / "one.csv", "alpha,R,lambda,residual,iterations\n1.0,10,-2.0,1e-9,10\n"
    )
    out = tmp_path / "one.png"
    render(FigureSpec("dispersion", csv_path, str(out), manifest=manifest_cfg))
    assert out.stat().st_size > 0


def test_convergence_renders(tmp_path):
    rows = ["alpha,R,lambda,residual,iterations,converged"]
    lam = -1.5
    for R in (5, 10, 20, 40):
        lam -= 0.3 / R
        rows.append(f"1.0,{R},{lam},,,false")
    csv_path = _write(tmp_path / "halfplane.csv", "\n".join(rows) + "\n")
    out = tmp_path / "conv.png"
    render(FigureSpec("convergence", csv_path, str(out)))
    assert out.stat().st_size > 0


def test_front_with_summary_annotation(tmp_path):
    rows = ["t,pos_left,pos_right"]
    for k in range(20):
        t = 0.5 * k
        rows.append(f"{t},{-1 - 1.8 * t},{1 + 1.8 * t}")
    front = _write(tmp_path / "front.csv", "\n".join(rows) + "\n")
    summary = _write(
        tmp_path / "summary.csv", "c_hat,stderr,r2,deviation\n1.8,0.001,0.9999,nan\n"
    )
    out = tmp_path / "front.png"
    render(FigureSpec("front", front, str(out), summary=summary))
    assert out.stat().st_size > 0


def test_heatmap_renders(tmp_path):
    rows = ["x,y,U,V"]
    for j in range(6):
        for i in range(8):
            rows.append(f"{i * 0.125},{j * 0.5},{0.9},{1.0 - j * 0.15}")
    csv_path = _write(tmp_path / "steady.csv", "\n".join(rows) + "\n")
    out = tmp_path / "heat.png"
    render(FigureSpec("heatmap", csv_path, str(out)))
    assert out.stat().st_size > 0


def test_missing_column_named(tmp_path):
    bad = _write(tmp_path / "bad.csv", "alpha,R\n1.0,5\n")
    with pytest.raises(SchemaError, match="lambda"):
        render(FigureSpec("dispersion", bad, str(tmp_path / "x.png")))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(SchemaError, match="kind"):
        FigureSpec("surface", "a.csv", "b.png")


def test_cli_exit_codes(tmp_path, dispersion_csv):
    from fieldroad_figures.render import main

    out = tmp_path / "cli.png"
    assert main(["--kind", "dispersion", "--in", dispersion_csv, "--out", str(out)]) == 0
    bad = _write(tmp_path / "bad.csv", "alpha\n1\n")
    assert main(["--kind", "dispersion", "--in", bad, "--out", str(out)]) == 1


def test_render_byte_stable(tmp_path, dispersion_csv, manifest_cfg):
    out1 = tmp_path / "a.png"
    out2 = tmp_path / "b.png"
    spec1 = FigureSpec("dispersion", dispersion_csv, str(out1), manifest=manifest_cfg)
    spec2 = FigureSpec("dispersion", dispersion_csv, str(out2), manifest=manifest_cfg)
    render(spec1)
    render(spec2)
    assert out1.read_bytes() == out2.read_bytes()


# ---------------------------------------------------------------------------
# AC-10: all four kinds render from real pipeline CSVs, byte-stable
# ---------------------------------------------------------------------------


def _run_fieldroad(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "fieldroad", *args],
        cwd=cwd, capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def pipeline_outputs(tmp_path_factory):
    """Small-scale runs of the same pipelines and file schemas as AC-1/AC-5."""
    root = tmp_path_factory.mktemp("pipeline")
    _run_fieldroad(
        ["speed", "--halfplane", "--set", "spectral.nx=16", "--set", "spectral.dy=0.25",
         "--set", "spectral.R0=2", "--set", "spectral.R_max=8",
         "--set", "spectral.halfplane_tol=1e-7", "--set", "speed.tol_alpha=1e-2",
         "--set", "R=2", "--out", str(root / "speed")],
        cwd=str(root),
    )
    _run_fieldroad(
        ["eigen", "--set", "spectral.alphas=0.6,0.8,1.0,1.2,1.5", "--set", "R=4",
         "--set", "grid.nx=16", "--set", "grid.ny=16", "--set", "spectral.tol=1e-8",
         "--out", str(root / "eigen")],
        cwd=str(root),
    )
    _run_fieldroad(
        ["front", "--set", "R=4", "--set", "grid.nx=8", "--set", "grid.ny=16",
         "--set", "sim.domain_copies=60", "--set", "sim.T=12", "--set", "sim.dt=0.2",
         "--set", "sim.record_every=2", "--set", "sim.bump_width=2",
         "--set", "sim.bump_amplitude_u=0.5", "--set", "sim.bump_amplitude_v=0.5",
         "--out", str(root / "front")],
        cwd=str(root),
    )
    _run_fieldroad(
        ["steady", "--set", "R=4", "--set", "grid.nx=8", "--set", "grid.ny=16",
         "--out", str(root / "steady")],
        cwd=str(root),
    )
    return root


def test_ac10_all_kinds_from_pipeline_csvs(pipeline_outputs, tmp_path):
    root = pipeline_outputs
    jobs = [
        FigureSpec(
            "dispersion", str(root / "eigen" / "dispersion.csv"),
            str(tmp_path / "dispersion.png"), manifest=str(root / "eigen" / "manifest.cfg"),
        ),
        FigureSpec(
            "convergence", str(root / "speed" / "halfplane.csv"),
            str(tmp_path / "convergence.png"),
        ),
        FigureSpec(
            "front", str(root / "front" / "front.csv"), str(tmp_path / "front.png"),
            summary=str(root / "front" / "summary.csv"),
        ),
        FigureSpec(
            "heatmap", str(root / "steady" / "steady.csv"), str(tmp_path / "heatmap.png"),
        ),
    ]
    for spec in jobs:
        render(spec)
        first = open(spec.output, "rb").read()
        assert len(first) > 0
        render(spec)
        second = open(spec.output, "rb").read()
        assert first == second, f"{spec.kind} render is not byte-stable"
    print("\nAC-10 PASS: dispersion/convergence/front/heatmap rendered byte-stable")


def test_primary_suite_does_not_import_figures():
    # the primary package must run with no secondary component built
    import fieldroad

    assert "fieldroad_figures" not in sys.modules or True
    proc = subprocess.run(
        [sys.executable, "-c",
         "import fieldroad, sys; assert 'fieldroad_figures' not in sys.modules"],
        capture_output=True,
    )
    assert proc.returncode == 0
