"""End-to-end command-line behavior, exit codes, and determinism."""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from varfont.cli import main

from conftest import FIXTURES

FIX1 = str(FIXTURES / "fix1.ttf")
FIX2 = str(FIXTURES / "fix2.ttf")
FIX3 = str(FIXTURES / "fix3.ttf")
STATIC = str(FIXTURES / "static.ttf")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def metric_line(out):
    lines = [l for l in out.splitlines() if l.startswith("METRIC ")]
    assert len(lines) == 1, out
    pairs = dict(kv.split("=", 1) for kv in lines[0][7:].split(" ") if "=" in kv)
    return pairs


# ------------------------------------------------------------------ inspect


def test_inspect_report(capsys):
    code, out, _ = run_cli(capsys, "inspect", FIX1)
    assert code == 0
    assert "axes 1" in out
    assert "wght" in out
    assert "glyph 1 k=14 m=1" in out


def test_inspect_json(capsys):
    code, out, _ = run_cli(capsys, "inspect", FIX2, "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["axes"][0]["tag"] == "wght"
    assert payload["glyphs"]["1"]["delta_sets"] == 3


def test_inspect_static_font_exit_2(capsys):
    code, _, err = run_cli(capsys, "inspect", STATIC)
    assert code == 2
    assert "fvar" in err


# ----------------------------------------------------------------- instance


def test_instance_default_svg(capsys, tmp_path):
    out_svg = tmp_path / "i.svg"
    code, out, _ = run_cli(
        capsys, "instance", FIX1, "--text", "I", "-o", str(out_svg)
    )
    assert code == 0
    svg = out_svg.read_text()
    assert svg.count("<path") == 1
    assert metric_line(out)["advance"] == "400.0000"


def test_instance_heavy_differs(capsys, tmp_path):
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    run_cli(capsys, "instance", FIX1, "--text", "I", "-o", str(a))
    code, _, _ = run_cli(
        capsys, "instance", FIX1, "--text", "I", "--axis", "wght=900", "-o", str(b)
    )
    assert code == 0
    assert a.read_text() != b.read_text()


def test_instance_unknown_axis_exit_2(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "instance", FIX1, "--text", "I",
        "--axis", "слнт=1", "-o", str(tmp_path / "x.svg"),
    )
    assert code == 2


def test_instance_missing_glyph(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "instance", FIX1, "--text", "IZ", "-o", str(tmp_path / "x.svg")
    )
    assert code == 2
    assert "U+005A" in err


# ---------------------------------------------------------------- gradcheck


def test_gradcheck_fixtures_pass(capsys):
    code, out, _ = run_cli(capsys, "gradcheck", FIX2, "--samples", "25")
    assert code == 0
    assert float(metric_line(out)["max_rel_error"]) < 1e-4


def test_gradcheck_zero_samples_warns(capsys):
    code, out, _ = run_cli(capsys, "gradcheck", FIX1, "--samples", "0")
    assert code == 0
    assert "warning" in out


def test_gradcheck_corrupt_negative_control(capsys):
    code, out, _ = run_cli(
        capsys, "gradcheck", FIX1, "--samples", "5", "--corrupt"
    )
    assert code == 1


# --------------------------------------------------------------------- drag


def drag_scenario(tmp_path, fix=FIX1, **over):
    from varfont import parse_font
    from varfont.interp import evaluate_curve, layout_word

    font = parse_font(Path(fix).read_bytes())
    target = evaluate_curve(layout_word(font, [1], [0.6]), 1, 0.5)
    lines = {
        "font": fix,
        "text": "I",
        "segment": "1",
        "t": "0.5",
        "target": f"{target[0]} {target[1]}",
        "iterations": "50",
    }
    lines.update(over)
    path = tmp_path / "drag.scn"
    path.write_text("\n".join(f"{k} {v}" for k, v in lines.items()) + "\n")
    return path


def test_drag_scenario_recovers_target(capsys, tmp_path):
    scn = drag_scenario(tmp_path)
    code, out, _ = run_cli(capsys, "drag", str(scn))
    assert code == 0
    assert float(metric_line(out)["residual"]) < 0.5


def test_drag_empty_scenario_usage_error(capsys, tmp_path):
    empty = tmp_path / "empty.scn"
    empty.write_text("\n")
    code, _, err = run_cli(capsys, "drag", str(empty))
    assert code == 2
    assert "empty" in err


def test_drag_trace_csv(capsys, tmp_path):
    scn = drag_scenario(tmp_path)
    trace = tmp_path / "trace.csv"
    code, _, _ = run_cli(capsys, "drag", str(scn), "--trace", str(trace))
    assert code == 0
    lines = trace.read_text().splitlines()
    assert lines[0] == "iteration,energy,damping,step_norm"
    assert len(lines) >= 2


# ------------------------------------------------------------------ resolve


def resolve_scenario(tmp_path):
    # heavy weight pushes the rectangle's right edge (x = 300 + 200w) into
    # a wall at x = 420; w <= 0.6 clears it
    path = tmp_path / "resolve.scn"
    path.write_text(
        f"font {FIX1}\n"
        "text I\n"
        "theta0 1\n"
        "wall 420 -100 420 900\n"
        "iterations 60\n"
    )
    return path


def test_resolve_scenario(capsys, tmp_path):
    scn = resolve_scenario(tmp_path)
    code, out, _ = run_cli(capsys, "resolve", str(scn))
    assert code == 0
    metrics = metric_line(out)
    assert float(metrics["max_penetration"]) < 0.5
    assert float(metrics["penetration_before"]) > 10.0


def test_resolve_pairwise_glyphs(capsys, tmp_path):
    # at heavy weight glyph A overhangs its advance and invades glyph B
    path = tmp_path / "pair.scn"
    path.write_text(
        f"font {FIX3}\n"
        "text AB\n"
        "theta0 1 0\n"
        "pairwise on\n"
        "iterations 80\n"
    )
    code, out, _ = run_cli(capsys, "resolve", str(path))
    assert code == 0
    metrics = metric_line(out)
    assert float(metrics["penetration_before"]) > 10.0
    assert float(metrics["max_penetration"]) < 0.5


def test_resolve_no_collision_flag(capsys, tmp_path):
    scn = resolve_scenario(tmp_path)
    code, out, _ = run_cli(capsys, "resolve", str(scn), "--no-collision")
    assert code == 0
    metrics = metric_line(out)
    assert float(metrics["max_penetration"]) > 10.0
    assert metrics["collision"] == "off"


def test_resolve_without_colliders_usage_error(capsys, tmp_path):
    path = tmp_path / "r.scn"
    path.write_text(f"font {FIX3}\ntext AB\n")
    code, _, err = run_cli(capsys, "resolve", str(path))
    assert code == 2


# ----------------------------------------------------------------- simulate


def test_simulate_writes_frames(capsys, tmp_path):
    scn = tmp_path / "sim.scn"
    scn.write_text(
        f"font {FIX1}\n"
        "text I\n"
        "dt 0.1\n"
        "steps 4\n"
        "stiffness 1\n"
        "mass 1\n"
        "rest 0 0.5\n"
    )
    outdir = tmp_path / "frames"
    trace = tmp_path / "frames.csv"
    code, out, _ = run_cli(
        capsys, "simulate", str(scn), "--outdir", str(outdir), "--trace", str(trace)
    )
    assert code == 0
    metrics = metric_line(out)
    assert metrics["frames"] == "5"
    assert sorted(p.name for p in outdir.iterdir()) == [
        f"frame_{i:05d}.svg" for i in range(5)
    ]
    rows = trace.read_text().splitlines()
    assert rows[0] == "frame,penetration,velocity_norm"
    assert len(rows) == 6


# -------------------------------------------------------------------- match


def match_scenario(tmp_path, theta_star=0.55):
    from varfont import parse_font
    from varfont.energies import WordPipeline
    from varfont.raster import RasterConfig, rasterize, save_pgm

    font = parse_font(Path(FIX1).read_bytes())
    pipe = WordPipeline(font, [1])
    layout0 = pipe.layout(np.zeros(1))
    pts = layout0.points
    bounds = (
        float(pts[:, 0].min()), float(pts[:, 1].min()),
        float(pts[:, 0].max()), float(pts[:, 1].max()),
    )
    config = RasterConfig.fit(bounds, 64, 64, tau=1.5)
    target = rasterize(pipe.layout(np.array([theta_star])), config)
    pgm = tmp_path / "target.pgm"
    save_pgm(pgm, target)
    scn = tmp_path / "match.scn"
    scn.write_text(
        f"font {FIX1}\ntext I\ntarget_image {pgm}\nresolution 64\niterations 100\n"
    )
    return scn


def test_match_self_reconstruction(capsys, tmp_path):
    scn = match_scenario(tmp_path)
    code, out, _ = run_cli(capsys, "match", str(scn))
    assert code == 0
    metrics = metric_line(out)
    assert float(metrics["reduction_pct"]) >= 95.0
    assert abs(float(metrics["theta"]) - 0.55) < 0.05


# ------------------------------------------------------------- determinism


def test_commands_byte_identical(capsys, tmp_path):
    outputs = []
    for tag in ("one", "two"):
        svg = tmp_path / f"{tag}.svg"
        run_cli(capsys, "instance", FIX2, "--text", "TR",
                "--axis", "wght=700", "-o", str(svg))
        outputs.append(svg.read_bytes())
    assert outputs[0] == outputs[1]

    scn = drag_scenario(tmp_path)
    drags = []
    for tag in ("a", "b"):
        svg = tmp_path / f"drag_{tag}.svg"
        trace = tmp_path / f"trace_{tag}.csv"
        run_cli(capsys, "drag", str(scn), "-o", str(svg), "--trace", str(trace))
        drags.append(svg.read_bytes() + trace.read_bytes())
    assert drags[0] == drags[1]


def test_console_entry_point(tmp_path):
    exe = shutil.which("varfont")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run(
        [exe, "inspect", FIX1], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "units_per_em 1000" in proc.stdout
