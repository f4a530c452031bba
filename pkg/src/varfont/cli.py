"""Batch command-line interface.

Subcommands: inspect, instance, gradcheck, drag, resolve, simulate, match,
serve. Application commands take a scenario file of `key value` lines
(font, text, and command-specific settings; see README) and print a single
machine-parseable line `METRIC name=value ...` on success.

Exit codes: 0 ok, 1 check failed, 2 usage or input error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .collision import ColliderScene, detect_contacts
from .energies import (
    CompositeEnergy,
    WordPipeline,
    collision_energy,
    drag_energy,
    image_energy,
)
from .errors import FontParseError, MissingGlyph
from .gradients import gradient_check
from .interp import layout_word, normalize_axis
from .parse import parse_font
from .raster import RasterConfig, load_target, rasterize, save_pgm
from .simulation import SimScript, SimState, run as run_sim
from .solvers import SolverConfig, solve_adam, solve_lm
from .svg import export_svg

USAGE_ERROR = 2
CHECK_FAILED = 1


class CliError(Exception):
    def __init__(self, message, code=USAGE_ERROR):
        super().__init__(message)
        self.code = code


def _load_font(path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read font: {exc}")
    try:
        return parse_font(data)
    except FontParseError as exc:
        raise CliError(f"font parse failed: {exc}")


def _metrics(**kv):
    parts = " ".join(f"{k}={v}" for k, v in kv.items())
    print(f"METRIC {parts}")


def _read_scenario(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read scenario: {exc}")
    entries = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, _, rest = line.partition(" ")
            entries.append((key, rest.strip()))
    if not entries:
        raise CliError(f"scenario file {path} is empty")
    return entries


def _scenario_dict(entries):
    d = {}
    for k, v in entries:
        d.setdefault(k, []).append(v)
    return d


def _first(d, key, default=None, cast=str):
    if key in d:
        return cast(d[key][0])
    return default


def _floats(text):
    return [float(v) for v in text.split()]


def _require(d, key, cast=str):
    if key not in d:
        raise CliError(f"scenario missing required key {key!r}")
    return cast(d[key][0])


def _word(scn):
    font = _load_font(_require(scn, "font"))
    text = _require(scn, "text")
    try:
        ids = font.glyph_ids_for_text(text)
    except MissingGlyph as exc:
        raise CliError(str(exc))
    return font, text, ids


def _theta0(scn, dim):
    values = _first(scn, "theta0", None)
    if values is None:
        return np.zeros(dim)
    theta = np.array(_floats(values))
    if theta.size != dim:
        raise CliError(f"theta0 needs {dim} values, got {theta.size}")
    return theta


def _solver_config(scn, **overrides):
    kwargs = {}
    if "iterations" in scn:
        kwargs["max_iterations"] = int(scn["iterations"][0])
    if "seed" in scn:
        kwargs["seed"] = int(scn["seed"][0])
    kwargs.update(overrides)
    return SolverConfig(**kwargs)


def _maybe_trace(args, result):
    if getattr(args, "trace", None):
        Path(args.trace).write_text(result.trace_csv())


# ---------------------------------------------------------------- commands


def cmd_inspect(args):
    font = _load_font(args.font)
    if args.json:
        import json

        payload = {
            "units_per_em": font.units_per_em,
            "axes": [
                {
                    "tag": a.tag,
                    "min": a.s_min,
                    "default": a.s_default,
                    "max": a.s_max,
                    "avar_points": len(a.avar_map),
                }
                for a in font.axes
            ],
            "glyph_count": len(font.glyphs),
            "glyphs": {
                str(gid): {
                    "points": g.n_points,
                    "delta_sets": len(g.regions),
                    "contours": len(g.contours),
                }
                for gid, g in sorted(font.glyphs.items())
            },
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    print(f"units_per_em {font.units_per_em}")
    print(f"axes {font.n_axes}")
    for a in font.axes:
        avar = f" avar_points={len(a.avar_map)}" if a.avar_map else ""
        print(f"  {a.tag} min={a.s_min:g} default={a.s_default:g} max={a.s_max:g}{avar}")
    print(f"glyphs {len(font.glyphs)}")
    for gid, g in sorted(font.glyphs.items()):
        print(f"  glyph {gid} k={g.n_points} m={len(g.regions)} contours={len(g.contours)}")
    return 0


def cmd_instance(args):
    font = _load_font(args.font)
    settings = {}
    for item in args.axis or []:
        tag, _, value = item.partition("=")
        if not value:
            raise CliError(f"--axis wants tag=value, got {item!r}")
        try:
            idx = font.axis_index(tag)
        except KeyError:
            raise CliError(f"unknown axis tag {tag!r}")
        settings[idx] = float(value)
    w = np.zeros(font.n_axes)
    for idx, value in settings.items():
        w[idx] = normalize_axis(font.axes[idx], value)
    try:
        ids = font.glyph_ids_for_text(args.text)
    except MissingGlyph as exc:
        raise CliError(str(exc))
    theta = np.tile(w, (len(ids), 1))
    layout = layout_word(font, ids, theta)
    svg = export_svg(layout)
    Path(args.output).write_text(svg)
    _metrics(glyphs=len(ids), advance=f"{layout.advance:.4f}")
    return 0


def cmd_gradcheck(args):
    font = _load_font(args.font)
    if args.samples == 0:
        print("warning: --samples 0 requested; nothing checked")
        _metrics(samples=0, max_rel_error=0.0)
        return 0
    if args.text:
        try:
            ids = font.glyph_ids_for_text(args.text)
        except MissingGlyph as exc:
            raise CliError(str(exc))
        words = [ids]
    else:
        words = [[gid] for gid in sorted(font.glyphs) if font.glyphs[gid].regions]
        words = words[: args.max_glyphs]
    worst = 0.0
    print(f"{'glyph':>8} {'axis':>8} {'samples':>8} {'max_rel_err':>14}")
    for ids in words:
        records, rel, per_axis = gradient_check(
            font, ids, n_samples=args.samples, seed=args.seed
        )
        if args.corrupt:
            rel = max(rel, 1.0)  # negative control: report a broken Jacobian
            per_axis = per_axis + 1.0
        for col, axis_err in enumerate(per_axis):
            glyph_pos = ids[col // font.n_axes]
            tag = font.axes[col % font.n_axes].tag
            print(
                f"{glyph_pos:>8} {tag:>8} {len(records):>8} {axis_err:>14.3e}"
            )
        worst = max(worst, rel)
    _metrics(max_rel_error=f"{worst:.3e}", threshold=args.threshold)
    return 0 if worst < args.threshold else CHECK_FAILED


def cmd_drag(args):
    scn = _scenario_dict(_read_scenario(args.scenario))
    font, _, ids = _word(scn)
    pipe = WordPipeline(font, ids)
    theta0 = _theta0(scn, pipe.dim)
    segment = _require(scn, "segment", int)
    t = _require(scn, "t", float)
    target = np.array(_floats(_require(scn, "target")))
    if target.size != 2:
        raise CliError("target wants two numbers")
    lam = _first(scn, "lambda", 1e-2, float)
    config = _solver_config(scn)
    energy = CompositeEnergy(
        [drag_energy(pipe, (segment, t), target, theta_prev=theta0, lam=lam)]
    )
    result = solve_lm(energy, theta0, config)
    residual = float(
        np.linalg.norm(pipe.curve_point(result.theta, segment, t) - target)
    )
    _maybe_trace(args, result)
    if args.output:
        Path(args.output).write_text(export_svg(pipe.layout(result.theta)))
    _metrics(
        residual=f"{residual:.6f}",
        iterations=result.iterations,
        reason=result.reason,
        energy=f"{result.energy:.6e}",
    )
    return 0 if result.reason != "max_iter" or residual < font.units_per_em else CHECK_FAILED


def _scene_from_scenario(scn, entries):
    inline = [
        f"{k} {v}" for k, v in entries if k in ("wall", "poly", "pairwise")
    ]
    scene_path = _first(scn, "scene")
    if scene_path:
        return ColliderScene.from_text(Path(scene_path).read_text())
    return ColliderScene.from_text("\n".join(inline))


def cmd_resolve(args):
    entries = _read_scenario(args.scenario)
    scn = _scenario_dict(entries)
    font, _, ids = _word(scn)
    pipe = WordPipeline(font, ids)
    theta0 = _theta0(scn, pipe.dim)
    scene = _scene_from_scenario(scn, entries)
    if scene.is_empty():
        raise CliError("resolve scenario has no colliders")
    density = _first(scn, "density", 8, int)
    config = _solver_config(scn)

    def measure(theta):
        contacts = detect_contacts(pipe.layout(theta), scene, density)
        return max((c.penetration for c in contacts), default=0.0), len(contacts)

    depth_before, n_before = measure(theta0)
    if args.no_collision:
        _metrics(
            max_penetration=f"{depth_before:.4f}",
            contacts=n_before,
            iterations=0,
            collision="off",
        )
        return 0
    term = collision_energy(
        pipe, detector=lambda layout: detect_contacts(layout, scene, density)
    )
    result = solve_lm(CompositeEnergy([term]), theta0, config)
    depth_after, n_after = measure(result.theta)
    _maybe_trace(args, result)
    if args.output:
        Path(args.output).write_text(export_svg(pipe.layout(result.theta)))
    _metrics(
        max_penetration=f"{depth_after:.4f}",
        penetration_before=f"{depth_before:.4f}",
        iterations=result.iterations,
        collision="on",
    )
    return 0


def cmd_simulate(args):
    entries = _read_scenario(args.scenario)
    scn = _scenario_dict(entries)
    font, _, ids = _word(scn)
    pipe = WordPipeline(font, ids)
    theta0 = _theta0(scn, pipe.dim)
    script_path = _first(scn, "script")
    script_text = (
        Path(script_path).read_text()
        if script_path
        else "\n".join(f"{k} {v}" for k, v in entries if k not in ("font", "text", "theta0"))
    )
    try:
        script = SimScript.from_text(script_text, pipe.dim)
    except ValueError as exc:
        raise CliError(f"bad script: {exc}")
    v0 = _first(scn, "velocity0", None)
    velocity = np.array(_floats(v0)) if v0 else np.zeros(pipe.dim)
    state = SimState(theta=theta0, velocity=velocity)
    outdir = Path(args.outdir) if args.outdir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    max_depth = 0.0
    frame_rows = []

    def on_frame(i, st):
        nonlocal max_depth
        layout = pipe.layout(st.theta)
        depth = 0.0
        if not script.scene.is_empty():
            contacts = detect_contacts(layout, script.scene, script.density)
            depth = max((c.penetration for c in contacts), default=0.0)
            max_depth = max(max_depth, depth)
        frame_rows.append((i, depth, float(np.linalg.norm(st.velocity))))
        if outdir:
            (outdir / f"frame_{i:05d}.svg").write_text(export_svg(layout))

    trajectory = run_sim(script, state, pipe, on_frame=on_frame)
    if args.trace:
        lines = ["frame,penetration,velocity_norm"]
        lines += [f"{i},{d!r},{v!r}" for i, d, v in frame_rows]
        Path(args.trace).write_text("\n".join(lines) + "\n")
    _metrics(
        frames=len(trajectory),
        max_penetration=f"{max_depth:.4f}",
        final_theta=" ".join(f"{v:.6f}" for v in trajectory[-1].theta),
    )
    return 0


def cmd_match(args):
    scn = _scenario_dict(_read_scenario(args.scenario))
    font, _, ids = _word(scn)
    pipe = WordPipeline(font, ids)
    theta0 = _theta0(scn, pipe.dim)
    resolution = _first(scn, "resolution", 64, int)
    tau = _first(scn, "tau", 1.5, float)
    density = _first(scn, "density", 8, int)
    layout0 = pipe.layout(np.zeros(pipe.dim))
    pts = layout0.points
    bounds = (
        float(pts[:, 0].min()),
        float(pts[:, 1].min()),
        float(pts[:, 0].max()),
        float(pts[:, 1].max()),
    )
    config = RasterConfig.fit(
        bounds, width=resolution, height=resolution, tau=tau, density=density
    )
    target_path = _require(scn, "target_image")
    target = load_target(target_path, config)
    config_solver = _solver_config(scn, max_iterations=_first(scn, "iterations", 100, int))
    energy = CompositeEnergy([image_energy(pipe, target, config)])
    initial = energy.value(theta0)
    result = solve_adam(energy, theta0, config_solver)
    final = result.energy
    reduction = 0.0 if initial <= 0 else 100.0 * (1.0 - final / initial)
    _maybe_trace(args, result)
    if args.output:
        save_pgm(args.output, rasterize(pipe.layout(result.theta), config))
    _metrics(
        initial=f"{initial:.6e}",
        final=f"{final:.6e}",
        reduction_pct=f"{reduction:.2f}",
        iterations=result.iterations,
        theta=" ".join(f"{v:.6f}" for v in result.theta),
    )
    return 0


def cmd_serve(args):
    from .service import serve

    serve(args.font, host=args.host, port=args.port)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="varfont", description="differentiable variable-font toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="dump axes, regions and glyph stats")
    p.add_argument("font")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_inspect)

    p = sub.add_parser("instance", help="render text at axis settings to SVG")
    p.add_argument("font")
    p.add_argument("--text", required=True)
    p.add_argument("--axis", action="append", metavar="TAG=VALUE")
    p.add_argument("-o", "--output", default="instance.svg")
    p.set_defaults(fn=cmd_instance)

    p = sub.add_parser("gradcheck", help="finite-difference Jacobian check")
    p.add_argument("font")
    p.add_argument("--text")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=1e-4)
    p.add_argument("--max-glyphs", type=int, default=10)
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_gradcheck)

    for name, fn, extra in (
        ("drag", cmd_drag, ()),
        ("resolve", cmd_resolve, ("--no-collision",)),
        ("simulate", cmd_simulate, ()),
        ("match", cmd_match, ()),
    ):
        p = sub.add_parser(name, help=f"run a {name} scenario file")
        p.add_argument("scenario")
        p.add_argument("--trace", help="write per-iteration CSV here")
        if name == "simulate":
            p.add_argument("--outdir", help="write frame_%%05d.svg files here")
        else:
            p.add_argument("-o", "--output")
        for flag in extra:
            p.add_argument(flag, action="store_true")
        p.set_defaults(fn=fn)

    p = sub.add_parser("serve", help="run the interactive session service")
    p.add_argument("--font", required=True, action="append")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except FontParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except BrokenPipeError:
        return 0  # downstream pager closed the pipe


if __name__ == "__main__":
    sys.exit(main())
