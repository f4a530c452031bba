#!/usr/bin/env python3
"""Author the fixture variable fonts and their golden dumps.

The fixtures are compiled with fontTools (an engine independent of this
package) and the golden dump files are written straight from the authored
source lists below - IUP fills, default region spans and phantom points are
spelled out by hand, so the goldens never pass through the code under test.

Run from the repository root:

    python tools/build_fixtures.py

Outputs land in tests/data/fixtures/ and are committed.
"""

import os
import sys
from pathlib import Path

os.environ.setdefault("SOURCE_DATE_EPOCH", "0")

from fontTools.fontBuilder import FontBuilder
from fontTools.pens.ttGlyphPen import TTGlyphPen
from fontTools.ttLib import newTable
from fontTools.ttLib.tables.TupleVariation import TupleVariation

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "fixtures"

UPEM = 1000
ASCENT = 800
DESCENT = -200


def contour(pen, pts):
    pen.moveTo(pts[0])
    for p in pts[1:]:
        pen.lineTo(p)
    pen.closePath()


def build_font(path, axes, avar_mappings, glyph_outlines, metrics, cmap, variations):
    names = [".notdef"] + [g for g in glyph_outlines if g != ".notdef"]
    fb = FontBuilder(UPEM, isTTF=True)
    fb.setupGlyphOrder(names)
    fb.setupCharacterMap(cmap)
    glyphs = {}
    for name in names:
        pen = TTGlyphPen(glyphs)  # components may reference earlier glyphs
        for c in glyph_outlines.get(name, []):
            if isinstance(c, dict):  # component reference
                pen.addComponent(c["base"], (1, 0, 0, 1, c["dx"], c["dy"]))
            else:
                contour(pen, c)
        glyphs[name] = pen.glyph()
    fb.setupGlyf(glyphs)
    fb.setupNameTable({"familyName": "Fixture", "styleName": "Regular"})
    fb.setupFvar(axes, [])
    if avar_mappings:
        avar = newTable("avar")
        avar.segments = {tag: dict(seg) for tag, seg in avar_mappings.items()}
        fb.font["avar"] = avar
    fb.setupHorizontalMetrics({n: metrics.get(n, (500, 0)) for n in names})
    fb.setupHorizontalHeader(ascent=ASCENT, descent=DESCENT)
    fb.setupOS2(sTypoAscender=ASCENT, sTypoDescender=DESCENT)
    fb.setupPost()
    fb.setupGvar(variations)
    fb.font["head"].created = 0
    fb.font["head"].modified = 0
    fb.save(str(path))
    print("wrote", path)


def tv(axes_triples, deltas):
    return TupleVariation(axes_triples, deltas)


# --------------------------------------------------------------------------
# fix1: one axis, one glyph "I" (a rectangle), one delta set peaking at wght=1
# --------------------------------------------------------------------------

FIX1_AXES = [("wght", 100, 400, 900, "Weight")]
FIX1_I = [(100, 0), (300, 0), (300, 700), (100, 700)]  # counter-clockwise
FIX1_I_DELTA = [(0, 0), (200, 0), (200, 0), (0, 0)]
FIX1_I_PHANTOM_DELTA = [(0, 0), (200, 0), (0, 0), (0, 0)]
FIX1_METRICS = {"I": (400, 100), ".notdef": (500, 0)}


def build_fix1():
    build_font(
        OUT / "fix1.ttf",
        FIX1_AXES,
        {},
        {"I": [FIX1_I], ".notdef": []},
        FIX1_METRICS,
        {ord("I"): "I"},
        {"I": [tv({"wght": (0.0, 1.0, 1.0)}, FIX1_I_DELTA + FIX1_I_PHANTOM_DELTA)]},
    )
    # Golden dump, by hand. Glyph ids: 0 .notdef, 1 I.
    # Phantom defaults: pp1 = xMin - lsb = 100 - 100 = 0; pp2 = 0 + 400.
    points = ["0 -1 0 0 0", "0 -1 1 500 0"]
    for i, (x, y) in enumerate(FIX1_I):
        points.append(f"1 0 {i} {x} {y}")
    points += ["1 -1 4 0 0", "1 -1 5 400 0"]
    deltas = []
    for i, (dx, dy) in enumerate(FIX1_I_DELTA + FIX1_I_PHANTOM_DELTA[:2]):
        deltas.append(f"1 0 {i} {dx} {dy}")
    regions = ["1 0 0 0 1 1"]  # peak-only 1.0 spans (0, 1, 1)
    write_goldens("fix1", points, deltas, regions)


# --------------------------------------------------------------------------
# fix2: two axes (wght with an avar kink, wdth), a triangle with three delta
# sets including an intermediate region, and a rectangle-with-hole glyph
# carrying a sparse delta set (IUP exercised); authored windings are
# deliberately clockwise so the engine's normalization has work to do.
# --------------------------------------------------------------------------

FIX2_AXES = [("wght", 100, 400, 900, "Weight"), ("wdth", 50, 100, 200, "Width")]
FIX2_AVAR = {"wght": [(-1.0, -1.0), (0.0, 0.0), (0.5, 0.25), (1.0, 1.0)],
             "wdth": [(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)]}
FIX2_T = [(0, 0), (400, 0), (200, 600)]  # counter-clockwise
FIX2_T_D1 = [(0, 0), (100, 0), (50, 80)]
FIX2_T_D1_PH = [(0, 0), (100, 0), (0, 0), (0, 0)]
FIX2_T_D2 = [(0, 0), (0, 0), (0, 50)]
FIX2_T_D3 = [(5, 5), (5, 5), (5, 5)]
# clockwise outer, clockwise hole (hole happens to be correct already)
FIX2_R_OUTER = [(0, 0), (0, 700), (500, 700), (500, 0)]
FIX2_R_HOLE = [(100, 100), (100, 600), (400, 600), (400, 100)]
FIX2_METRICS = {"T": (400, 0), "R": (550, 0), ".notdef": (500, 0)}

# Sparse tuple on R: only outer points 0 and 2 are referenced.
FIX2_R_SPARSE_POINTS = [0, 2]
FIX2_R_SPARSE_DELTAS = [(10, 20), (30, 40)]
# Hand-applied IUP for the untouched outer points (see module docstring):
#   p1=(0,700): x ties reference p0 (x=0) -> dx 10; y at/above p2 (y=700) -> dy 40
#   p3=(500,0): x at/above p2 (x=500) -> dx 30; y ties p0 (y=0) -> dy 20
FIX2_R_DENSE = [(10, 20), (10, 40), (30, 40), (30, 20)] + [(0, 0)] * 4 + [(0, 0)] * 2


def build_fix2():
    sparse = TupleVariation(
        {"wght": (0.0, 1.0, 1.0)},
        [None] * 12,
    )
    for idx, d in zip(FIX2_R_SPARSE_POINTS, FIX2_R_SPARSE_DELTAS):
        sparse.coordinates[idx] = d
    variations = {
        "T": [
            tv({"wght": (0.0, 1.0, 1.0)}, FIX2_T_D1 + FIX2_T_D1_PH),
            tv({"wdth": (0.0, 1.0, 1.0)}, FIX2_T_D2 + [(0, 0)] * 4),
            tv(
                {"wght": (0.25, 0.5, 0.75), "wdth": (0.0, 1.0, 1.0)},
                FIX2_T_D3 + [(0, 0)] * 4,
            ),
        ],
        "R": [sparse],
    }
    build_font(
        OUT / "fix2.ttf",
        FIX2_AXES,
        FIX2_AVAR,
        {"T": [FIX2_T], "R": [FIX2_R_OUTER, FIX2_R_HOLE], ".notdef": []},
        FIX2_METRICS,
        {ord("T"): "T", ord("R"): "R"},
        variations,
    )
    points = ["0 -1 0 0 0", "0 -1 1 500 0"]
    for i, (x, y) in enumerate(FIX2_T):
        points.append(f"1 0 {i} {x} {y}")
    points += ["1 -1 3 0 0", "1 -1 4 400 0"]
    for i, (x, y) in enumerate(FIX2_R_OUTER + FIX2_R_HOLE):
        points.append(f"2 {0 if i < 4 else 1} {i} {x} {y}")
    points += ["2 -1 8 0 0", "2 -1 9 550 0"]
    deltas = []
    for j, dset in enumerate(
        (FIX2_T_D1 + FIX2_T_D1_PH[:2], FIX2_T_D2 + [(0, 0)] * 2, FIX2_T_D3 + [(0, 0)] * 2)
    ):
        for i, (dx, dy) in enumerate(dset):
            deltas.append(f"1 {j} {i} {dx} {dy}")
    for i, (dx, dy) in enumerate(FIX2_R_DENSE):
        deltas.append(f"2 0 {i} {dx} {dy}")
    regions = [
        "1 0 0 0 1 1",
        "1 1 1 0 1 1",
        "1 2 0 0.25 0.5 0.75",
        "1 2 1 0 1 1",
        "2 0 0 0 1 1",
    ]
    write_goldens("fix2", points, deltas, regions)
    # Interpolation golden: glyph T at canonical w = (0.5, -0.25).
    # gamma = (0.5, 0, 0) [ramp, outside, peak*0], so p = default + 0.5 * D1.
    inst = [
        (x + 0.5 * dx, y + 0.5 * dy)
        for (x, y), (dx, dy) in zip(
            FIX2_T + [(0, 0), (400, 0)], FIX2_T_D1 + FIX2_T_D1_PH[:2]
        )
    ]
    lines = [f"{i} {x} {y}" for i, (x, y) in enumerate(inst)]
    (OUT / "fix2_T_instance_w0.5_-0.25.txt").write_text("\n".join(lines) + "\n")


# --------------------------------------------------------------------------
# fix3: one axis, rectangle glyphs A and B with varying advances (phantom
# deltas) and a composite C = A shifted right whose gvar moves the offset.
# --------------------------------------------------------------------------

FIX3_AXES = [("wght", 100, 400, 900, "Weight")]
FIX3_A = [(50, 0), (350, 0), (350, 600), (50, 600)]
# the outline grows faster than the advance: at heavy weights A overhangs
# its right sidebearing and can collide with the next glyph
FIX3_A_DELTA = [(0, 0), (200, 0), (200, 0), (0, 0)]
FIX3_A_PH = [(0, 0), (40, 0), (0, 0), (0, 0)]
FIX3_B = [(50, 0), (250, 0), (250, 400), (50, 400)]
FIX3_B_DELTA = [(0, 0), (50, 0), (50, 50), (0, 50)]
FIX3_B_PH = [(0, 0), (100, 0), (0, 0), (0, 0)]
FIX3_METRICS = {"A": (400, 50), "B": (300, 50), "C": (500, 100), ".notdef": (500, 0)}
FIX3_C_OFFSET = (50, 0)
FIX3_C_COMP_DELTA = [(40, 0)]  # moves the whole component at wght=1
FIX3_C_PH = [(0, 0), (120, 0), (0, 0), (0, 0)]


def build_fix3():
    variations = {
        "A": [tv({"wght": (0.0, 1.0, 1.0)}, FIX3_A_DELTA + FIX3_A_PH)],
        "B": [tv({"wght": (0.0, 1.0, 1.0)}, FIX3_B_DELTA + FIX3_B_PH)],
        "C": [tv({"wght": (0.0, 1.0, 1.0)}, FIX3_C_COMP_DELTA + FIX3_C_PH)],
    }
    build_font(
        OUT / "fix3.ttf",
        FIX3_AXES,
        {},
        {
            "A": [FIX3_A],
            "B": [FIX3_B],
            "C": [{"base": "A", "dx": FIX3_C_OFFSET[0], "dy": FIX3_C_OFFSET[1]}],
            ".notdef": [],
        },
        FIX3_METRICS,
        {ord("A"): "A", ord("B"): "B", ord("C"): "C"},
        variations,
    )
    points = ["0 -1 0 0 0", "0 -1 1 500 0"]
    for i, (x, y) in enumerate(FIX3_A):
        points.append(f"1 0 {i} {x} {y}")
    points += ["1 -1 4 0 0", "1 -1 5 400 0"]
    for i, (x, y) in enumerate(FIX3_B):
        points.append(f"2 0 {i} {x} {y}")
    points += ["2 -1 4 0 0", "2 -1 5 300 0"]
    # C flattens to A's outline shifted by the offset; its own phantoms use
    # C's metrics: pp1 = xMin - lsb = 100 - 100 = 0, pp2 = 0 + 500.
    for i, (x, y) in enumerate(FIX3_A):
        points.append(f"3 0 {i} {x + FIX3_C_OFFSET[0]} {y + FIX3_C_OFFSET[1]}")
    points += ["3 -1 4 0 0", "3 -1 5 500 0"]
    deltas = []
    for i, (dx, dy) in enumerate(FIX3_A_DELTA + FIX3_A_PH[:2]):
        deltas.append(f"1 0 {i} {dx} {dy}")
    for i, (dx, dy) in enumerate(FIX3_B_DELTA + FIX3_B_PH[:2]):
        deltas.append(f"2 0 {i} {dx} {dy}")
    # C set 0: A's own delta set mapped through the component (identity 2x2,
    # phantom rows zeroed); C set 1: the component offset delta broadcast.
    for i, (dx, dy) in enumerate(FIX3_A_DELTA + [(0, 0), (0, 0)]):
        deltas.append(f"3 0 {i} {dx} {dy}")
    for i in range(4):
        deltas.append(f"3 1 {i} {FIX3_C_COMP_DELTA[0][0]} {FIX3_C_COMP_DELTA[0][1]}")
    deltas.append(f"3 1 4 {FIX3_C_PH[0][0]} {FIX3_C_PH[0][1]}")
    deltas.append(f"3 1 5 {FIX3_C_PH[1][0]} {FIX3_C_PH[1][1]}")
    regions = ["1 0 0 0 1 1", "2 0 0 0 1 1", "3 0 0 0 1 1", "3 1 0 0 1 1"]
    write_goldens("fix3", points, deltas, regions)


def write_goldens(stem, points, deltas, regions):
    (OUT / f"{stem}.points.txt").write_text("\n".join(points) + "\n")
    (OUT / f"{stem}.deltas.txt").write_text("\n".join(deltas) + "\n")
    (OUT / f"{stem}.regions.txt").write_text("\n".join(regions) + "\n")


def build_static():
    """A static (non-variable) font: no fvar/gvar at all."""
    fb = FontBuilder(UPEM, isTTF=True)
    names = [".notdef", "I"]
    fb.setupGlyphOrder(names)
    fb.setupCharacterMap({ord("I"): "I"})
    glyphs = {}
    for name in names:
        pen = TTGlyphPen(glyphs)
        if name == "I":
            contour(pen, FIX1_I)
        glyphs[name] = pen.glyph()
    fb.setupGlyf(glyphs)
    fb.setupNameTable({"familyName": "FixtureStatic", "styleName": "Regular"})
    fb.setupHorizontalMetrics({".notdef": (500, 0), "I": (400, 100)})
    fb.setupHorizontalHeader(ascent=ASCENT, descent=DESCENT)
    fb.setupOS2(sTypoAscender=ASCENT, sTypoDescender=DESCENT)
    fb.setupPost()
    fb.font["head"].created = 0
    fb.font["head"].modified = 0
    fb.save(str(OUT / "static.ttf"))
    print("wrote", OUT / "static.ttf")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    build_fix1()
    build_fix2()
    build_fix3()
    build_static()


if __name__ == "__main__":
    sys.exit(main())
