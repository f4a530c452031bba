"""TrueType glyph outline decoding (quadratic form, file order).

Simple glyphs become point arrays with on-curve flags; composite glyphs
become component records that the model assembly flattens.
"""

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import Malformed

ON_CURVE = 0x01
X_SHORT = 0x02
Y_SHORT = 0x04
REPEAT = 0x08
X_SAME_OR_POSITIVE = 0x10
Y_SAME_OR_POSITIVE = 0x20

ARG_1_AND_2_ARE_WORDS = 0x0001
ARGS_ARE_XY_VALUES = 0x0002
WE_HAVE_A_SCALE = 0x0008
MORE_COMPONENTS = 0x0020
WE_HAVE_AN_X_AND_Y_SCALE = 0x0040
WE_HAVE_A_TWO_BY_TWO = 0x0080


@dataclass
class SimpleOutline:
    """Quadratic outline as stored: integer points, contour end indices."""

    points: np.ndarray  # (kq, 2) float64, integer-valued
    on_curve: np.ndarray  # (kq,) bool
    contour_ends: list  # index of each contour's last point
    x_min: int = 0


@dataclass
class Component:
    glyph_id: int
    dx: float
    dy: float
    transform: np.ndarray  # 2x2, applied to component points (not the offset)
    flags: int = 0


@dataclass
class CompositeOutline:
    components: list
    x_min: int = 0


EMPTY_OUTLINE = SimpleOutline(
    points=np.zeros((0, 2)), on_curve=np.zeros(0, dtype=bool), contour_ends=[]
)


def parse_glyph(glyf, start, end, glyph_id):
    """Decode one glyph record from the glyf table slice [start:end)."""
    if start == end:
        return EMPTY_OUTLINE
    if end - start < 10:
        raise Malformed(
            f"glyph {glyph_id} record shorter than header", table="glyf", offset=start
        )
    num_contours, x_min = struct.unpack(">hh", glyf[start : start + 4])
    if num_contours >= 0:
        outline = _parse_simple(glyf, start + 10, num_contours, glyph_id)
    else:
        outline = _parse_composite(glyf, start + 10, glyph_id)
    outline.x_min = x_min
    return outline


def _parse_simple(glyf, pos, num_contours, glyph_id):
    if num_contours == 0:
        return SimpleOutline(
            points=np.zeros((0, 2)), on_curve=np.zeros(0, dtype=bool), contour_ends=[]
        )
    try:
        ends = list(
            struct.unpack(f">{num_contours}H", glyf[pos : pos + 2 * num_contours])
        )
    except struct.error:
        raise Malformed(f"glyph {glyph_id} contour ends truncated", "glyf", pos)
    pos += 2 * num_contours
    if any(ends[i] >= ends[i + 1] for i in range(len(ends) - 1)):
        raise Malformed(f"glyph {glyph_id} contour ends not increasing", "glyf", pos)
    num_points = ends[-1] + 1

    (instr_len,) = struct.unpack(">H", glyf[pos : pos + 2])
    pos += 2 + instr_len

    flags = []
    while len(flags) < num_points:
        if pos >= len(glyf):
            raise Malformed(f"glyph {glyph_id} flags truncated", "glyf", pos)
        flag = glyf[pos]
        pos += 1
        flags.append(flag)
        if flag & REPEAT:
            if pos >= len(glyf):
                raise Malformed(f"glyph {glyph_id} flag repeat truncated", "glyf", pos)
            flags.extend([flag] * glyf[pos])
            pos += 1
    if len(flags) > num_points:
        raise Malformed(f"glyph {glyph_id} flag overrun", "glyf", pos)

    xs, pos = _read_coords(glyf, pos, flags, X_SHORT, X_SAME_OR_POSITIVE, glyph_id)
    ys, pos = _read_coords(glyf, pos, flags, Y_SHORT, Y_SAME_OR_POSITIVE, glyph_id)
    points = np.column_stack(
        [np.cumsum(np.asarray(xs, dtype=np.float64)), np.cumsum(np.asarray(ys, dtype=np.float64))]
    )
    on_curve = np.asarray([bool(f & ON_CURVE) for f in flags], dtype=bool)
    return SimpleOutline(points=points, on_curve=on_curve, contour_ends=ends)


def _read_coords(glyf, pos, flags, short_bit, same_bit, glyph_id):
    deltas = []
    for flag in flags:
        if flag & short_bit:
            if pos >= len(glyf):
                raise Malformed(f"glyph {glyph_id} coordinates truncated", "glyf", pos)
            v = glyf[pos]
            pos += 1
            deltas.append(v if flag & same_bit else -v)
        elif flag & same_bit:
            deltas.append(0)
        else:
            if pos + 2 > len(glyf):
                raise Malformed(f"glyph {glyph_id} coordinates truncated", "glyf", pos)
            deltas.append(struct.unpack(">h", glyf[pos : pos + 2])[0])
            pos += 2
    return deltas, pos


def _parse_composite(glyf, pos, glyph_id):
    components = []
    while True:
        if pos + 4 > len(glyf):
            raise Malformed(f"glyph {glyph_id} component truncated", "glyf", pos)
        flags, child_id = struct.unpack(">HH", glyf[pos : pos + 4])
        pos += 4
        if flags & ARG_1_AND_2_ARE_WORDS:
            arg1, arg2 = struct.unpack(">hh", glyf[pos : pos + 4])
            pos += 4
        else:
            arg1, arg2 = struct.unpack(">bb", glyf[pos : pos + 2])
            pos += 2
        if not flags & ARGS_ARE_XY_VALUES:
            raise Malformed(
                f"glyph {glyph_id} uses point-alignment component args", "glyf", pos
            )
        transform = np.eye(2)
        if flags & WE_HAVE_A_SCALE:
            (s,) = struct.unpack(">h", glyf[pos : pos + 2])
            pos += 2
            transform = np.eye(2) * (s / 16384.0)
        elif flags & WE_HAVE_AN_X_AND_Y_SCALE:
            sx, sy = struct.unpack(">hh", glyf[pos : pos + 4])
            pos += 4
            transform = np.diag([sx / 16384.0, sy / 16384.0])
        elif flags & WE_HAVE_A_TWO_BY_TWO:
            xx, s01, s10, yy = struct.unpack(">hhhh", glyf[pos : pos + 8])
            pos += 8
            transform = (
                np.array([[xx, s01], [s10, yy]], dtype=np.float64) / 16384.0
            )
        components.append(
            Component(
                glyph_id=child_id,
                dx=float(arg1),
                dy=float(arg2),
                transform=transform,
                flags=flags,
            )
        )
        if not flags & MORE_COMPONENTS:
            break
    return CompositeOutline(components=components)


def transform_points(transform, points):
    """Apply a component 2x2 in the TrueType convention.

    x' = xx*x + yx*y, y' = xy*x + yy*y with transform rows
    [[xx, xy], [yx, yy]] (column-vector on the right of the transpose);
    this matches the reference engines' composite flattening.
    """
    return points @ transform
