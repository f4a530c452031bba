"""gvar decoding: shared tuples, packed point numbers, packed deltas.

The store is decoded into per-glyph lists of raw tuples
(peak, start, end, point_numbers, deltas) in file order; region
normalization and IUP happen in the model assembly.
"""

import struct
from dataclasses import dataclass

from ..errors import Malformed

F2DOT14 = 16384.0

EMBEDDED_PEAK_TUPLE = 0x8000
INTERMEDIATE_REGION = 0x4000
PRIVATE_POINT_NUMBERS = 0x2000
TUPLE_INDEX_MASK = 0x0FFF

TUPLES_SHARE_POINT_NUMBERS = 0x8000
TUPLE_COUNT_MASK = 0x0FFF

POINTS_ARE_WORDS = 0x80
POINT_RUN_COUNT_MASK = 0x7F

DELTAS_ARE_ZERO = 0x80
DELTAS_ARE_WORDS = 0x40
DELTA_RUN_COUNT_MASK = 0x3F


@dataclass
class RawTuple:
    """One tuple variation record before region/default normalization.

    point_numbers is None when the tuple covers all points.
    """

    peak: tuple
    start: tuple  # None when no intermediate region was encoded
    end: tuple
    point_numbers: list
    deltas: list  # [(dx, dy)] aligned with point_numbers (or all points)


def parse_gvar(data, axis_count, glyph_point_counts):
    """-> list (per glyph id) of lists of RawTuple.

    glyph_point_counts holds the gvar point count per glyph, i.e. outline
    points (or component count) plus the four phantom points.
    """
    if len(data) < 20:
        raise Malformed("gvar header truncated", table="gvar")
    (_major, _minor, table_axes, shared_count, shared_offset, glyph_count, flags,
     data_offset) = struct.unpack(">HHHHLHHL", data[:20])
    if table_axes != axis_count:
        raise Malformed(
            f"gvar axis count {table_axes} != fvar axis count {axis_count}",
            table="gvar",
        )
    long_offsets = flags & 1
    pos = 20
    n_offsets = glyph_count + 1
    if long_offsets:
        if pos + 4 * n_offsets > len(data):
            raise Malformed("gvar offsets truncated", table="gvar", offset=pos)
        offsets = struct.unpack(f">{n_offsets}L", data[pos : pos + 4 * n_offsets])
    else:
        if pos + 2 * n_offsets > len(data):
            raise Malformed("gvar offsets truncated", table="gvar", offset=pos)
        offsets = [
            2 * v
            for v in struct.unpack(f">{n_offsets}H", data[pos : pos + 2 * n_offsets])
        ]

    shared = []
    for i in range(shared_count):
        p = shared_offset + 2 * axis_count * i
        if p + 2 * axis_count > len(data):
            raise Malformed("shared tuples truncated", table="gvar", offset=p)
        coords = struct.unpack(f">{axis_count}h", data[p : p + 2 * axis_count])
        shared.append(tuple(c / F2DOT14 for c in coords))

    per_glyph = []
    for gid in range(glyph_count):
        lo = data_offset + offsets[gid]
        hi = data_offset + offsets[gid + 1]
        if lo == hi:
            per_glyph.append([])
            continue
        if hi > len(data) or lo > hi:
            raise Malformed(f"glyph {gid} variation data out of range", "gvar", lo)
        point_count = glyph_point_counts[gid] if gid < len(glyph_point_counts) else 0
        per_glyph.append(
            _parse_glyph_variations(
                data[lo:hi], axis_count, shared, point_count, gid
            )
        )
    # Glyphs beyond gvar's glyphCount simply have no variation data.
    per_glyph.extend([[] for _ in range(len(glyph_point_counts) - glyph_count)])
    return per_glyph


def _parse_glyph_variations(blob, axis_count, shared, point_count, gid):
    if len(blob) < 4:
        raise Malformed(f"glyph {gid} variation header truncated", "gvar", 0)
    tuple_count_flags, data_offset = struct.unpack(">HH", blob[:4])
    tuple_count = tuple_count_flags & TUPLE_COUNT_MASK
    pos = 4

    serialized = blob[data_offset:]
    ser_pos = 0
    shared_points = None
    if tuple_count_flags & TUPLES_SHARE_POINT_NUMBERS:
        shared_points, ser_pos = _unpack_points(serialized, ser_pos, point_count, gid)

    tuples = []
    for _ in range(tuple_count):
        if pos + 4 > len(blob):
            raise Malformed(f"glyph {gid} tuple header truncated", "gvar", pos)
        var_size, tuple_index = struct.unpack(">HH", blob[pos : pos + 4])
        pos += 4
        if tuple_index & EMBEDDED_PEAK_TUPLE:
            peak = _read_coord(blob, pos, axis_count, gid)
            pos += 2 * axis_count
        else:
            idx = tuple_index & TUPLE_INDEX_MASK
            if idx >= len(shared):
                raise Malformed(f"glyph {gid} shared tuple {idx} out of range", "gvar", pos)
            peak = shared[idx]
        start = end = None
        if tuple_index & INTERMEDIATE_REGION:
            start = _read_coord(blob, pos, axis_count, gid)
            pos += 2 * axis_count
            end = _read_coord(blob, pos, axis_count, gid)
            pos += 2 * axis_count

        body = serialized[ser_pos : ser_pos + var_size]
        if len(body) < var_size:
            raise Malformed(f"glyph {gid} tuple data truncated", "gvar", ser_pos)
        ser_pos += var_size
        bpos = 0
        if tuple_index & PRIVATE_POINT_NUMBERS:
            points, bpos = _unpack_points(body, bpos, point_count, gid)
        else:
            points = shared_points  # None means all points
        n_deltas = point_count if points is None else len(points)
        dx, bpos = _unpack_deltas(body, bpos, n_deltas, gid)
        dy, bpos = _unpack_deltas(body, bpos, n_deltas, gid)
        tuples.append(
            RawTuple(
                peak=peak,
                start=start,
                end=end,
                point_numbers=None if points is None else list(points),
                deltas=list(zip(dx, dy)),
            )
        )
    return tuples


def _read_coord(blob, pos, axis_count, gid):
    if pos + 2 * axis_count > len(blob):
        raise Malformed(f"glyph {gid} tuple coords truncated", "gvar", pos)
    coords = struct.unpack(f">{axis_count}h", blob[pos : pos + 2 * axis_count])
    return tuple(c / F2DOT14 for c in coords)


def _unpack_points(data, pos, point_count, gid):
    """Packed point numbers -> (list of point indices | None for all, new pos)."""
    if pos >= len(data):
        raise Malformed(f"glyph {gid} packed points truncated", "gvar", pos)
    count = data[pos]
    pos += 1
    if count == 0:
        return None, pos
    if count & POINTS_ARE_WORDS:
        if pos >= len(data):
            raise Malformed(f"glyph {gid} packed points truncated", "gvar", pos)
        count = (count & POINT_RUN_COUNT_MASK) << 8 | data[pos]
        pos += 1
    points = []
    value = 0
    while len(points) < count:
        if pos >= len(data):
            raise Malformed(f"glyph {gid} point run truncated", "gvar", pos)
        header = data[pos]
        pos += 1
        run_len = (header & POINT_RUN_COUNT_MASK) + 1
        if header & POINTS_ARE_WORDS:
            need = 2 * run_len
            if pos + need > len(data):
                raise Malformed(f"glyph {gid} point run truncated", "gvar", pos)
            vals = struct.unpack(f">{run_len}H", data[pos : pos + need])
            pos += need
        else:
            if pos + run_len > len(data):
                raise Malformed(f"glyph {gid} point run truncated", "gvar", pos)
            vals = data[pos : pos + run_len]
            pos += run_len
        for v in vals:
            value += v
            points.append(value)
    if point_count and any(p >= point_count for p in points):
        raise Malformed(
            f"glyph {gid} references point {max(points)} of {point_count}", "gvar", pos
        )
    return points, pos


def _unpack_deltas(data, pos, n_deltas, gid):
    deltas = []
    while len(deltas) < n_deltas:
        if pos >= len(data):
            raise Malformed(f"glyph {gid} delta run truncated", "gvar", pos)
        header = data[pos]
        pos += 1
        run_len = (header & DELTA_RUN_COUNT_MASK) + 1
        if header & DELTAS_ARE_ZERO:
            deltas.extend([0] * run_len)
        elif header & DELTAS_ARE_WORDS:
            need = 2 * run_len
            if pos + need > len(data):
                raise Malformed(f"glyph {gid} delta run truncated", "gvar", pos)
            deltas.extend(struct.unpack(f">{run_len}h", data[pos : pos + need]))
            pos += need
        else:
            if pos + run_len > len(data):
                raise Malformed(f"glyph {gid} delta run truncated", "gvar", pos)
            deltas.extend(struct.unpack(f">{run_len}b", data[pos : pos + run_len]))
            pos += run_len
    if len(deltas) > n_deltas:
        raise Malformed(f"glyph {gid} inconsistent packed delta count", "gvar", pos)
    return deltas, pos
