"""Fixed-layout metric and mapping tables: head, maxp, hhea, hmtx, loca, cmap,
fvar, avar.

Each parser takes the raw table bytes and returns plain Python values; all
multi-byte fields are big-endian per OpenType.
"""

import struct

from ..errors import Malformed

F2DOT14 = 16384.0
FIXED = 65536.0


def _need(data, n, table, offset=0):
    if len(data) < n:
        raise Malformed(
            f"table needs {n} bytes, has {len(data)}", table=table, offset=offset
        )


def parse_head(data):
    """-> (units_per_em, index_to_loc_format)"""
    _need(data, 54, "head")
    units_per_em = struct.unpack(">H", data[18:20])[0]
    index_to_loc = struct.unpack(">h", data[50:52])[0]
    if units_per_em == 0:
        raise Malformed("unitsPerEm is zero", table="head", offset=18)
    if index_to_loc not in (0, 1):
        raise Malformed(
            f"indexToLocFormat {index_to_loc} invalid", table="head", offset=50
        )
    return units_per_em, index_to_loc


def parse_maxp(data):
    """-> number of glyphs"""
    _need(data, 6, "maxp")
    return struct.unpack(">H", data[4:6])[0]


def parse_hhea(data):
    """-> number of long horizontal metrics"""
    _need(data, 36, "hhea")
    return struct.unpack(">H", data[34:36])[0]


def parse_hmtx(data, num_h_metrics, num_glyphs):
    """-> (advances, left_sidebearings), one entry per glyph.

    Glyphs past numberOfHMetrics repeat the last advance with their own lsb.
    """
    if num_h_metrics == 0 or num_h_metrics > num_glyphs:
        raise Malformed(
            f"numberOfHMetrics {num_h_metrics} vs {num_glyphs} glyphs", table="hmtx"
        )
    _need(data, 4 * num_h_metrics + 2 * (num_glyphs - num_h_metrics), "hmtx")
    advances = []
    lsbs = []
    pos = 0
    for _ in range(num_h_metrics):
        aw, lsb = struct.unpack(">Hh", data[pos : pos + 4])
        advances.append(aw)
        lsbs.append(lsb)
        pos += 4
    for _ in range(num_glyphs - num_h_metrics):
        (lsb,) = struct.unpack(">h", data[pos : pos + 2])
        advances.append(advances[-1])
        lsbs.append(lsb)
        pos += 2
    return advances, lsbs


def parse_loca(data, num_glyphs, index_to_loc_format):
    """-> list of num_glyphs+1 byte offsets into glyf."""
    n = num_glyphs + 1
    if index_to_loc_format == 0:
        _need(data, 2 * n, "loca")
        return [2 * v for v in struct.unpack(f">{n}H", data[: 2 * n])]
    _need(data, 4 * n, "loca")
    return list(struct.unpack(f">{n}L", data[: 4 * n]))


def parse_fvar(data):
    """-> list of (tag, min, default, max) design-space axis records."""
    _need(data, 16, "fvar")
    (_major, _minor, axes_offset, _reserved, axis_count, axis_size, _icount, _isize) = (
        struct.unpack(">HHHHHHHH", data[:16])
    )
    if axis_size < 20:
        raise Malformed(f"axis record size {axis_size} < 20", table="fvar", offset=8)
    axes = []
    for i in range(axis_count):
        pos = axes_offset + i * axis_size
        _need(data, pos + 20, "fvar", pos)
        tag, min_v, def_v, max_v, _flags, _name = struct.unpack(
            ">4slllHH", data[pos : pos + 20]
        )
        axes.append(
            (tag.decode("latin-1"), min_v / FIXED, def_v / FIXED, max_v / FIXED)
        )
    return axes


def parse_avar(data, axis_count):
    """-> per-axis list of (from, to) normalized remap pairs (may be empty).

    Only format 1.0 is decoded; a newer major version is rejected rather
    than misread.
    """
    _need(data, 8, "avar")
    major, _minor, _reserved, table_axes = struct.unpack(">HHHH", data[:8])
    if major != 1:
        raise Malformed(f"avar major version {major} unsupported", table="avar")
    if table_axes != axis_count:
        raise Malformed(
            f"avar axis count {table_axes} != fvar axis count {axis_count}",
            table="avar",
        )
    maps = []
    pos = 8
    for _ in range(axis_count):
        _need(data, pos + 2, "avar", pos)
        (pair_count,) = struct.unpack(">H", data[pos : pos + 2])
        pos += 2
        _need(data, pos + 4 * pair_count, "avar", pos)
        pairs = []
        for _ in range(pair_count):
            frm, to = struct.unpack(">hh", data[pos : pos + 4])
            pairs.append((frm / F2DOT14, to / F2DOT14))
            pos += 4
        maps.append(pairs)
    return maps


def parse_cmap(data):
    """-> dict code point -> glyph id, from the best format 4 or 12 subtable.

    Preference order: (3,10) then (0,*) format 12, then (3,1) then (0,*)
    format 4. Subtables in other formats are ignored.
    """
    _need(data, 4, "cmap")
    _version, num_tables = struct.unpack(">HH", data[:4])
    _need(data, 4 + 8 * num_tables, "cmap")
    subtables = []
    for i in range(num_tables):
        pos = 4 + 8 * i
        platform, encoding, offset = struct.unpack(">HHL", data[pos : pos + 8])
        if offset + 2 > len(data):
            raise Malformed("cmap subtable offset out of range", table="cmap", offset=pos)
        (fmt,) = struct.unpack(">H", data[offset : offset + 2])
        subtables.append((platform, encoding, fmt, offset))

    def rank(entry):
        platform, encoding, fmt, _ = entry
        if fmt == 12:
            base = 0
        elif fmt == 4:
            base = 10
        else:
            return None
        if (platform, encoding) in ((3, 10), (0, 4), (0, 6)):
            return base + (0 if fmt == 12 else 5)
        if (platform, encoding) == (3, 1) or platform == 0:
            return base + 1
        return base + 5

    ranked = [(rank(s), s) for s in subtables if rank(s) is not None]
    if not ranked:
        return {}
    _, (_, _, fmt, offset) = min(ranked, key=lambda e: e[0])
    if fmt == 12:
        return _cmap_format12(data, offset)
    return _cmap_format4(data, offset)


def _cmap_format4(data, offset):
    _need(data, offset + 14, "cmap", offset)
    _fmt, length, _lang, seg_count_x2 = struct.unpack(
        ">HHHH", data[offset : offset + 8]
    )
    seg_count = seg_count_x2 // 2
    pos = offset + 14
    end_codes = struct.unpack(f">{seg_count}H", data[pos : pos + seg_count_x2])
    pos += seg_count_x2 + 2  # reservedPad
    start_codes = struct.unpack(f">{seg_count}H", data[pos : pos + seg_count_x2])
    pos += seg_count_x2
    id_deltas = struct.unpack(f">{seg_count}h", data[pos : pos + seg_count_x2])
    pos += seg_count_x2
    id_range_offset_pos = pos
    id_range_offsets = struct.unpack(f">{seg_count}H", data[pos : pos + seg_count_x2])
    mapping = {}
    for seg in range(seg_count):
        start, end = start_codes[seg], end_codes[seg]
        if start == 0xFFFF:
            continue
        for code in range(start, end + 1):
            if id_range_offsets[seg] == 0:
                gid = (code + id_deltas[seg]) & 0xFFFF
            else:
                gid_pos = (
                    id_range_offset_pos
                    + 2 * seg
                    + id_range_offsets[seg]
                    + 2 * (code - start)
                )
                if gid_pos + 2 > len(data):
                    raise Malformed(
                        "format 4 glyphIdArray out of range", table="cmap", offset=gid_pos
                    )
                (gid,) = struct.unpack(">H", data[gid_pos : gid_pos + 2])
                if gid != 0:
                    gid = (gid + id_deltas[seg]) & 0xFFFF
            if gid != 0:
                mapping[code] = gid
    return mapping


def _cmap_format12(data, offset):
    _need(data, offset + 16, "cmap", offset)
    n_groups = struct.unpack(">L", data[offset + 12 : offset + 16])[0]
    _need(data, offset + 16 + 12 * n_groups, "cmap", offset)
    mapping = {}
    pos = offset + 16
    for _ in range(n_groups):
        start, end, start_gid = struct.unpack(">LLL", data[pos : pos + 12])
        if end < start:
            raise Malformed("format 12 group with end < start", table="cmap", offset=pos)
        for i, code in enumerate(range(start, end + 1)):
            mapping[code] = start_gid + i
        pos += 12
    return mapping
