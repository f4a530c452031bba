"""Human-readable dumps of an unpacked model.

The format is line oriented, one record per line:

    points:  <glyph> <contour> <index> <x> <y>     (contour -1 = phantom)
    deltas:  <glyph> <set> <index> <dx> <dy>
    regions: <glyph> <set> <axis> <start> <peak> <end>

The quadratic dumps reflect the file-order unpacking (integer font units
where the file stores integers); the cubic dump reflects the canonical
post-elevation model.
"""


def _fmt(v):
    f = float(v)
    return repr(int(f)) if f.is_integer() else repr(f)


def _contour_of(index, contour_ends):
    for ci, end in enumerate(contour_ends):
        if index <= end:
            return ci
    return -1


def dump_points(model):
    lines = []
    for gid in sorted(model.glyphs):
        raw = model.glyphs[gid].raw
        for i, (x, y) in enumerate(raw.points):
            ci = _contour_of(i, raw.contour_ends) if i < len(raw.on_curve) else -1
            lines.append(f"{gid} {ci} {i} {_fmt(x)} {_fmt(y)}")
    return "\n".join(lines) + "\n"


def dump_deltas(model):
    lines = []
    for gid in sorted(model.glyphs):
        raw = model.glyphs[gid].raw
        for j, dset in enumerate(raw.deltas):
            for i, (dx, dy) in enumerate(dset):
                lines.append(f"{gid} {j} {i} {_fmt(dx)} {_fmt(dy)}")
    return "\n".join(lines) + "\n"


def dump_regions(model):
    lines = []
    for gid in sorted(model.glyphs):
        glyph = model.glyphs[gid]
        for j, region in enumerate(glyph.regions):
            for axis, (s, p, e) in sorted(region.triples.items()):
                lines.append(f"{gid} {j} {axis} {_fmt(s)} {_fmt(p)} {_fmt(e)}")
    return "\n".join(lines) + "\n"


def dump_cubic_points(model):
    lines = []
    for gid in sorted(model.glyphs):
        glyph = model.glyphs[gid]
        for ci, (start, count, _closed) in enumerate(glyph.contours):
            for i in range(start, start + count):
                x, y = glyph.default_points[i]
                lines.append(f"{gid} {ci} {i} {_fmt(x)} {_fmt(y)}")
        for i in glyph.phantom_indices:
            x, y = glyph.default_points[i]
            lines.append(f"{gid} -1 {i} {_fmt(x)} {_fmt(y)}")
    return "\n".join(lines) + "\n"
