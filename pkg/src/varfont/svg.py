"""SVG 1.1 export of word layouts: cubic path commands only."""

import numpy as np


def _fmt(v):
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def glyph_path_data(instance):
    """Path data for one glyph instance in glyph-local coordinates."""
    parts = []
    pts = instance.points
    for start, count, closed in instance.contours:
        n_seg = count // 3 if closed else (count - 1) // 3
        if n_seg == 0:
            continue
        a = pts[start]
        parts.append(f"M {_fmt(a[0])} {_fmt(a[1])}")
        for i in range(n_seg):
            base = start + 3 * i
            nxt = start + (3 * (i + 1)) % count if closed else base + 3
            c1, c2, b = pts[base + 1], pts[base + 2], pts[nxt]
            parts.append(
                "C "
                + " ".join(_fmt(v) for v in (c1[0], c1[1], c2[0], c2[1], b[0], b[1]))
            )
        if closed:
            parts.append("Z")
    return " ".join(parts)


def export_svg(layout, padding_ratio=0.05):
    """One path element per glyph; y axis flipped to screen convention;
    viewBox covers the outline bounds padded by a fraction of the em."""
    outline_pts = []
    for inst, off in zip(layout.instances, layout.offsets):
        k = inst.points.shape[0]
        if k > 2:
            outline_pts.append(inst.points[: k - 2] + off)
    if outline_pts:
        allpts = np.vstack(outline_pts)
        x0, y0 = allpts.min(axis=0)
        x1, y1 = allpts.max(axis=0)
    else:
        x0 = y0 = 0.0
        x1 = y1 = float(layout.units_per_em)
    pad = padding_ratio * layout.units_per_em
    # flipped-y frame: y' = -y
    vb = (x0 - pad, -(y1 + pad), (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad)
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="'
        + " ".join(_fmt(v) for v in vb)
        + '">',
        '<g transform="scale(1 -1)">',
    ]
    for inst, off in zip(layout.instances, layout.offsets):
        d = glyph_path_data(inst)
        lines.append(
            f'<path transform="translate({_fmt(off[0])} {_fmt(off[1])})" d="{d}"/>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
