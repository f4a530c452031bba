"""Interpolation of untouched points.

Sparse gvar deltas reference a subset of a glyph's points; every other
point on the same contour receives an inferred delta: per coordinate,
linear interpolation between the two cyclically-bracketing referenced
points when the untouched coordinate lies between theirs, and the nearer
reference's delta otherwise. Contours with no referenced point get zero.
The four phantom points are each their own single-point "contour".
"""

import numpy as np


def apply_iup(sparse, points, contour_ends, total_points):
    """Expand sparse deltas to a dense (total_points, 2) array.

    sparse: dict point index -> (dx, dy)
    points: (kq, 2) outline coordinates (contour points only)
    contour_ends: last point index of each contour
    total_points: kq plus the phantom points (phantoms default to zero)
    """
    dense = np.zeros((total_points, 2))
    for idx, (dx, dy) in sparse.items():
        if idx < total_points:
            dense[idx, 0] = dx
            dense[idx, 1] = dy
    start = 0
    for end in contour_ends:
        _iup_contour(dense, sparse, points, start, end + 1)
        start = end + 1
    # Phantom points past the outline: referenced values stay, others zero.
    return dense


def _iup_contour(dense, sparse, points, lo, hi):
    """Fill untouched points of one contour, indices [lo, hi), in place."""
    refs = [i for i in range(lo, hi) if i in sparse]
    if not refs:
        dense[lo:hi] = 0.0
        return
    if len(refs) == hi - lo:
        return
    for r, i1 in enumerate(refs):
        i2 = refs[(r + 1) % len(refs)]
        if i1 < i2:
            gap = np.arange(i1 + 1, i2)
        else:  # cyclic wrap through the contour start
            gap = np.concatenate([np.arange(i1 + 1, hi), np.arange(lo, i2)])
        if gap.size == 0:
            continue
        for axis in (0, 1):
            dense[gap, axis] = _iup_run(dense, points, gap, i1, i2, axis)


def _iup_run(dense, points, gap, ref1, ref2, axis):
    x1 = points[ref1, axis]
    x2 = points[ref2, axis]
    d1 = dense[ref1, axis]
    d2 = dense[ref2, axis]
    if x1 == x2:
        return np.full(gap.size, d1 if d1 == d2 else 0.0)
    if x1 > x2:
        x1, x2 = x2, x1
        d1, d2 = d2, d1
    scale = (d2 - d1) / (x2 - x1)
    x = points[gap, axis]
    interp = d1 + (x - x1) * scale
    return np.where(x <= x1, d1, np.where(x >= x2, d2, interp))
