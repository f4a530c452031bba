"""Contour orientation normalization.

Outer contours are forced counter-clockwise and holes clockwise (signed
area at the default instance, y-up). A hole is a contour contained in an
odd number of other contours. The resulting per-glyph permutation is
applied identically to the default points, flags and every delta set so
the variation data stays aligned.
"""

import numpy as np

_T = np.linspace(0.0, 1.0, 9)[1:]  # samples past the segment start


def quad_contour_polyline(points, on_curve, lo, hi):
    """Sample one quadratic contour into a closed polyline (n, 2).

    Line segments are treated as quadratics with the control at the chord
    midpoint, which parameterizes the identical straight line, so all
    segments batch into one vectorized evaluation.
    """
    ring = list(range(lo, hi))
    anchors = [i for i in ring if on_curve[i]]

    if anchors:
        f = ring.index(anchors[0])
        ring = ring[f:] + ring[:f]
        expanded = []
        for pos, i in enumerate(ring):
            prev = ring[pos - 1]
            if pos > 0 and not on_curve[i] and not on_curve[prev]:
                expanded.append((True, 0.5 * (points[prev] + points[i])))
            expanded.append((bool(on_curve[i]), points[i]))
    else:
        expanded = []
        for pos, i in enumerate(ring):
            prev = ring[pos - 1]
            expanded.append((True, 0.5 * (points[prev] + points[i])))
            expanded.append((False, points[i]))

    n = len(expanded)
    seg_a = []
    seg_q = []
    seg_b = []
    pos = 0
    while pos < n:
        _, a = expanded[pos]
        nxt_on, nxt = expanded[(pos + 1) % n]
        if nxt_on:
            seg_a.append(a)
            seg_q.append(0.5 * (a + nxt))
            seg_b.append(nxt)
            pos += 1
        else:
            b = expanded[(pos + 2) % n][1]
            seg_a.append(a)
            seg_q.append(nxt)
            seg_b.append(b)
            pos += 2
    a = np.asarray(seg_a)[:, None, :]
    q = np.asarray(seg_q)[:, None, :]
    b = np.asarray(seg_b)[:, None, :]
    t = _T[None, :, None]
    one = 1.0 - t
    samples = one * one * a + 2.0 * one * t * q + t * t * b
    first = expanded[0][1]
    return np.vstack([first[None, :], samples.reshape(-1, 2)])


def signed_area(polyline):
    x = polyline[:, 0]
    y = polyline[:, 1]
    x2 = np.roll(x, -1)
    y2 = np.roll(y, -1)
    return 0.5 * float(np.sum(x * y2 - x2 * y))


def point_in_polyline(p, polyline):
    """Even-odd (crossing parity) point-in-polygon test."""
    x, y = p
    vx = polyline[:, 0]
    vy = polyline[:, 1]
    wx = np.roll(vx, -1)
    wy = np.roll(vy, -1)
    crosses = (vy > y) != (wy > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (y - vy) / (wy - vy)
        xi = vx + t * (wx - vx)
    hits = crosses & (xi > x)
    return bool(np.count_nonzero(hits) % 2)


def points_in_polyline(points, polyline, edges=None):
    """Vectorized even-odd test for many points."""
    x = points[:, 0][:, None]
    y = points[:, 1][:, None]
    if edges is None:
        edges = _polyline_edges(polyline)
    vx, vy, wx, wy = (e[None, :] for e in edges)
    crosses = (vy > y) != (wy > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (y - vy) / (wy - vy)
        xi = vx + t * (wx - vx)
    return (np.count_nonzero(crosses & (xi > x), axis=1) % 2).astype(bool)


def _polyline_edges(polyline):
    return (
        polyline[:, 0],
        polyline[:, 1],
        np.roll(polyline[:, 0], -1),
        np.roll(polyline[:, 1], -1),
    )


def orientation_permutation(points, on_curve, contour_ends, n_phantom=2):
    """Permutation over kq + n_phantom indices producing canonical winding."""
    kq = len(points)
    perm = np.arange(kq + n_phantom)
    if not contour_ends:
        return perm
    bounds = []
    lo = 0
    for end in contour_ends:
        bounds.append((lo, end + 1))
        lo = end + 1
    polys = [
        quad_contour_polyline(points, on_curve, lo, hi) if hi - lo >= 2 else None
        for lo, hi in bounds
    ]
    boxes = [
        (p[:, 0].min(), p[:, 1].min(), p[:, 0].max(), p[:, 1].max())
        if p is not None
        else None
        for p in polys
    ]
    edge_cache = {}
    for ci, (lo, hi) in enumerate(bounds):
        if polys[ci] is None:
            continue
        area = signed_area(polys[ci])
        if area == 0.0:
            continue
        # Containment depth per sample point, then a majority vote: touching
        # or partially overlapping outer contours (horns, accents grown into
        # stems) poke outside their neighbor, so most of their samples stay
        # outside, while a true hole keeps every sample inside its parent.
        votes = polys[ci][:: max(1, len(polys[ci]) // 64)]
        parity = np.zeros(len(votes), dtype=np.int64)
        for cj in range(len(bounds)):
            if cj == ci or polys[cj] is None:
                continue
            ax0, ay0, ax1, ay1 = boxes[ci]
            bx0, by0, bx1, by1 = boxes[cj]
            if ax1 < bx0 or bx1 < ax0 or ay1 < by0 or by1 < ay0:
                continue
            if cj not in edge_cache:
                edge_cache[cj] = _polyline_edges(polys[cj])
            parity += points_in_polyline(votes, polys[cj], edge_cache[cj]).astype(
                np.int64
            )
        is_hole = np.count_nonzero(parity % 2 == 1) * 2 > len(parity)
        want_ccw = not is_hole
        if (area > 0.0) != want_ccw:
            perm[lo:hi] = np.concatenate([[lo], np.arange(hi - 1, lo, -1)])
    return perm
