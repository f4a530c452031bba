"""Exact quadratic-to-cubic outline conversion as a sparse linear map.

Materializing implied on-curve midpoints and elevating quadratic (or line)
segments to cubics are both linear in the original point coordinates, so
the whole conversion is a matrix E with at most two nonzero entries per
row. Applying E to the default outline and to every delta set makes
conversion commute with interpolation exactly.

Closed cubic contours are stored wrap-style: a contour with S segments
keeps 3*S points [a0 c0 c0' a1 c1 c1' ...]; segment i is
(p[3i], p[3i+1], p[3i+2], p[3(i+1) mod 3S]).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateContour


@dataclass
class Elevation:
    """Sparse linear map from file-order quadratic points to cubic points."""

    idx: np.ndarray  # (kc, 2) int32, source point indices
    w: np.ndarray  # (kc, 2) float64, source point weights
    contours: list  # (start, count, closed) over cubic outline points
    n_source: int

    def apply(self, values):
        """Map (..., n_source, 2) arrays into cubic space."""
        gathered = np.take(values, self.idx, axis=-2)  # (..., kc, 2, 2)
        return (gathered * self.w[:, :, None]).sum(axis=-2)

    def as_matrix(self):
        """Dense (kc, n_source) matrix; for tests and inspection."""
        m = np.zeros((len(self.idx), self.n_source))
        rows = np.arange(len(self.idx))
        for slot in (0, 1):
            np.add.at(m, (rows, self.idx[:, slot]), self.w[:, slot])
        return m


def _mix(terms_a, wa, terms_b, wb):
    """Weighted combination of two (index, weight) term tuples."""
    acc = {}
    for i, w in terms_a:
        acc[i] = acc.get(i, 0.0) + wa * w
    for i, w in terms_b:
        acc[i] = acc.get(i, 0.0) + wb * w
    terms = tuple(sorted(acc.items()))
    if len(terms) > 2:
        raise AssertionError("elevation row with more than two source points")
    return terms


def elevate_outline(points, on_curve, contour_ends, n_phantom=2):
    """Build the conversion map for one glyph.

    points/on_curve/contour_ends describe the quadratic outline; n_phantom
    phantom points sit after the outline in the source index space and pass
    through unchanged at the end of the cubic index space.
    """
    kq = len(points)
    rows = []  # list of term tuples, one per cubic outline point
    contours = []
    lo = 0
    for ci, end in enumerate(contour_ends):
        hi = end + 1
        if hi - lo < 2:
            warnings.warn(
                f"dropping contour {ci} with {hi - lo} point(s)", DegenerateContour
            )
            lo = hi
            continue
        seg_rows = _elevate_contour(points, on_curve, lo, hi)
        contours.append((len(rows), len(seg_rows), True))
        rows.extend(seg_rows)
        lo = hi

    for j in range(n_phantom):
        rows.append(((kq + j, 1.0),))

    kc = len(rows)
    idx = np.zeros((kc, 2), dtype=np.int32)
    w = np.zeros((kc, 2))
    for r, terms in enumerate(rows):
        for slot, (i, weight) in enumerate(terms):
            idx[r, slot] = i
            w[r, slot] = weight
        if len(terms) == 1:
            idx[r, 1] = terms[0][0]  # valid index, zero weight
    return Elevation(idx=idx, w=w, contours=contours, n_source=kq + n_phantom)


def _elevate_contour(points, on_curve, lo, hi):
    """Emit wrap-style cubic rows for one closed quadratic contour."""
    ring = list(range(lo, hi))
    anchors = [i for i in ring if on_curve[i]]

    expanded = []  # (is_anchor, terms)
    if anchors:
        f = ring.index(anchors[0])
        ring = ring[f:] + ring[:f]
        for pos, i in enumerate(ring):
            prev = ring[pos - 1]
            if not on_curve[i] and not on_curve[prev] and pos > 0:
                expanded.append((True, _mix(((prev, 1.0),), 0.5, ((i, 1.0),), 0.5)))
            expanded.append((bool(on_curve[i]), ((i, 1.0),)))
        # wrap pair: ring[-1] -> ring[0]; ring[0] is on-curve, no midpoint
    else:
        # Off-curve-only contour: every adjacent pair implies an anchor.
        for pos, i in enumerate(ring):
            prev = ring[pos - 1]
            expanded.append((True, _mix(((prev, 1.0),), 0.5, ((i, 1.0),), 0.5)))
            expanded.append((False, ((i, 1.0),)))

    n = len(expanded)
    rows = []
    pos = 0
    while pos < n:
        is_anchor, a_terms = expanded[pos]
        assert is_anchor
        nxt_anchor, nxt_terms = expanded[(pos + 1) % n]
        if nxt_anchor:
            b_terms = nxt_terms
            rows.append(a_terms)
            rows.append(_mix(a_terms, 2.0 / 3.0, b_terms, 1.0 / 3.0))
            rows.append(_mix(a_terms, 1.0 / 3.0, b_terms, 2.0 / 3.0))
            pos += 1
        else:
            q_terms = nxt_terms
            b_terms = expanded[(pos + 2) % n][1]
            rows.append(a_terms)
            rows.append(_mix(a_terms, 1.0 / 3.0, q_terms, 2.0 / 3.0))
            rows.append(_mix(b_terms, 1.0 / 3.0, q_terms, 2.0 / 3.0))
            pos += 2
    return rows
