"""Analytic Jacobians of interpolation and layout with respect to axis
weights.

The support tents are piecewise linear, so derivatives are piecewise
constant with jumps at region breakpoints; on breakpoints the right-hand
derivative is used throughout (consistent with the half-open support
intervals). Jacobians are dense: fonts keep m and n small.

Row layout: point p occupies rows (2p, 2p+1) for (x, y); word Jacobians
stack glyphs in order and use column block j*n:(j+1)*n for glyph j's
weights.
"""

import numpy as np

from .interp import as_word_theta, bernstein3
from .errors import BadSegment


def d_support(triple, w_i):
    """One-sided derivative of the support tent at w_i: right-hand
    everywhere, except at the upper domain edge w_i = 1 where only the
    left-hand derivative exists (otherwise regions peaking at 1 would
    report zero sensitivity at the box boundary and trap the solvers)."""
    start, peak, end = triple
    if peak == 0.0:
        return 0.0
    if w_i == 1.0:
        if start < w_i <= peak:
            return 1.0 / (peak - start)
        if peak < w_i <= end:
            return -1.0 / (end - peak)
        return 0.0
    if w_i < start or w_i >= end:
        return 0.0
    if w_i < peak:
        return 1.0 / (peak - start)
    return -1.0 / (end - peak)


def d_region_scalar(region, w, n_axes):
    """Gradient of one scaling factor: product rule over the axis tents."""
    from .interp import support_scalar

    w = np.asarray(w, dtype=np.float64)
    grad = np.zeros(n_axes)
    items = list(region.triples.items())
    phis = {i: support_scalar(t, w[i]) for i, t in items}
    for i, triple in items:
        slope = d_support(triple, w[i])
        if slope == 0.0:
            continue
        others = 1.0
        for i2, _ in items:
            if i2 != i:
                others *= phis[i2]
        grad[i] = slope * others
    return grad


def _phi_dphi_arrays(start, peak, end, w):
    """(phi, dphi) of shape (m, n) for stacked region arrays."""
    active = peak != 0.0
    up_den = np.where(peak > start, peak - start, 1.0)
    down_den = np.where(end > peak, end - peak, 1.0)
    wb = np.broadcast_to(w, start.shape)
    up = active & (wb >= start) & (wb < peak)
    down = active & (wb > peak) & (wb < end)
    at_peak = active & (wb == peak)
    phi = np.where(
        ~active,
        1.0,
        np.where(
            at_peak,
            1.0,
            np.where(up, (wb - start) / up_den, np.where(down, (end - wb) / down_den, 0.0)),
        ),
    )
    at_top = wb == 1.0  # upper domain edge: left-hand derivative
    d_up = active & np.where(
        at_top, (wb > start) & (wb <= peak), (wb >= start) & (wb < peak)
    )
    d_down = active & np.where(
        at_top, (wb > peak) & (wb <= end), (wb >= peak) & (wb < end)
    )
    dphi = np.where(d_up, 1.0 / up_den, np.where(d_down, -1.0 / down_den, 0.0))
    return phi, dphi


def gamma_jacobian(glyph, w, n_axes):
    """(m, n) gradients of all scaling factors of a glyph."""
    from .interp import _region_arrays

    start, peak, end = _region_arrays(glyph, n_axes)
    w = np.asarray(w, dtype=np.float64)
    phi, dphi = _phi_dphi_arrays(start, peak, end, w)
    m, n = phi.shape
    grads = np.zeros((m, n))
    for j in range(m):
        for i in range(n):
            if dphi[j, i] == 0.0:
                continue
            others = 1.0
            for i2 in range(n):
                if i2 != i:
                    others *= phi[j, i2]
            grads[j, i] = dphi[j, i] * others
    return grads


def glyph_jacobian(font, glyph_id, w):
    """(2k, n) Jacobian of one glyph's points (phantoms included)."""
    glyph = font.glyph(glyph_id)
    n = font.n_axes
    grads = gamma_jacobian(glyph, w, n)
    if len(grads) == 0:
        return np.zeros((2 * glyph.n_points, n))
    jac = np.einsum("jkc,jn->kcn", glyph.deltas, grads)
    return jac.reshape(2 * glyph.n_points, n)


def word_jacobian(font, glyph_ids, theta):
    """(2K, n*l) Jacobian of composed word points.

    Diagonal blocks: glyph Jacobian minus its left-phantom rows; blocks
    below the diagonal: accumulated advance gradients of earlier glyphs;
    blocks above: zero (layout is causal left to right).
    """
    l = len(glyph_ids)
    n = font.n_axes
    theta = as_word_theta(theta, l, n)
    per = [glyph_jacobian(font, gid, theta[j]) for j, gid in enumerate(glyph_ids)]
    ks = [font.glyph(gid).n_points for gid in glyph_ids]
    total = sum(ks)
    out = np.zeros((2 * total, n * l))
    row = 0
    for j in range(l):
        k = ks[j]
        jg = per[j]
        left = jg[2 * (k - 2) : 2 * (k - 2) + 2]  # left phantom rows
        right = jg[2 * (k - 1) : 2 * (k - 1) + 2]
        out[row : row + 2 * k, j * n : (j + 1) * n] = jg - np.tile(left, (k, 1))
        for z in range(j):
            kz = ks[z]
            jz = per[z]
            adv = (
                jz[2 * (kz - 1) : 2 * (kz - 1) + 2]
                - jz[2 * (kz - 2) : 2 * (kz - 2) + 2]
            )
            out[row : row + 2 * k, z * n : (z + 1) * n] = np.tile(adv, (k, 1))
        row += 2 * k
        del right
    return out


def curve_point_jacobian(jacobian, segments, segment, t):
    """(2, dim) Jacobian of the curve point at (segment, t); t is treated
    as fixed (handles are re-projected between solves, not differentiated
    through)."""
    if not 0 <= segment < len(segments):
        raise BadSegment(f"segment {segment} of {len(segments)}")
    weights = bernstein3(t)
    i0, i1, i2, i3 = segments[segment]
    out = np.zeros((2, jacobian.shape[1]))
    for wgt, idx in zip(weights, (i0, i1, i2, i3)):
        out += wgt * jacobian[2 * idx : 2 * idx + 2, :]
    return out


def finite_difference_word_jacobian(font, glyph_ids, theta, h=1e-5):
    """Central-difference Jacobian of composed word points."""
    from .interp import layout_word

    l = len(glyph_ids)
    n = font.n_axes
    theta = as_word_theta(theta, l, n)
    flat = theta.reshape(-1).copy()
    cols = []
    for i in range(flat.size):
        plus = flat.copy()
        minus = flat.copy()
        plus[i] += h
        minus[i] -= h
        lp = layout_word(font, glyph_ids, plus).points.reshape(-1)
        lm = layout_word(font, glyph_ids, minus).points.reshape(-1)
        cols.append((lp - lm) / (2.0 * h))
    return np.column_stack(cols)


def region_breakpoints(font, glyph_ids):
    """Per-axis sorted breakpoint values over the given glyphs' regions."""
    points = [set((-1.0, 0.0, 1.0)) for _ in range(font.n_axes)]
    for gid in glyph_ids:
        for region in font.glyph(gid).regions:
            for i, (s, p, e) in region.triples.items():
                points[i].update((s, p, e))
    return [sorted(v) for v in points]


def gradient_check(font, glyph_ids, n_samples=100, seed=0, h=1e-5, margin=1e-4):
    """Compare analytic and central-difference word Jacobians at random
    interior weights (samples near region breakpoints are rejected).

    Returns (records, worst, per_axis): per-sample (theta, abs_err, rel_err)
    tuples, the overall max relative error, and the max relative error per
    flattened axis column.
    """
    rng = np.random.default_rng(seed)
    l = len(glyph_ids)
    n = font.n_axes
    breaks = region_breakpoints(font, glyph_ids)
    records = []
    worst = 0.0
    per_axis = np.zeros(l * n)
    attempts = 0
    while len(records) < n_samples and attempts < 100 * max(n_samples, 1):
        attempts += 1
        theta = rng.uniform(-0.95, 0.95, size=(l, n))
        if any(
            abs(theta[j, i] - b) < margin
            for j in range(l)
            for i in range(n)
            for b in breaks[i]
        ):
            continue
        ja = word_jacobian(font, glyph_ids, theta)
        jf = finite_difference_word_jacobian(font, glyph_ids, theta, h)
        abs_err = float(np.max(np.abs(ja - jf))) if ja.size else 0.0
        scale = max(1.0, float(np.max(np.abs(jf))) if jf.size else 0.0)
        rel = abs_err / scale
        worst = max(worst, rel)
        if ja.size:
            col_err = np.abs(ja - jf).max(axis=0) / scale
            per_axis = np.maximum(per_axis, col_err)
        records.append((theta, abs_err, rel))
    return records, worst, per_axis
