"""Axis-weight interpolation: normalization, support functions, scaling
factors, glyph instances and word layout.

Normalized weights w in [-1, 1]^n (after the axis remap, when present) are
the canonical coordinates; every evaluation and every optimization in this
package runs on them. Design-space values appear only at the API edges.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadSegment,
    DegenerateAxis,
    EmptyWord,
    NonInvertibleSegment,
)


def clamp_weights(w):
    """Componentwise clamp to [-1, 1]. Returns (clamped copy, changed?)."""
    arr = np.asarray(w, dtype=np.float64)
    clamped = np.clip(arr, -1.0, 1.0)
    return clamped, bool(np.any(clamped != arr))


def normalize_axis(axis, s):
    """Design value -> normalized coordinate in [-1, 1].

    Out-of-range input is clamped. The piecewise-linear map sends
    {min, default, max} to {-1, 0, 1}; the axis remap (avar), when present,
    is applied on top.
    """
    if axis.s_min == axis.s_default == axis.s_max:
        if s != axis.s_default:
            raise DegenerateAxis(
                f"axis {axis.tag} is a single point at {axis.s_default}"
            )
        return 0.0
    v = min(max(float(s), axis.s_min), axis.s_max)
    if v == axis.s_default:
        w = 0.0
    elif v < axis.s_default:
        w = (v - axis.s_default) / (axis.s_default - axis.s_min)
    else:
        w = (v - axis.s_default) / (axis.s_max - axis.s_default)
    return _remap(axis.avar_map, w)


def _remap(pairs, w):
    if not pairs:
        return w
    for frm, to in pairs:
        if w == frm:
            return to
    for (a, va), (b, vb) in zip(pairs, pairs[1:]):
        if a < w < b:
            return va + (vb - va) * (w - a) / (b - a)
    return w  # outside the mapped range; anchors make this unreachable


def denormalize_axis(axis, w):
    """Normalized coordinate -> design value (inverse of normalize_axis).

    On a flat remap segment the preimage is an interval; its midpoint is
    returned and NonInvertibleSegment is emitted as a warning.
    """
    w = min(max(float(w), -1.0), 1.0)
    v = _inverse_remap(axis.avar_map, w)
    if v == 0.0:
        return axis.s_default
    if v < 0.0:
        return axis.s_default + v * (axis.s_default - axis.s_min)
    return axis.s_default + v * (axis.s_max - axis.s_default)


def _inverse_remap(pairs, w):
    if not pairs:
        return w
    tos = [to for _, to in pairs]
    # Flat segment: several consecutive 'from' values share this 'to'.
    matches = [frm for frm, to in pairs if to == w]
    if len(matches) > 1:
        warnings.warn(
            f"remap not invertible at {w}; using preimage midpoint",
            NonInvertibleSegment,
        )
        return 0.5 * (matches[0] + matches[-1])
    if len(matches) == 1:
        return matches[0]
    for (a, va), (b, vb) in zip(pairs, pairs[1:]):
        if va < w < vb:
            return a + (b - a) * (w - va) / (vb - va)
    return w


def support_scalar(triple, w_i):
    """Piecewise-linear tent of one axis: 0 outside [start, end), ramps to
    1 at the peak. A zero peak means the axis does not participate (1), and
    the value at the peak is 1 even for degenerate ramps."""
    start, peak, end = triple
    if peak == 0.0:
        return 1.0
    if w_i == peak:
        return 1.0
    if w_i < start or w_i >= end:
        return 0.0
    if w_i < peak:
        return (w_i - start) / (peak - start)
    return (end - w_i) / (end - peak)


def region_scalar(region, w):
    """Scaling factor of one delta set: product of its axis tents."""
    w = np.asarray(w, dtype=np.float64)
    scalar = 1.0
    for i, triple in region.triples.items():
        scalar *= support_scalar(triple, w[i])
        if scalar == 0.0:
            break
    return scalar


def region_scalars(glyph, w, n_axes):
    """Vector of scaling factors for all m delta sets of a glyph."""
    start, peak, end = _region_arrays(glyph, n_axes)
    return _gamma_from_arrays(start, peak, end, np.asarray(w, dtype=np.float64))


def _region_arrays(glyph, n_axes):
    cached = getattr(glyph, "_region_array_cache", None)
    if cached is None or cached[0] != n_axes:
        glyph._region_array_cache = (n_axes, glyph.region_arrays(n_axes))
        cached = glyph._region_array_cache
    return cached[1]


def _gamma_from_arrays(start, peak, end, w):
    active = peak != 0.0
    up_den = np.where(peak > start, peak - start, 1.0)
    down_den = np.where(end > peak, end - peak, 1.0)
    wb = np.broadcast_to(w, start.shape)
    phi = np.where(
        ~active,
        1.0,
        np.where(
            wb == peak,
            1.0,
            np.where(
                (wb >= start) & (wb < peak),
                (wb - start) / up_den,
                np.where((wb > peak) & (wb < end), (end - wb) / down_den, 0.0),
            ),
        ),
    )
    return phi.prod(axis=1)


@dataclass
class GlyphInstance:
    """One glyph evaluated at axis weights w."""

    glyph_id: int
    points: np.ndarray  # (k, 2) interpolated, phantoms last
    gamma: np.ndarray  # (m,) scaling factors used
    contours: list
    segments: list

    @property
    def phantom_left(self):
        return self.points[-2]

    @property
    def phantom_right(self):
        return self.points[-1]


@dataclass
class WordLayout:
    """Glyph instances composed left to right via sidebearing points."""

    glyph_ids: list
    instances: list
    offsets: np.ndarray  # (l, 2) per-glyph translation
    points: np.ndarray  # (K, 2) composed points of all glyphs
    glyph_slices: list  # slice into composed arrays per glyph
    segments: list  # 4-tuples of composed point indices
    segment_glyph: list  # glyph position owning each segment
    units_per_em: int = 1000

    @property
    def advance(self):
        last = self.instances[-1]
        off = self.offsets[-1]
        return float(off[0] + last.phantom_right[0])


def interpolate_glyph(font, glyph_id, w):
    """points = default + sum_j gamma_j(w) * delta_j, phantoms included."""
    glyph = font.glyph(glyph_id)
    w, _ = clamp_weights(w)
    gamma = region_scalars(glyph, w, font.n_axes)
    points = glyph.default_points
    if len(gamma):
        points = points + np.einsum("j,jkc->kc", gamma, glyph.deltas)
    else:
        points = points.copy()
    return GlyphInstance(
        glyph_id=glyph_id,
        points=points,
        gamma=gamma,
        contours=glyph.contours,
        segments=glyph.segments,
    )


def layout_word(font, glyph_ids, theta):
    """Compose a word: glyph j is translated by the accumulated advances
    (right minus left sidebearing points) of the glyphs before it, minus
    its own left sidebearing point."""
    if len(glyph_ids) == 0:
        raise EmptyWord("word must contain at least one glyph")
    theta = as_word_theta(theta, len(glyph_ids), font.n_axes)
    instances = [
        interpolate_glyph(font, gid, theta[j]) for j, gid in enumerate(glyph_ids)
    ]
    offsets = np.zeros((len(glyph_ids), 2))
    pen = np.zeros(2)
    for j, inst in enumerate(instances):
        offsets[j] = pen - inst.phantom_left
        pen = pen + (inst.phantom_right - inst.phantom_left)
    composed = []
    slices = []
    segments = []
    segment_glyph = []
    base = 0
    for j, inst in enumerate(instances):
        composed.append(inst.points + offsets[j])
        k = len(inst.points)
        slices.append(slice(base, base + k))
        for seg in inst.segments:
            segments.append(tuple(base + i for i in seg))
            segment_glyph.append(j)
        base += k
    return WordLayout(
        glyph_ids=list(glyph_ids),
        instances=instances,
        offsets=offsets,
        points=np.vstack(composed),
        glyph_slices=slices,
        segments=segments,
        segment_glyph=segment_glyph,
        units_per_em=font.units_per_em,
    )


def as_word_theta(theta, l, n):
    """Accept (l, n) or flat (l*n,) weights; return clamped (l, n)."""
    arr = np.asarray(theta, dtype=np.float64)
    if arr.ndim == 1:
        if arr.size != l * n:
            raise ValueError(f"theta size {arr.size} != {l}*{n}")
        arr = arr.reshape(l, n)
    elif arr.shape != (l, n):
        raise ValueError(f"theta shape {arr.shape} != ({l}, {n})")
    clamped, _ = clamp_weights(arr)
    return clamped


def bernstein3(t):
    """The four cubic Bernstein weights at parameter t."""
    u = 1.0 - t
    return np.array([u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t])


def evaluate_curve(instance, segment, t):
    """Point on cubic segment `segment` at parameter t in [0, 1]."""
    if not 0 <= segment < len(instance.segments):
        raise BadSegment(f"segment {segment} of {len(instance.segments)}")
    if not 0.0 <= t <= 1.0:
        raise BadSegment(f"parameter {t} outside [0, 1]")
    idx = list(instance.segments[segment])
    return bernstein3(t) @ instance.points[idx]
