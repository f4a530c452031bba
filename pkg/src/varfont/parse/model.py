"""Unpacked font model and the parse pipeline that builds it.

parse_font turns the compressed binary tables into fully explicit data:
shared tuples resolved, point numbers expanded, IUP applied, composites
flattened, contour winding normalized, and quadratic outlines elevated to
cubic. The file-order quadratic unpacking survives on each glyph (`raw`)
for dump tooling and oracle comparisons in integer font units.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import Malformed, MissingTable, UnknownGlyph
from . import glyf as glyf_mod
from . import tables
from .elevate import elevate_outline
from .gvar import parse_gvar
from .iup import apply_iup
from .orient import orientation_permutation
from .sfnt import read_table_directory, table_bytes

MAX_COMPONENT_DEPTH = 5
N_PHANTOM = 2  # left / right sidebearing points kept per glyph


@dataclass(frozen=True)
class AxisDescriptor:
    """One design axis: tag, design-space range, optional avar remap."""

    tag: str
    s_min: float
    s_default: float
    s_max: float
    avar_map: tuple = ()

    def __post_init__(self):
        if not self.s_min <= self.s_default <= self.s_max:
            raise Malformed(
                f"axis {self.tag}: min {self.s_min} <= default {self.s_default} "
                f"<= max {self.s_max} violated",
                table="fvar",
            )
        if self.avar_map:
            froms = [p[0] for p in self.avar_map]
            tos = [p[1] for p in self.avar_map]
            required = {-1.0, 0.0, 1.0}
            if not required <= set(froms):
                raise Malformed(
                    f"axis {self.tag}: avar map lacks -1/0/1 anchors", table="avar"
                )
            if any(b <= a for a, b in zip(froms, froms[1:])):
                raise Malformed(
                    f"axis {self.tag}: avar 'from' not strictly increasing",
                    table="avar",
                )
            if any(b < a for a, b in zip(tos, tos[1:])):
                raise Malformed(
                    f"axis {self.tag}: avar 'to' decreasing", table="avar"
                )


class Region:
    """Active box of one delta set: per-axis (start, peak, end) triples.

    Axes without a triple contribute a constant factor of 1. Triples are
    normalized at construction per the variation-store rules: a zero peak,
    an out-of-order triple, or a span that strictly crosses zero all
    deactivate the axis.
    """

    __slots__ = ("triples",)

    def __init__(self, triples):
        self.triples = dict(triples)

    @classmethod
    def from_tuple(cls, peak, start, end):
        triples = {}
        for i, p in enumerate(peak):
            if p == 0.0:
                continue
            if start is None:
                s, e = min(0.0, p), max(0.0, p)
            else:
                s, e = start[i], end[i]
            if s > p or p > e:
                continue
            if s < 0.0 and e > 0.0:
                continue
            triples[i] = (s, p, e)
        return cls(triples)

    def __eq__(self, other):
        return isinstance(other, Region) and self.triples == other.triples

    def __repr__(self):
        inner = ", ".join(
            f"{i}:({s:g},{p:g},{e:g})" for i, (s, p, e) in sorted(self.triples.items())
        )
        return f"Region({inner})"


@dataclass
class RawQuadGlyph:
    """File-order quadratic unpacking: the oracle-comparable representation."""

    points: np.ndarray  # (kq + 2, 2) default points incl. phantoms
    on_curve: np.ndarray  # (kq,) bool
    contour_ends: list
    deltas: np.ndarray  # (m, kq + 2, 2) dense


@dataclass
class GlyphVariation:
    """Cubic default outline plus dense delta sets and their regions."""

    default_points: np.ndarray  # (k, 2) cubic points, 2 phantoms at the end
    contours: list  # (start, count, closed) over outline points
    deltas: np.ndarray  # (m, k, 2)
    regions: list
    raw: RawQuadGlyph = None

    @property
    def n_points(self):
        return len(self.default_points)

    @property
    def n_outline_points(self):
        return len(self.default_points) - N_PHANTOM

    @property
    def phantom_indices(self):
        k = len(self.default_points)
        return k - 2, k - 1

    @cached_property
    def segments(self):
        """Control-point index quadruples of every cubic segment."""
        segs = []
        for start, count, closed in self.contours:
            n_seg = count // 3 if closed else (count - 1) // 3
            for i in range(n_seg):
                a = start + 3 * i
                d = start + (3 * (i + 1)) % count if closed else a + 3
                segs.append((a, a + 1, a + 2, d))
        return segs

    def region_arrays(self, n_axes):
        """(start, peak, end) arrays of shape (m, n); inactive axes (0,0,0)."""
        m = len(self.regions)
        start = np.zeros((m, n_axes))
        peak = np.zeros((m, n_axes))
        end = np.zeros((m, n_axes))
        for j, region in enumerate(self.regions):
            for i, (s, p, e) in region.triples.items():
                start[j, i] = s
                peak[j, i] = p
                end[j, i] = e
        return start, peak, end


@dataclass
class FontModel:
    """Fully unpacked variable font. Immutable by convention; share freely."""

    units_per_em: int
    axes: list
    glyphs: dict
    char_map: dict
    advance_widths: dict

    @property
    def n_axes(self):
        return len(self.axes)

    def axis_index(self, tag):
        for i, axis in enumerate(self.axes):
            if axis.tag == tag:
                return i
        raise KeyError(f"no axis {tag!r}")

    def glyph(self, glyph_id):
        try:
            return self.glyphs[glyph_id]
        except KeyError:
            raise UnknownGlyph(glyph_id) from None

    def glyph_ids_for_text(self, text):
        missing = [ord(c) for c in text if ord(c) not in self.char_map]
        if missing:
            from ..errors import MissingGlyph

            raise MissingGlyph(missing)
        return [self.char_map[ord(c)] for c in text]


def parse_font(data):
    """Decode a TrueType-flavored variable font into a FontModel.

    Deterministic: identical bytes produce structurally identical models.
    """
    data = bytes(data)
    directory = read_table_directory(data)

    for tag in ("fvar", "gvar"):
        if tag not in directory:
            raise MissingTable(tag)
    if "glyf" not in directory or "loca" not in directory:
        raise (
            MissingTable("glyf")
            if "glyf" not in directory
            else MissingTable("loca")
        )
    for tag in ("head", "maxp", "hhea", "hmtx"):
        if tag not in directory:
            raise MissingTable(tag)

    units_per_em, loc_fmt = tables.parse_head(table_bytes(data, directory, "head"))
    num_glyphs = tables.parse_maxp(table_bytes(data, directory, "maxp"))
    num_h_metrics = tables.parse_hhea(table_bytes(data, directory, "hhea"))
    advances, lsbs = tables.parse_hmtx(
        table_bytes(data, directory, "hmtx"), num_h_metrics, num_glyphs
    )
    loca = tables.parse_loca(
        table_bytes(data, directory, "loca"), num_glyphs, loc_fmt
    )

    fvar_axes = tables.parse_fvar(table_bytes(data, directory, "fvar"))
    avar_maps = [()] * len(fvar_axes)
    if "avar" in directory:
        raw_maps = tables.parse_avar(
            table_bytes(data, directory, "avar"), len(fvar_axes)
        )
        avar_maps = [tuple(m) for m in raw_maps]
    axes = [
        AxisDescriptor(tag, lo, default, hi, avar_map)
        for (tag, lo, default, hi), avar_map in zip(fvar_axes, avar_maps)
    ]

    glyf_data = table_bytes(data, directory, "glyf")
    outlines = []
    for gid in range(num_glyphs):
        lo, hi = loca[gid], loca[gid + 1]
        if hi < lo or hi > len(glyf_data):
            raise Malformed(f"loca range for glyph {gid} invalid", "loca", 4 * gid)
        outlines.append(glyf_mod.parse_glyph(glyf_data, lo, hi, gid))

    point_counts = []
    for outline in outlines:
        if isinstance(outline, glyf_mod.CompositeOutline):
            point_counts.append(len(outline.components) + 4)
        else:
            point_counts.append(len(outline.points) + 4)

    variations = parse_gvar(
        table_bytes(data, directory, "gvar"), len(axes), point_counts
    )

    char_map = {}
    if "cmap" in directory:
        raw_cmap = tables.parse_cmap(table_bytes(data, directory, "cmap"))
        char_map = {cp: gid for cp, gid in raw_cmap.items() if gid < num_glyphs}

    builder = _GlyphBuilder(outlines, variations, advances, lsbs, len(axes))
    glyphs = {gid: builder.build(gid) for gid in range(num_glyphs)}

    return FontModel(
        units_per_em=units_per_em,
        axes=axes,
        glyphs=glyphs,
        char_map=char_map,
        advance_widths={gid: float(advances[gid]) for gid in range(num_glyphs)},
    )


class _GlyphBuilder:
    """Per-glyph assembly: dense deltas, flattening, winding, elevation."""

    def __init__(self, outlines, variations, advances, lsbs, n_axes):
        self.outlines = outlines
        self.variations = variations
        self.advances = advances
        self.lsbs = lsbs
        self.n_axes = n_axes
        self._raw_cache = {}
        self._building = set()

    def build(self, gid):
        raw, regions = self.flat_raw(gid)
        perm = orientation_permutation(
            raw.points[: len(raw.on_curve)], raw.on_curve, raw.contour_ends, N_PHANTOM
        )
        points = raw.points[perm]
        on_curve = raw.on_curve[perm[: len(raw.on_curve)]]
        deltas = raw.deltas[:, perm, :] if len(raw.deltas) else raw.deltas
        elevation = elevate_outline(
            points[: len(on_curve)], on_curve, raw.contour_ends, N_PHANTOM
        )
        cubic_points = elevation.apply(points)
        if len(deltas):
            cubic_deltas = elevation.apply(deltas)
        else:
            cubic_deltas = np.zeros((0, len(cubic_points), 2))
        return GlyphVariation(
            default_points=cubic_points,
            contours=elevation.contours,
            deltas=cubic_deltas,
            regions=list(regions),
            raw=raw,
        )

    def flat_raw(self, gid):
        """File-order quadratic record with composites flattened."""
        if gid in self._raw_cache:
            return self._raw_cache[gid]
        if gid in self._building or len(self._building) > MAX_COMPONENT_DEPTH:
            raise Malformed(
                f"composite glyph nesting too deep or cyclic at glyph {gid}", "glyf"
            )
        self._building.add(gid)
        try:
            outline = self.outlines[gid]
            if isinstance(outline, glyf_mod.CompositeOutline):
                result = self._flatten_composite(gid, outline)
            else:
                result = self._simple_raw(gid, outline)
        finally:
            self._building.discard(gid)
        self._raw_cache[gid] = result
        return result

    def _phantoms(self, gid, x_min):
        left = float(x_min - self.lsbs[gid])
        return np.array([[left, 0.0], [left + self.advances[gid], 0.0]])

    def _simple_raw(self, gid, outline):
        kq = len(outline.points)
        phantoms = self._phantoms(gid, outline.x_min)
        points = np.vstack([outline.points, phantoms]) if kq else phantoms.copy()
        regions = []
        dense_sets = []
        for tup in self.variations[gid]:
            regions.append(Region.from_tuple(tup.peak, tup.start, tup.end))
            if tup.point_numbers is None:
                dense = np.asarray(tup.deltas, dtype=np.float64)[: kq + 4]
                dense = np.vstack(
                    [dense, np.zeros((kq + 4 - len(dense), 2))]
                ) if len(dense) < kq + 4 else dense
            else:
                sparse = dict(zip(tup.point_numbers, tup.deltas))
                dense = apply_iup(
                    sparse, outline.points, outline.contour_ends, kq + 4
                )
            dense_sets.append(dense[: kq + N_PHANTOM])
        deltas = (
            np.stack(dense_sets)
            if dense_sets
            else np.zeros((0, kq + N_PHANTOM, 2))
        )
        raw = RawQuadGlyph(
            points=points,
            on_curve=outline.on_curve.copy(),
            contour_ends=list(outline.contour_ends),
            deltas=deltas,
        )
        return raw, regions

    def _flatten_composite(self, gid, outline):
        child_points = []
        child_flags = []
        contour_ends = []
        spans = []  # (first point, count) per component in flattened space
        sets = []  # (Region, dense rows over flattened outline points + phantoms)
        base = 0
        for comp in outline.components:
            child_raw, child_regions = self.flat_raw(comp.glyph_id)
            ck = len(child_raw.on_curve)
            pts = child_raw.points[:ck] @ comp.transform + np.array(
                [comp.dx, comp.dy]
            )
            child_points.append(pts)
            child_flags.append(child_raw.on_curve)
            contour_ends.extend(base + e for e in child_raw.contour_ends)
            spans.append((base, ck))
            for region, dset in zip(child_regions, child_raw.deltas):
                rows = dset[:ck] @ comp.transform
                sets.append((region, base, rows))
            base += ck

        kq = base
        phantoms = self._phantoms(gid, outline.x_min)
        points = (
            np.vstack(child_points + [phantoms]) if child_points else phantoms.copy()
        )
        on_curve = (
            np.concatenate(child_flags) if child_flags else np.zeros(0, dtype=bool)
        )

        regions = []
        dense_sets = []
        for region, start, rows in sets:
            dense = np.zeros((kq + N_PHANTOM, 2))
            dense[start : start + len(rows)] = rows
            regions.append(region)
            dense_sets.append(dense)

        # The composite's own tuples displace whole components and phantoms.
        n_slots = len(outline.components) + 4
        for tup in self.variations[gid]:
            dense = np.zeros((kq + N_PHANTOM, 2))
            if tup.point_numbers is None:
                slot_deltas = list(tup.deltas)[:n_slots]
            else:
                slot_deltas = [(0.0, 0.0)] * n_slots
                for num, d in zip(tup.point_numbers, tup.deltas):
                    if num < n_slots:
                        slot_deltas[num] = d
            for ci, (start, count) in enumerate(spans):
                dx, dy = slot_deltas[ci] if ci < len(slot_deltas) else (0.0, 0.0)
                dense[start : start + count] = (dx, dy)
            for pj in range(N_PHANTOM):
                slot = len(outline.components) + pj
                if slot < len(slot_deltas):
                    dense[kq + pj] = slot_deltas[slot]
            regions.append(Region.from_tuple(tup.peak, tup.start, tup.end))
            dense_sets.append(dense)

        deltas = (
            np.stack(dense_sets) if dense_sets else np.zeros((0, kq + N_PHANTOM, 2))
        )
        raw = RawQuadGlyph(
            points=points,
            on_curve=on_curve,
            contour_ends=contour_ends,
            deltas=deltas,
        )
        return raw, regions
