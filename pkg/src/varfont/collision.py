"""Outline sampling, penetration detection, and contact frames.

Conventions: contact normals point out of the collider (for glyph-glyph
contacts, out of the ink of the other glyph); the stored depth is
N . (p - b), so penetrating samples carry negative depth and the energy
module forms max(0, -depth). Samples exactly on a boundary do not collide.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSegment
from .interp import bernstein3

DEFAULT_DENSITY = 8


@dataclass
class Sample:
    index: int  # position in the OutlineSamples list
    glyph: int  # position of the glyph in the word
    contour: int  # contour ordinal within the whole layout
    segment: int  # global segment index in the layout
    t: float
    position: np.ndarray


@dataclass
class OutlineSamples:
    samples: list
    density: int

    def positions(self):
        return np.array([s.position for s in self.samples])

    def of_glyph(self, glyph):
        return [s for s in self.samples if s.glyph == glyph]

    def contour_loops(self, glyph=None):
        """Sample positions grouped per contour, in outline order."""
        loops = {}
        for s in self.samples:
            if glyph is not None and s.glyph != glyph:
                continue
            loops.setdefault(s.contour, []).append(s.position)
        return [np.array(v) for _, v in sorted(loops.items())]


@dataclass
class Contact:
    sample_index: int
    glyph: int
    segment: int
    t: float
    closest: np.ndarray  # b, on the collider boundary
    normal: np.ndarray  # unit, out of the collider
    depth: float  # N . (p - b); negative = penetrating

    @property
    def penetration(self):
        return max(0.0, -self.depth)


@dataclass
class ColliderScene:
    """Static geometry: half-open walls (free space on the local left of
    p0 -> p1) and simple polygons; plus the glyph-glyph collision toggle."""

    walls: list = field(default_factory=list)  # (p0, p1) arrays
    polygons: list = field(default_factory=list)  # (v, 2) arrays, CCW
    pairwise: bool = False

    def __post_init__(self):
        self.walls = [
            (np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
            for a, b in self.walls
        ]
        normed = []
        for poly in self.polygons:
            poly = np.asarray(poly, dtype=np.float64)
            if len(poly) < 3:
                raise ValueError("polygon needs >= 3 vertices")
            if _polygon_area(poly) < 0:
                poly = poly[::-1].copy()
            normed.append(poly)
        self.polygons = normed

    @classmethod
    def from_text(cls, text):
        """Scene file: `wall x0 y0 x1 y1`, `poly n x1 y1 ... xn yn`,
        `pairwise on|off`; '#' comments."""
        walls = []
        polys = []
        pairwise = False
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kind = parts[0]
            if kind == "wall":
                if len(parts) != 5:
                    raise ValueError(f"line {lineno}: wall needs 4 numbers")
                a = (float(parts[1]), float(parts[2]))
                b = (float(parts[3]), float(parts[4]))
                walls.append((a, b))
            elif kind == "poly":
                n = int(parts[1])
                coords = [float(v) for v in parts[2:]]
                if len(coords) != 2 * n:
                    raise ValueError(f"line {lineno}: poly expects {2 * n} numbers")
                polys.append(np.array(coords).reshape(n, 2))
            elif kind == "pairwise":
                pairwise = parts[1] == "on"
            else:
                raise ValueError(f"line {lineno}: unknown record {kind!r}")
        return cls(walls=walls, polygons=polys, pairwise=pairwise)

    def is_empty(self):
        return not self.walls and not self.polygons and not self.pairwise


def _polygon_area(poly):
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def sample_outline(layout, density=DEFAULT_DENSITY):
    """Uniform-in-t samples per cubic segment; the t=1 endpoint of each
    segment is dropped (it reappears as the next segment's t=0, and the
    contour closes on itself)."""
    if density < 2:
        raise ValueError("density must be >= 2")
    ts = np.linspace(0.0, 1.0, density)[:-1]
    weights = np.stack([bernstein3(t) for t in ts])  # (density-1, 4)
    samples = []
    contour_ordinal = -1
    last = None
    for seg_index, quad in enumerate(layout.segments):
        glyph = layout.segment_glyph[seg_index]
        inst = layout.instances[glyph]
        local = seg_index - sum(
            len(layout.instances[g].segments) for g in range(glyph)
        )
        contour = _contour_of_segment(inst, local)
        key = (glyph, contour)
        if key != last:
            contour_ordinal += 1
            last = key
        pts = layout.points[list(quad)]
        positions = weights @ pts
        for t, pos in zip(ts, positions):
            samples.append(
                Sample(
                    index=len(samples),
                    glyph=glyph,
                    contour=contour_ordinal,
                    segment=seg_index,
                    t=float(t),
                    position=pos,
                )
            )
    return OutlineSamples(samples=samples, density=density)


def _contour_of_segment(instance, local_segment):
    count = 0
    for ci, (start, n, closed) in enumerate(instance.contours):
        n_seg = n // 3 if closed else (n - 1) // 3
        if local_segment < count + n_seg:
            return ci
        count += n_seg
    return -1


def detect_contacts(layout, scene, density=DEFAULT_DENSITY):
    """Full detection pass for one layout: static colliders plus, when the
    scene enables it, glyph-glyph tests in both directions per pair."""
    samples = sample_outline(layout, density)
    contacts = detect_static(samples, scene)
    if scene.pairwise:
        l = len(layout.instances)
        per_glyph = [samples.of_glyph(g) for g in range(l)]
        for a in range(l):
            for b in range(l):
                if a != b:
                    contacts.extend(
                        detect_pairwise(per_glyph[a], per_glyph[b], layout)
                    )
    return contacts


def detect_static(samples, scene):
    """Contacts of outline samples against walls and polygons."""
    contacts = []
    for si, sample in enumerate(samples.samples):
        p = sample.position
        for a, b in scene.walls:
            d = b - a
            length2 = float(d @ d)
            if length2 == 0.0:
                continue
            u = float((p - a) @ d) / length2
            if not 0.0 <= u <= 1.0:
                continue
            normal = np.array([-d[1], d[0]]) / np.sqrt(length2)
            closest = a + u * d
            depth = float(normal @ (p - closest))
            if depth < 0.0:
                contacts.append(_contact(si, sample, closest, normal, depth))
        for poly in scene.polygons:
            if _point_in_polygon_evenodd(p, poly):
                closest, normal = _closest_on_polygon(p, poly)
                depth = float(normal @ (p - closest))
                contacts.append(_contact(si, sample, closest, normal, depth))
    return contacts


def _contact(si, sample, closest, normal, depth):
    return Contact(
        sample_index=si,
        glyph=sample.glyph,
        segment=sample.segment,
        t=sample.t,
        closest=closest,
        normal=normal,
        depth=depth,
    )


def _point_in_polygon_evenodd(p, poly):
    x, y = p
    vx, vy = poly[:, 0], poly[:, 1]
    wx, wy = np.roll(vx, -1), np.roll(vy, -1)
    crosses = (vy > y) != (wy > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (y - vy) / (wy - vy)
        xi = vx + t * (wx - vx)
    return bool(np.count_nonzero(crosses & (xi > x)) % 2)


def _closest_on_polygon(p, poly):
    """Exact closest boundary point and the outward normal of its edge."""
    best = None
    n = len(poly)
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        d = b - a
        length2 = float(d @ d)
        if length2 == 0.0:
            continue
        u = min(max(float((p - a) @ d) / length2, 0.0), 1.0)
        q = a + u * d
        dist2 = float((p - q) @ (p - q))
        if best is None or dist2 < best[0] - 1e-15:
            outward = np.array([d[1], -d[0]]) / np.sqrt(length2)  # CCW polygon
            best = (dist2, q, outward)
    return best[1], best[2]


def winding_number(p, loop):
    """Signed winding of a closed polyline around p (nonzero rule)."""
    x, y = p
    vx, vy = loop[:, 0], loop[:, 1]
    wx, wy = np.roll(vx, -1), np.roll(vy, -1)
    is_left = (wx - vx) * (y - vy) - (x - vx) * (wy - vy)
    up = (vy <= y) & (wy > y) & (is_left > 0)
    down = (vy > y) & (wy <= y) & (is_left < 0)
    return int(np.count_nonzero(up)) - int(np.count_nonzero(down))


def detect_pairwise(samples_a, samples_b, layout):
    """Contacts of glyph A's samples inside glyph B's sampled outline.

    b is the nearest sample of B refined by one Newton step of
    point-to-cubic projection; N is the outward normal of B's curve there.
    """
    if not samples_a or not samples_b:
        return []
    pos_a = np.array([s.position for s in samples_a])
    pos_b = np.array([s.position for s in samples_b])
    # bounding-box early out
    if (
        pos_a[:, 0].max() < pos_b[:, 0].min()
        or pos_b[:, 0].max() < pos_a[:, 0].min()
        or pos_a[:, 1].max() < pos_b[:, 1].min()
        or pos_b[:, 1].max() < pos_a[:, 1].min()
    ):
        return []
    loops = {}
    for s in samples_b:
        loops.setdefault(s.contour, []).append(s.position)
    loop_arrays = [np.array(v) for _, v in sorted(loops.items())]
    contacts = []
    for sample in samples_a:
        p = sample.position
        winding = sum(winding_number(p, loop) for loop in loop_arrays)
        if winding == 0:
            continue
        dists = np.linalg.norm(pos_b - p, axis=1)
        bi = int(np.argmin(dists))
        near = samples_b[bi]
        seg = layout.segments[near.segment]
        controls = layout.points[list(seg)]
        t_star, closest, normal = _refine_on_cubic(p, controls, near.t, steps=1)
        depth = float(normal @ (p - closest))
        contacts.append(
            Contact(
                sample_index=sample.index,
                glyph=sample.glyph,
                segment=sample.segment,
                t=sample.t,
                closest=closest,
                normal=normal,
                depth=depth,
            )
        )
    return contacts


def _cubic_point(controls, t):
    return bernstein3(t) @ controls


def _cubic_tangent(controls, t):
    u = 1.0 - t
    d = (
        3 * u * u * (controls[1] - controls[0])
        + 6 * u * t * (controls[2] - controls[1])
        + 3 * t * t * (controls[3] - controls[2])
    )
    return d


def _cubic_second(controls, t):
    u = 1.0 - t
    return 6 * u * (controls[2] - 2 * controls[1] + controls[0]) + 6 * t * (
        controls[3] - 2 * controls[2] + controls[1]
    )


def _outward_normal(controls, t):
    tan = _cubic_tangent(controls, t)
    norm = float(np.linalg.norm(tan))
    if norm == 0.0:
        # cusp: fall back to the chord direction
        tan = controls[3] - controls[0]
        norm = float(np.linalg.norm(tan))
        if norm == 0.0:
            raise DegenerateSegment("segment with no extent")
    # right-hand perpendicular: outward for CCW outers and CW holes alike
    return np.array([tan[1], -tan[0]]) / norm


def _refine_on_cubic(p, controls, t0, steps):
    t = float(t0)
    for _ in range(steps):
        c = _cubic_point(controls, t)
        d1 = _cubic_tangent(controls, t)
        d2 = _cubic_second(controls, t)
        diff = c - p
        f = float(diff @ d1)
        fp = float(d1 @ d1 + diff @ d2)
        if fp <= 0.0:
            break
        t = min(max(t - f / fp, 0.0), 1.0)
    return t, _cubic_point(controls, t), _outward_normal(controls, t)


def nearest_on_cubic(point, controls, seeds=16, newton_steps=10):
    """Closest point on one cubic segment: seeded Newton on the distance
    derivative (a quintic), parameter clamped to [0, 1]."""
    controls = np.asarray(controls, dtype=np.float64)
    p = np.asarray(point, dtype=np.float64)
    if np.allclose(controls, controls[0]):
        raise DegenerateSegment("all four control points coincide")
    best_t = 0.0
    best_d2 = float("inf")
    for s in np.linspace(0.0, 1.0, seeds):
        t, c, _ = _refine_on_cubic(p, controls, s, newton_steps)
        d2 = float((c - p) @ (c - p))
        if d2 < best_d2 - 1e-15:
            best_d2 = d2
            best_t = t
    closest = _cubic_point(controls, best_t)
    return best_t, closest, _outward_normal(controls, best_t)
