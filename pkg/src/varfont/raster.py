"""Soft-coverage rasterization with gradients.

Pixel value = logistic(-sd / tau) of the signed distance to the sampled
outline (negative inside), so coverage is smooth in the control points and
image losses can be chained through the interpolation Jacobian. The
distance argmin is treated as locally fixed: its switching set (the medial
axis) has measure zero, the same argument that covers region-boundary
derivative jumps.

Images are row-major with row 0 at the top; the view transform is a
uniform scale plus translation from font units to an y-up pixel frame,
flipped only at the row indexing.
"""

from dataclasses import dataclass

import numpy as np

from .collision import sample_outline
from .errors import BadFormat, SizeMismatch
from .gradients import curve_point_jacobian

GRADIENT_CUTOFF = 16.0  # |sd| beyond this many tau: exactly zero gradient


@dataclass
class RasterConfig:
    width: int = 64
    height: int = 64
    scale: float = 1.0  # pixels per font unit
    offset_x: float = 0.0  # pixel position of font origin (y-up frame)
    offset_y: float = 0.0
    tau: float = 1.5  # softness in pixels
    density: int = 8  # outline samples per segment

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        if self.scale <= 0:
            raise ValueError("view transform must be invertible (scale > 0)")

    @classmethod
    def fit(cls, bounds, width=64, height=64, margin=0.1, **kw):
        """Fit font-unit bounds (x0, y0, x1, y1) into the frame."""
        x0, y0, x1, y1 = bounds
        w = max(x1 - x0, 1e-9)
        h = max(y1 - y0, 1e-9)
        scale = min(width * (1 - 2 * margin) / w, height * (1 - 2 * margin) / h)
        ox = 0.5 * width - scale * 0.5 * (x0 + x1)
        oy = 0.5 * height - scale * 0.5 * (y0 + y1)
        return cls(
            width=width, height=height, scale=scale, offset_x=ox, offset_y=oy, **kw
        )

    def pixel_centers_font(self):
        """(H*W, 2) font-unit coordinates of pixel centers, row-major."""
        cols = np.arange(self.width) + 0.5
        rows = np.arange(self.height) + 0.5
        u = (cols - self.offset_x) / self.scale
        v = ((self.height - rows) - self.offset_y) / self.scale  # row 0 on top
        xs, ys = np.meshgrid(u, v)
        return np.column_stack([xs.reshape(-1), ys.reshape(-1)])


@dataclass
class SoftImage:
    values: np.ndarray  # (H, W) in [0, 1], ink = 1
    nearest: np.ndarray = None  # (H*W,) sample index per pixel
    d_value_d_point: np.ndarray = None  # (H*W, 2) gradient wrt nearest sample
    samples: object = None

    @property
    def shape(self):
        return self.values.shape


def rasterize(layout, config, with_gradients=False):
    """Render a word layout to a soft grayscale image."""
    samples = sample_outline(layout, config.density)
    centers = config.pixel_centers_font()
    n_px = len(centers)
    if not samples.samples:
        values = np.zeros((config.height, config.width))
        if with_gradients:
            return SoftImage(
                values=values,
                nearest=np.full(n_px, -1, dtype=np.int64),
                d_value_d_point=np.zeros((n_px, 2)),
                samples=samples,
            )
        return SoftImage(values=values)

    positions = samples.positions()
    # distance to nearest outline sample, chunked against memory blowup
    nearest = np.empty(n_px, dtype=np.int64)
    dist = np.empty(n_px)
    chunk = max(1, 262144 // max(len(positions), 1))
    for lo in range(0, n_px, chunk):
        hi = min(lo + chunk, n_px)
        d2 = (
            (centers[lo:hi, None, :] - positions[None, :, :]) ** 2
        ).sum(axis=2)
        idx = np.argmin(d2, axis=1)
        nearest[lo:hi] = idx
        dist[lo:hi] = np.sqrt(d2[np.arange(hi - lo), idx])

    inside = np.zeros(n_px, dtype=bool)
    for g in range(len(layout.instances)):
        loops = samples.contour_loops(glyph=g)
        if not loops:
            continue
        wind = np.zeros(n_px, dtype=np.int64)
        for loop in loops:
            wind += _winding_vectorized(centers, loop)
        inside |= wind != 0

    sd_px = np.where(inside, -dist, dist) * config.scale
    values = 0.5 * (1.0 + np.tanh(-0.5 * sd_px / config.tau))
    img = values.reshape(config.height, config.width)
    if not with_gradients:
        return SoftImage(values=img)

    sigma_prime = values * (1.0 - values)
    live = np.abs(sd_px) <= GRADIENT_CUTOFF * config.tau
    sign = np.where(inside, -1.0, 1.0)
    diff = centers - positions[nearest]
    norms = np.where(dist > 1e-12, dist, 1.0)
    direction = diff / norms[:, None]
    factor = np.where(
        live & (dist > 1e-12), sigma_prime * sign * config.scale / config.tau, 0.0
    )
    d_value_d_point = direction * factor[:, None]
    return SoftImage(
        values=img,
        nearest=nearest,
        d_value_d_point=d_value_d_point,
        samples=samples,
    )


def _winding_vectorized(points, loop):
    """winding_number over many points at once."""
    x = points[:, 0][:, None]
    y = points[:, 1][:, None]
    vx, vy = loop[:, 0][None, :], loop[:, 1][None, :]
    wx, wy = np.roll(loop[:, 0], -1)[None, :], np.roll(loop[:, 1], -1)[None, :]
    is_left = (wx - vx) * (y - vy) - (x - vx) * (wy - vy)
    up = (vy <= y) & (wy > y) & (is_left > 0)
    down = (vy > y) & (wy <= y) & (is_left < 0)
    return up.sum(axis=1) - down.sum(axis=1)


def image_residual_jacobian(layout, word_jac, config, image):
    """Chain rule d pixel / d theta = d pixel / d point . d point / d theta.

    image must come from rasterize(..., with_gradients=True) on the same
    layout.
    """
    if image.nearest is None:
        raise ValueError("rasterize with with_gradients=True first")
    n_px = image.values.size
    dim = word_jac.shape[1]
    out = np.zeros((n_px, dim))
    samples = image.samples.samples
    active = np.flatnonzero(
        (np.abs(image.d_value_d_point).sum(axis=1) > 0.0) & (image.nearest >= 0)
    )
    # group pixels by their nearest sample to share the point Jacobian
    order = active[np.argsort(image.nearest[active], kind="stable")]
    i = 0
    while i < len(order):
        j = i
        s_idx = image.nearest[order[i]]
        while j < len(order) and image.nearest[order[j]] == s_idx:
            j += 1
        sample = samples[s_idx]
        jp = curve_point_jacobian(word_jac, layout.segments, sample.segment, sample.t)
        rows = order[i:j]
        out[rows] = image.d_value_d_point[rows] @ jp
        i = j
    return out


def save_pgm(path, image):
    """Write binary 8-bit PGM; ink=1 maps to black (0)."""
    values = np.clip(image.values if isinstance(image, SoftImage) else image, 0.0, 1.0)
    gray = np.round((1.0 - values) * 255.0).astype(np.uint8)
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5 {w} {h} 255\n".encode("ascii"))
        fh.write(gray.tobytes())


def load_target(path, config=None):
    """Read binary 8-bit PGM as a SoftImage (ink = dark = 1)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise BadFormat("not a binary PGM (P5) file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise BadFormat("truncated PGM header")
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise BadFormat(f"only 8-bit PGM supported (maxval {maxval})")
    need = width * height
    raw = data[pos : pos + need]
    if len(raw) < need:
        raise BadFormat("PGM pixel data truncated")
    gray = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
    values = 1.0 - gray.astype(np.float64) / 255.0
    if config is not None and (height, width) != (config.height, config.width):
        raise SizeMismatch(
            f"target {width}x{height} vs config {config.width}x{config.height}"
        )
    return SoftImage(values=values)
