from .dump import dump_cubic_points, dump_deltas, dump_points, dump_regions
from .elevate import Elevation, elevate_outline
from .iup import apply_iup
from .model import (
    AxisDescriptor,
    FontModel,
    GlyphVariation,
    RawQuadGlyph,
    Region,
    parse_font,
)

__all__ = [
    "AxisDescriptor",
    "Elevation",
    "FontModel",
    "GlyphVariation",
    "RawQuadGlyph",
    "Region",
    "apply_iup",
    "dump_cubic_points",
    "dump_deltas",
    "dump_points",
    "dump_regions",
    "elevate_outline",
    "parse_font",
]
