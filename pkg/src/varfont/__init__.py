"""Differentiable variable-font engine.

Parses TrueType-flavored variable fonts into explicit models, evaluates
axis-weight interpolation and word layout with analytic Jacobians, and
drives gradient-based editing: direct outline manipulation, collision
resolution, physics-style animation, and image-based font matching.
"""

from .parse import FontModel, parse_font

__version__ = "0.1.0"

__all__ = ["FontModel", "parse_font", "__version__"]
