"""Exception and warning types shared across the engine."""


class FontParseError(Exception):
    """Base class for font decoding failures.

    Carries the table tag and the byte offset at which decoding failed so
    errors are actionable without a hex dump.
    """

    def __init__(self, message, table=None, offset=None):
        self.table = table
        self.offset = offset
        where = ""
        if table is not None:
            where = f" [table={table}"
            where += f" offset={offset}]" if offset is not None else "]"
        super().__init__(message + where)


class MissingTable(FontParseError):
    """A required table (fvar, gvar, glyf, ...) is absent."""

    def __init__(self, table, offset=None):
        super().__init__(f"required table {table!r} not present", table, offset)


class Malformed(FontParseError):
    """Offsets, lengths or counts in the file are inconsistent."""


class UnsupportedOutlineFormat(FontParseError):
    """The font stores outlines in a format we do not decode (e.g. CFF2)."""


class DegenerateAxis(ValueError):
    """Axis with min == default == max queried away from its single point."""


class UnknownGlyph(KeyError):
    """Glyph id not present in the font model."""


class EmptyWord(ValueError):
    """Word-level operation invoked with zero glyphs."""


class BadSegment(IndexError):
    """Curve segment index out of range for the instance."""


class ArityError(ValueError):
    """Constraint given fewer handles than its kind requires."""


class MissingGlyph(ValueError):
    """Code points in the input text have no glyph in the font's cmap."""

    def __init__(self, code_points):
        self.code_points = list(code_points)
        pretty = ", ".join(f"U+{cp:04X}" for cp in self.code_points)
        super().__init__(f"no glyph for code point(s): {pretty}")


class DegenerateSegment(ValueError):
    """All four control points of a cubic segment coincide."""


class SizeMismatch(ValueError):
    """Image dimensions disagree with the raster configuration."""


class BadFormat(ValueError):
    """Image file is not the binary 8-bit PGM we read."""


class SingularNormalEquations(RuntimeError):
    """LM normal equations stayed singular after damping escalation."""


class NonFiniteResidual(FloatingPointError):
    """Residual evaluation produced NaN or infinity."""


class NonFiniteGradient(FloatingPointError):
    """Gradient evaluation produced NaN or infinity."""


class DegenerateContour(UserWarning):
    """Contour with fewer than two points was dropped during conversion."""


class NonInvertibleSegment(UserWarning):
    """Normalized value sits on a flat axis-remap segment; preimage ambiguous."""
