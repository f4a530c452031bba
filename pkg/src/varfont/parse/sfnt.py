"""SFNT container: the table directory at the top of a font file."""

import struct

from ..errors import Malformed, UnsupportedOutlineFormat

SFNT_TRUETYPE = 0x00010000
SFNT_TRUE = 0x74727565  # 'true', old Apple flavor
SFNT_OTTO = 0x4F54544F  # 'OTTO', CFF/CFF2 outlines


def read_table_directory(data):
    """Decode the offset table and table records.

    Returns a dict mapping 4-char table tag to an (offset, length) pair.
    Offsets are validated against the file length here so the per-table
    parsers can slice without re-checking.
    """
    if len(data) < 12:
        raise Malformed("file shorter than the offset table", offset=0)
    sfnt_version, num_tables = struct.unpack(">LH", data[:6])
    if sfnt_version == SFNT_OTTO:
        raise UnsupportedOutlineFormat(
            "CFF-flavored font (no glyf table)", table="CFF ", offset=0
        )
    if sfnt_version not in (SFNT_TRUETYPE, SFNT_TRUE):
        raise Malformed(f"unrecognized sfnt version 0x{sfnt_version:08X}", offset=0)
    directory_end = 12 + 16 * num_tables
    if len(data) < directory_end:
        raise Malformed("table directory truncated", offset=len(data))
    tables = {}
    for i in range(num_tables):
        rec_off = 12 + 16 * i
        tag, _checksum, offset, length = struct.unpack(
            ">4sLLL", data[rec_off : rec_off + 16]
        )
        tag = tag.decode("latin-1")
        if offset + length > len(data):
            raise Malformed(
                f"table record extends past end of file (need {offset + length}, "
                f"have {len(data)})",
                table=tag,
                offset=rec_off,
            )
        tables[tag] = (offset, length)
    return tables


def table_bytes(data, tables, tag):
    """Slice one table out of the file, or None when absent."""
    if tag not in tables:
        return None
    offset, length = tables[tag]
    return bytes(data[offset : offset + length])
