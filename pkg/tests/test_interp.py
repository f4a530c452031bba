"""Normalization, support functions, interpolation, layout, SVG export."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varfont.errors import BadSegment, DegenerateAxis, EmptyWord, NonInvertibleSegment
from varfont.interp import (
    clamp_weights,
    denormalize_axis,
    evaluate_curve,
    interpolate_glyph,
    layout_word,
    normalize_axis,
    region_scalar,
    support_scalar,
)
from varfont.parse.model import AxisDescriptor, Region
from varfont.svg import export_svg


WGHT = AxisDescriptor("wght", 100, 400, 900)


# ------------------------------------------------------------ normalization


def test_normalize_examples():
    assert normalize_axis(WGHT, 400) == 0.0
    assert normalize_axis(WGHT, 900) == 1.0
    assert normalize_axis(WGHT, 250) == -0.5


def test_normalize_clamps_out_of_range():
    assert normalize_axis(WGHT, 50) == -1.0
    assert normalize_axis(WGHT, 2000) == 1.0


def test_normalize_degenerate_axis():
    point = AxisDescriptor("opsz", 12, 12, 12)
    assert normalize_axis(point, 12) == 0.0
    with pytest.raises(DegenerateAxis):
        normalize_axis(point, 14)


def test_normalize_with_avar(fix2):
    wght = fix2.axes[0]
    assert wght.avar_map
    # authored kink: pre-avar 0.5 maps to 0.25
    assert normalize_axis(wght, 650) == 0.25
    assert normalize_axis(wght, 900) == 1.0
    assert normalize_axis(wght, 400) == 0.0


def test_denormalize_examples():
    assert denormalize_axis(WGHT, 0.0) == 400
    assert denormalize_axis(WGHT, 1.0) == 900
    assert denormalize_axis(WGHT, -0.5) == 250


def test_denormalize_inverts_avar(fix2):
    wght = fix2.axes[0]
    for s in (100, 250, 400, 520, 650, 780, 900):
        w = normalize_axis(wght, s)
        assert denormalize_axis(wght, w) == pytest.approx(s, abs=1e-9)


def test_denormalize_flat_segment_midpoint():
    flat = AxisDescriptor(
        "flat", 0, 50, 100,
        avar_map=((-1.0, -1.0), (0.0, 0.0), (0.25, 0.5), (0.75, 0.5), (1.0, 1.0)),
    )
    with pytest.warns(NonInvertibleSegment):
        v = denormalize_axis(flat, 0.5)
    # preimage midpoint of [0.25, 0.75] is 0.5 normalized -> 75 design units
    assert v == pytest.approx(75.0)


def test_roundtrip_where_strictly_increasing(fix2):
    wght = fix2.axes[0]
    for w in np.linspace(-1, 1, 21):
        assert normalize_axis(wght, denormalize_axis(wght, w)) == pytest.approx(
            w, abs=1e-12
        )


# -------------------------------------------------------- support functions


def test_support_scalar_examples():
    assert support_scalar((0, 1, 1), 1.0) == 1.0
    assert support_scalar((0, 1, 1), 0.0) == 0.0
    assert support_scalar((0, 0.5, 1), 0.25) == 0.5


def test_support_scalar_boundaries():
    assert support_scalar((0, 0.5, 1), 1.0) == 0.0  # half-open at end
    assert support_scalar((0, 0.5, 0.5), 0.5) == 1.0  # peak wins
    assert support_scalar((0.5, 0.5, 1), 0.5) == 1.0
    assert support_scalar((0, 0, 0), 0.7) == 1.0  # zero peak: inactive


def test_region_scalar_examples():
    assert region_scalar(Region({}), np.zeros(3)) == 1.0
    two = Region({0: (0, 1, 1), 1: (0, 1, 1)})
    assert region_scalar(two, np.array([0.5, 0.5])) == 0.25
    assert region_scalar(two, np.array([0.5, 0.0])) == 0.0


@settings(max_examples=200, deadline=None)
@given(
    peak=st.floats(-1, 1),
    lo=st.floats(0, 1),
    hi=st.floats(0, 1),
    w=st.floats(-1, 1),
)
def test_support_scalar_range_property(peak, lo, hi, w):
    start = peak - lo * (peak + 1.0)
    end = peak + hi * (1.0 - peak)
    value = support_scalar((start, peak, end), w)
    assert 0.0 <= value <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_region_scalar_range_property(data):
    n = data.draw(st.integers(1, 4))
    triples = {}
    for i in range(n):
        if data.draw(st.booleans()):
            peak = data.draw(st.floats(-1, 1))
            start = peak - data.draw(st.floats(0, 1)) * (peak + 1.0)
            end = peak + data.draw(st.floats(0, 1)) * (1.0 - peak)
            triples[i] = (start, peak, end)
    w = np.array([data.draw(st.floats(-1, 1)) for _ in range(n)])
    gamma = region_scalar(Region(triples), w)
    assert 0.0 <= gamma <= 1.0


# ------------------------------------------------------------ interpolation


def test_default_identity_on_fixtures(all_fixtures):
    for model in all_fixtures.values():
        for gid, glyph in model.glyphs.items():
            from varfont.interp import region_scalars

            gamma0 = region_scalars(glyph, np.zeros(model.n_axes), model.n_axes)
            if np.any(gamma0 != 0.0):
                continue  # only regions vanishing at the origin qualify
            inst = interpolate_glyph(model, gid, np.zeros(model.n_axes))
            assert np.array_equal(inst.points, glyph.default_points)


def test_fix1_peak_instance(fix1):
    glyph = fix1.glyphs[1]
    inst = interpolate_glyph(fix1, 1, [1.0])
    assert np.allclose(inst.points, glyph.default_points + glyph.deltas[0])
    assert inst.gamma.tolist() == [1.0]


def test_fix2_intermediate_instance_golden(fix2):
    from conftest import FIXTURES

    golden = np.array(
        [
            [float(v) for v in line.split()[1:]]
            for line in (FIXTURES / "fix2_T_instance_w0.5_-0.25.txt").read_text().splitlines()
        ]
    )
    inst = interpolate_glyph(fix2, 1, [0.5, -0.25])
    # golden rows: 3 outline corners then the 2 phantoms
    anchors = inst.points[[0, 3, 6]]
    assert np.allclose(anchors, golden[:3])
    assert np.allclose(inst.points[-2:], golden[3:])


def test_linearity_in_deltas(fix2):
    import copy

    doubled = copy.deepcopy(fix2)
    for glyph in doubled.glyphs.values():
        glyph.deltas = glyph.deltas * 2.0
    w = np.array([0.37, -0.61])
    base = interpolate_glyph(fix2, 1, w)
    double = interpolate_glyph(doubled, 1, w)
    default = fix2.glyphs[1].default_points
    assert np.allclose(double.points - default, 2.0 * (base.points - default))


def test_topology_preserved_across_weights(fix2):
    rng = np.random.default_rng(11)
    glyph = fix2.glyphs[2]
    for _ in range(10):
        inst = interpolate_glyph(fix2, 2, rng.uniform(-1, 1, 2))
        assert inst.contours == glyph.contours
        assert inst.segments == glyph.segments


def test_unknown_glyph(fix1):
    from varfont.errors import UnknownGlyph

    with pytest.raises(UnknownGlyph):
        interpolate_glyph(fix1, 99, [0.0])


# ------------------------------------------------------------------- layout


def test_single_glyph_translated_by_left_phantom(fix3):
    theta = np.array([[0.25]])
    layout = layout_word(fix3, [1], theta)
    inst = interpolate_glyph(fix3, 1, [0.25])
    assert np.allclose(layout.offsets[0], -inst.phantom_left)
    assert np.allclose(layout.points, inst.points - inst.phantom_left)


def test_two_glyph_offset_equals_advance(fix3):
    layout = layout_word(fix3, [1, 2], np.zeros((2, 1)))
    assert layout.offsets[1][0] == fix3.advance_widths[1]


def test_empty_word(fix3):
    with pytest.raises(EmptyWord):
        layout_word(fix3, [], np.zeros((0, 1)))


def test_layout_additivity(fix3):
    rng = np.random.default_rng(5)
    for _ in range(5):
        theta = rng.uniform(-1, 1, (2, 1))
        ab = layout_word(fix3, [1, 2], theta)
        a = layout_word(fix3, [1], theta[:1])
        b = layout_word(fix3, [2], theta[1:])
        assert ab.advance == pytest.approx(a.advance + b.advance, abs=1e-9)


def test_advance_varies_with_weight(fix3):
    w0 = layout_word(fix3, [1], np.zeros((1, 1))).advance
    w1 = layout_word(fix3, [1], np.full((1, 1), 1.0)).advance
    assert w1 == w0 + 40.0  # authored phantom delta


# ------------------------------------------------------------- curve eval


def test_evaluate_curve_endpoints(fix1):
    inst = interpolate_glyph(fix1, 1, [0.0])
    seg = inst.segments[0]
    assert np.allclose(evaluate_curve(inst, 0, 0.0), inst.points[seg[0]])
    assert np.allclose(evaluate_curve(inst, 0, 1.0), inst.points[seg[3]])


def test_evaluate_curve_line_midpoint(fix1):
    inst = interpolate_glyph(fix1, 1, [0.0])
    seg = inst.segments[0]
    mid = 0.5 * (inst.points[seg[0]] + inst.points[seg[3]])
    assert np.allclose(evaluate_curve(inst, 0, 0.5), mid)


def test_evaluate_curve_bad_segment(fix1):
    inst = interpolate_glyph(fix1, 1, [0.0])
    with pytest.raises(BadSegment):
        evaluate_curve(inst, 99, 0.5)


# -------------------------------------------------------------------- clamp


def test_clamp_examples():
    out, changed = clamp_weights(np.array([0.5, -0.2]))
    assert not changed and out.tolist() == [0.5, -0.2]
    out, changed = clamp_weights(np.array([1.7, -3.0]))
    assert changed and out.tolist() == [1.0, -1.0]
    out, changed = clamp_weights(np.array([1.0]))
    assert not changed


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6))
def test_clamp_idempotent(values):
    once, _ = clamp_weights(np.array(values))
    twice, changed = clamp_weights(once)
    assert not changed
    assert np.array_equal(once, twice)


# ---------------------------------------------------------------------- svg


def test_svg_rectangle_golden(fix1):
    from conftest import FIXTURES

    layout = layout_word(fix1, [1], np.zeros((1, 1)))
    svg = export_svg(layout)
    assert svg.count("<path") == 1
    assert svg.count("C ") == 4  # four cubic commands for the rectangle
    assert 'viewBox="' in svg and "scale(1 -1)" in svg
    assert svg == (FIXTURES / "fix1_I_default.svg").read_text()


def test_svg_empty_glyph(fix1):
    layout = layout_word(fix1, [0], np.zeros((1, 1)))  # .notdef is empty
    svg = export_svg(layout)
    assert 'd=""' in svg


def test_svg_two_glyphs_distinct_transforms(fix3):
    layout = layout_word(fix3, [1, 2], np.zeros((2, 1)))
    svg = export_svg(layout)
    transforms = [
        line.split('transform="')[1].split('"')[0]
        for line in svg.splitlines()
        if "<path" in line
    ]
    assert len(transforms) == 2
    assert transforms[0] != transforms[1]
