"""Analytic Jacobians against central differences and hand values."""

import numpy as np
import pytest

from varfont.gradients import (
    curve_point_jacobian,
    d_region_scalar,
    d_support,
    finite_difference_word_jacobian,
    glyph_jacobian,
    gradient_check,
    word_jacobian,
)
from varfont.interp import layout_word
from varfont.parse.model import Region


def test_d_support_examples():
    assert d_support((0, 1, 1), 0.5) == 1.0
    assert d_support((0, 0.5, 1), 0.75) == -2.0
    assert d_support((0, 0.5, 1), -0.3) == 0.0
    assert d_support((0, 0.3, 0.6), 1.0) == 0.0  # outside support


def test_d_support_right_hand_convention():
    # at the peak the descending slope applies; at start the ascending one
    assert d_support((0, 0.5, 1), 0.5) == -2.0
    assert d_support((0, 0.5, 1), 0.0) == 2.0
    # degenerate ramps contribute no slope
    assert d_support((0.5, 0.5, 1), 0.4) == 0.0
    assert d_support((0, 0, 0), 0.2) == 0.0


def test_d_support_upper_domain_edge_left_derivative():
    # at w = 1 only the left-hand derivative exists; regions peaking at the
    # axis extreme must stay sensitive there or boundary iterates stall
    assert d_support((0, 1, 1), 1.0) == 1.0
    assert d_support((0, 0.5, 1), 1.0) == -2.0


def test_d_region_scalar_single_axis():
    region = Region({0: (0, 0.5, 1)})
    grad = d_region_scalar(region, np.array([0.25]), 1)
    assert grad.tolist() == [2.0]


def test_d_region_scalar_zero_cofactor():
    region = Region({0: (0, 1, 1), 1: (0, 1, 1)})
    # phi_1 = 0 at the ramp start: axis 0's component dies (zero cofactor)
    # while axis 1 keeps its own slope times phi_0
    grad = d_region_scalar(region, np.array([0.5, 0.0]), 2)
    assert grad[0] == 0.0
    assert grad[1] == 0.5


def test_d_region_scalar_fd(fix2):
    rng = np.random.default_rng(0)
    from varfont.interp import region_scalar

    region = fix2.glyphs[1].regions[2]  # intermediate 2-axis region
    for _ in range(20):
        w = rng.uniform(0.26, 0.49, 2)  # interior of the ascending cell
        grad = d_region_scalar(region, w, 2)
        h = 1e-5
        for i in range(2):
            wp, wm = w.copy(), w.copy()
            wp[i] += h
            wm[i] -= h
            fd = (region_scalar(region, wp) - region_scalar(region, wm)) / (2 * h)
            assert grad[i] == pytest.approx(fd, abs=1e-6)


def test_glyph_jacobian_zero_cell(fix2):
    # w in a cell where every region is flat (all gammas locally constant 0)
    jac = glyph_jacobian(fix2, 1, np.array([-0.5, -0.5]))
    assert not jac.any()


def test_glyph_jacobian_equals_delta_column(fix1):
    glyph = fix1.glyphs[1]
    jac = glyph_jacobian(fix1, 1, np.array([0.5]))
    assert np.allclose(jac[:, 0], glyph.deltas[0].reshape(-1))


def test_word_jacobian_single_glyph_reduction(fix1):
    theta = np.array([[0.5]])
    jw = word_jacobian(fix1, [1], theta)
    jg = glyph_jacobian(fix1, 1, theta[0])
    k = fix1.glyphs[1].n_points
    left = jg[2 * (k - 2) : 2 * (k - 2) + 2]
    assert np.allclose(jw, jg - np.tile(left, (k, 1)))


def test_word_jacobian_causality(fix3):
    theta = np.array([[0.3], [0.6]])
    jw = word_jacobian(fix3, [1, 2], theta)
    k1 = fix3.glyphs[1].n_points
    # glyph 1's rows must not depend on glyph 2's axis
    assert not jw[: 2 * k1, 1:].any()


def test_word_jacobian_fd(fix3):
    rng = np.random.default_rng(1)
    for _ in range(10):
        theta = rng.uniform(-0.9, 0.9, (2, 1))
        if np.any(np.abs(theta) < 1e-3):
            continue
        ja = word_jacobian(fix3, [1, 2], theta)
        jf = finite_difference_word_jacobian(fix3, [1, 2], theta)
        scale = max(1.0, np.abs(jf).max())
        assert np.abs(ja - jf).max() / scale < 1e-4


def test_curve_point_jacobian_endpoints(fix1):
    theta = np.array([[0.5]])
    layout = layout_word(fix1, [1], theta)
    jw = word_jacobian(fix1, [1], theta)
    seg = layout.segments[0]
    j0 = curve_point_jacobian(jw, layout.segments, 0, 0.0)
    assert np.allclose(j0, jw[2 * seg[0] : 2 * seg[0] + 2])
    j1 = curve_point_jacobian(jw, layout.segments, 0, 1.0)
    assert np.allclose(j1, jw[2 * seg[3] : 2 * seg[3] + 2])


def test_curve_point_jacobian_affine_combination(fix1):
    # rows of a segment whose four control points share one Jacobian row
    theta = np.array([[0.5]])
    layout = layout_word(fix1, [1], theta)
    jw = word_jacobian(fix1, [1], theta).copy()
    seg = layout.segments[0]
    row = jw[2 * seg[0] : 2 * seg[0] + 2].copy()
    for idx in seg:
        jw[2 * idx : 2 * idx + 2] = row
    jmid = curve_point_jacobian(jw, layout.segments, 0, 0.5)
    assert np.allclose(jmid, row)


def test_curve_point_jacobian_fd(fix3):
    from varfont.interp import evaluate_curve

    rng = np.random.default_rng(2)
    theta = np.array([[0.31], [0.62]])
    layout = layout_word(fix3, [1, 2], theta)
    jw = word_jacobian(fix3, [1, 2], theta)
    h = 1e-5
    for seg in rng.integers(0, len(layout.segments), 5):
        t = float(rng.uniform(0, 1))
        ja = curve_point_jacobian(jw, layout.segments, int(seg), t)
        flat = theta.reshape(-1)
        for i in range(flat.size):
            tp, tm = flat.copy(), flat.copy()
            tp[i] += h
            tm[i] -= h
            pp = evaluate_curve(layout_word(fix3, [1, 2], tp), int(seg), t)
            pm = evaluate_curve(layout_word(fix3, [1, 2], tm), int(seg), t)
            fd = (pp - pm) / (2 * h)
            assert np.abs(ja[:, i] - fd).max() < 1e-4 * max(1.0, np.abs(fd).max())


def test_gradient_suite_all_fixtures(all_fixtures):
    words = {"fix1": [1], "fix2": [1, 2], "fix3": [1, 2, 3]}
    for name, model in all_fixtures.items():
        records, worst, _ = gradient_check(model, words[name], n_samples=100, seed=42)
        assert len(records) == 100
        assert worst < 1e-4, name


def test_piecewise_constant_within_cells(fix2):
    # single-axis region: the gamma gradient is constant inside each cell
    from varfont.gradients import gamma_jacobian

    glyph = fix2.glyphs[2]  # single region (0, 1, 1) on axis 0
    cells = [(-1.0, 0.0), (0.0, 1.0)]
    for lo, hi in cells:
        ws = np.linspace(lo + 1e-3, hi - 1e-3, 10)
        grads = [gamma_jacobian(glyph, np.array([w, 0.3]), 2)[0] @ [1, 0] for w in ws]
        assert np.ptp(grads) < 1e-12


def test_zero_outside_support(fix2):
    # delta set 2 has support wght in [0.25, 0.75); outside it contributes 0
    jac_out = glyph_jacobian(fix2, 1, np.array([0.8, 0.5]))
    glyph = fix2.glyphs[1]
    from varfont.gradients import gamma_jacobian

    grads = gamma_jacobian(glyph, np.array([0.8, 0.5]), 2)
    assert not grads[2].any()
