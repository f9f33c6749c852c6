import math

import numpy as np
import pytest

from outlierfrechet import (
    build_cell_l1,
    build_cell_l2,
    build_diagram,
    classify_point,
    free_region_polygon,
    line_ellipse_intersections,
    make_curve,
    unsolvable_fixture,
)


def _fixture_diagram(eps=1.0, metric="l2"):
    fx = unsolvable_fixture()
    return build_diagram(fx.curve_a, fx.curve_b, eps, metric)


def test_first_cell_quadratic_is_pinned_ellipse():
    # (x - 24/25 y + 1/2)^2 + (7/25 y + 3/4)^2 = 1 in deformed coordinates.
    cell = _fixture_diagram().cells[0][0]
    assert cell.a == 1.0 and cell.c == 1.0
    assert cell.b == pytest.approx(-48 / 25, abs=1e-14)
    assert cell.d == pytest.approx(1.0, abs=1e-14)
    assert cell.e == pytest.approx(-27 / 50, abs=1e-14)
    assert cell.f == pytest.approx(-3 / 16, abs=1e-14)


def test_second_cell_quadratic_is_pinned_ellipse():
    cell = _fixture_diagram().cells[1][0]
    assert cell.b == pytest.approx(23474 / 12025, abs=1e-13)
    assert cell.d == pytest.approx(-2787 / 962, abs=1e-13)
    assert cell.e == pytest.approx(-123 / 50, abs=1e-13)
    assert cell.f == pytest.approx(29 / 16, abs=1e-13)


def test_identical_segments_zero_leash_frees_only_diagonal():
    seg = ((0.0, 0.0), (1.0, 0.0))
    cell = build_cell_l2(seg, seg, 0.0)
    assert cell.margin(0.3, 0.3) <= cell.tol
    assert cell.margin(0.3, 0.5) > cell.tol
    assert cell.margin(0.9, 0.1) > cell.tol


def test_l2_cell_sign_matches_distance_oracle(rng):
    for _ in range(5):
        s1 = rng.uniform(-2, 2, (2, 2))
        s2 = rng.uniform(-2, 2, (2, 2))
        eps = float(rng.uniform(0.3, 2.0))
        cell = build_cell_l2(s1, s2, eps)
        u = rng.uniform(0, 1, 10_000)
        v = rng.uniform(0, 1, 10_000)
        p = s1[0] + u[:, None] * (s1[1] - s1[0])
        q = s2[0] + v[:, None] * (s2[1] - s2[0])
        dist = np.hypot(*(p - q).T)
        margin = np.array([cell.margin_local(x, y) for x, y in
                           zip(u * cell.rect.width, v * cell.rect.height)])
        assert np.all((dist <= eps) == (margin <= cell.tol))


def test_l1_cell_membership_matches_l1_oracle(rng):
    for _ in range(5):
        s1 = rng.uniform(-2, 2, (2, 2))
        s2 = rng.uniform(-2, 2, (2, 2))
        eps = float(rng.uniform(0.3, 2.0))
        cell = build_cell_l1(s1, s2, eps)
        u = rng.uniform(0, 1, 10_000)
        v = rng.uniform(0, 1, 10_000)
        p = s1[0] + u[:, None] * (s1[1] - s1[0])
        q = s2[0] + v[:, None] * (s2[1] - s2[0])
        dist = np.abs(p - q).sum(axis=1)
        margin = np.array([cell.margin_local(x, y) for x, y in
                           zip(u * cell.rect.width, v * cell.rect.height)])
        assert np.all((dist <= eps) == (margin <= cell.tol))


def test_l1_identical_segments_zero_leash():
    seg = ((0.0, 0.0), (1.0, 0.0))
    cell = build_cell_l1(seg, seg, 0.0)
    assert cell.margin(0.4, 0.4) <= cell.tol
    assert cell.margin(0.4, 0.6) > cell.tol


def test_l1_offset_parallel_segments_boundary_is_free():
    # Same-direction unit segments at vertical offset eps: matched pairs at
    # equal parameters sit at L1 distance exactly eps and must be free.
    eps = 0.5
    cell = build_cell_l1(((0, 0), (1, 0)), ((0, eps), (1, eps)), eps)
    for t in np.linspace(0, 1, 33):
        assert cell.margin(t, t) <= cell.tol
    assert cell.margin(0.2, 0.6) > cell.tol


def test_diagram_corners_and_sizes():
    diag = _fixture_diagram()
    assert diag.n1 == 2 and diag.n2 == 1
    assert diag.t == (pytest.approx(721 / 240), pytest.approx(25 / 8))
    assert diag.W + diag.H == pytest.approx(
        diag.t1.length + diag.t2.length, rel=1e-15)
    widths = np.diff(diag.col_bounds)
    heights = np.diff(diag.row_bounds)
    assert widths.sum() == pytest.approx(diag.t1.length, rel=1e-14)
    assert heights.sum() == pytest.approx(diag.t2.length, rel=1e-14)


def test_self_similarity_diagonal_free():
    c = make_curve([(0, 0), (1, 0.4), (2.5, 0.1)])
    diag = build_diagram(c, c, 0.3)
    for i in range(c.n_segments):
        cell = diag.cells[i][i]
        for t in np.linspace(0, 1, 17):
            x = cell.rect.x0 + t * cell.rect.width
            y = cell.rect.y0 + t * cell.rect.height
            assert cell.margin(x, y) <= cell.tol


def test_appendix_antiparallel_free_space_is_antidiagonal():
    eps = 1.0
    t1 = make_curve([(0, 0), (1, 0)])
    t2 = make_curve([(1, eps), (0, eps)])
    diag = build_diagram(t1, t2, eps)
    cell = diag.cells[0][0]
    for t in np.linspace(0, 1, 33):
        assert cell.margin(t, 1.0 - t) <= cell.tol
    assert cell.margin(0.25, 0.25) > cell.tol
    assert cell.margin(0.8, 0.9) > cell.tol


def test_classify_point_fixture_start_free():
    diag = _fixture_diagram()
    assert classify_point(diag, (0.0, 0.0)) is True
    with pytest.raises(ValueError):
        classify_point(diag, (-1.0, 0.0))


def test_classify_point_boundary_inclusive():
    seg = ((0.0, 0.0), (1.0, 0.0))
    cell = build_cell_l2(seg, ((0.0, 0.5), (1.0, 0.5)), 0.5)
    # Any matched pair sits at distance exactly 0.5 on the diagonal.
    assert cell.margin(0.3, 0.3) <= cell.tol


def test_classify_against_distance_oracle(rng):
    fx = unsolvable_fixture()
    diag = _fixture_diagram()
    xs = rng.uniform(0, diag.W, 20_000)
    ys = rng.uniform(0, diag.H, 20_000)
    free = diag.free_mask(xs, ys)
    pa = np.array([fx.curve_a.point_at_arclength(x) for x in xs])
    pb = np.array([fx.curve_b.point_at_arclength(y) for y in ys])
    d = np.hypot(*(pa - pb).T)
    assert np.array_equal(free, d <= 1.0)


def test_line_crossings_symmetric_about_center():
    cell = build_cell_l2(((0, 0), (1, 0)), ((0, 0.2), (1, 0.2)), 0.6,
                         rect=None)
    # Non-degenerate tilted case instead: use distinct directions.
    cell = build_cell_l2(((0, 0), (1, 0)), ((0, 0.2), (0.8, 0.9)), 0.6)
    pr = cell.principal()
    assert pr is not None
    center = pr[0]
    pts = line_ellipse_intersections(cell, "vertical", float(center[0]))
    if len(pts) == 2:
        mid = 0.5 * (pts[0][1] + pts[1][1])
        assert mid == pytest.approx(center[1], abs=1e-9)


def test_line_crossing_residuals_random(rng):
    diag = _fixture_diagram()
    for cell in (diag.cells[0][0], diag.cells[1][0]):
        scale = max(abs(cell.f), 1.0)
        for x in rng.uniform(cell.rect.x0, cell.rect.x1, 100):
            for px, py in cell.line_crossings("vertical", float(x)):
                assert abs(cell.margin(px, py)) <= 1e-9 * scale
        for y in rng.uniform(cell.rect.y0, cell.rect.y1, 100):
            for px, py in cell.line_crossings("horizontal", float(y)):
                assert abs(cell.margin(px, py)) <= 1e-9 * scale


def test_tangent_line_single_crossing():
    seg = ((0.0, 0.0), (2.0, 0.0))
    cell = build_cell_l2(seg, ((0.0, 0.5), (2.0, 0.5)), 0.5)
    # Degenerate strip: the free set is the diagonal line; a vertical line
    # crosses it once.
    pts = cell.line_crossings("vertical", 1.0)
    ys = sorted(set(round(p[1], 9) for p in pts))
    assert len(ys) == 1


def test_free_space_convexity_sampled(rng):
    for builder in (build_cell_l2, build_cell_l1):
        for _ in range(3):
            s1 = rng.uniform(-2, 2, (2, 2))
            s2 = rng.uniform(-2, 2, (2, 2))
            cell = builder(s1, s2, float(rng.uniform(0.5, 2.0)))
            pts = np.column_stack([
                rng.uniform(cell.rect.x0, cell.rect.x1, 400),
                rng.uniform(cell.rect.y0, cell.rect.y1, 400)])
            margins = np.array([cell.margin(x, y) for x, y in pts])
            free = pts[margins <= cell.tol]
            if len(free) < 2:
                continue
            a, b = free[0], free[-1]
            for t in np.linspace(0, 1, 128):
                p = (1 - t) * a + t * b
                assert cell.margin(p[0], p[1]) <= cell.tol + 1e-12


def test_metric_nesting_l1_free_implies_l2_free(rng):
    fx = unsolvable_fixture()
    d1 = build_diagram(fx.curve_a, fx.curve_b, 1.0, "l1")
    d2 = build_diagram(fx.curve_a, fx.curve_b, 1.0, "l2")
    xs = rng.uniform(0, d1.W, 10_000)
    ys = rng.uniform(0, d1.H, 10_000)
    f1 = d1.free_mask(xs, ys)
    f2 = d2.free_mask(xs, ys)
    assert not np.any(f1 & ~f2)


def test_free_region_polygon_area_sanity():
    diag = _fixture_diagram()
    poly = free_region_polygon(diag.cells[0][0], n_slices=128)
    assert poly is not None
    assert np.all(poly[:, 0] >= diag.cells[0][0].rect.x0 - 1e-9)
    assert np.all(poly[:, 0] <= diag.cells[0][0].rect.x1 + 1e-9)


def test_empty_and_full_flags():
    far = build_cell_l2(((0, 0), (1, 0)), ((0, 10), (1, 10)), 0.5)
    assert far.is_empty and not far.is_full
    near = build_cell_l2(((0, 0), (1, 0)), ((0, 0.01), (1, 0.01)), 5.0)
    assert near.is_full and not near.is_empty
