import math

import numpy as np
import pytest

from outlierfrechet import (
    EllipseRegion,
    build_diagram,
    build_gprime,
    build_graph_g,
    build_graph_gstar,
    build_gstar_spaced,
    gstar_cell_vertex_count,
    make_curve,
    oracle_error_bound,
    oracle_minex,
    OracleConfig,
    place_grid,
    shortest_forbidden_path,
    unsolvable_fixture,
)

from conftest import random_curve


def _dominated_pairs(pts):
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i != j and pts[j][0] >= pts[i][0] and pts[j][1] >= pts[i][1]:
                yield i, j


def test_gprime_empty_and_single():
    reg = EllipseRegion(0, 0, 1, 1)
    g0 = build_gprime(reg, np.zeros((0, 2)))
    assert len(g0.vertices) == 0 and len(g0.edges) == 0
    g1 = build_gprime(reg, [(1.0, 0.0)])
    assert len(g1.vertices) == 1 and len(g1.edges) == 0


def test_gprime_two_points_on_circle():
    reg = EllipseRegion(0, 0, 1, 1)
    p1 = reg.boundary_point(math.radians(200))
    p2 = reg.boundary_point(math.radians(60))
    assert p2[0] >= p1[0] and p2[1] >= p1[1]
    g = build_gprime(reg, [p1, p2])
    dist = g.distances_from(0)
    want = abs(p2[0] - p1[0]) + abs(p2[1] - p1[1])
    assert dist[1] == pytest.approx(want, abs=1e-12)


def test_gprime_dominated_pairs_exact(rng):
    reg = EllipseRegion(0.3, -0.2, 2.0, 1.1, theta=0.7)
    pts = np.array([reg.boundary_point(p)
                    for p in rng.uniform(0, 2 * np.pi, 64)])
    g = build_gprime(reg, pts)
    tol = 1e-9 * reg.diameter
    checked = 0
    for i in range(64):
        dist = g.distances_from(i)
        for j in range(64):
            if i == j:
                continue
            if pts[j][0] >= pts[i][0] and pts[j][1] >= pts[i][1]:
                want = abs(pts[j][0] - pts[i][0]) + abs(pts[j][1] - pts[i][1])
                assert abs(dist[j] - want) <= tol
                checked += 1
    assert checked > 500


def test_gprime_size_bound(rng):
    reg = EllipseRegion(0, 0, 3.0, 1.4, theta=-0.3)
    for k in (16, 64, 256):
        pts = np.array([reg.boundary_point(p)
                        for p in rng.uniform(0, 2 * np.pi, k)])
        g = build_gprime(reg, pts)
        assert g.size <= 8 * k * math.log2(k) + 8


def test_gprime_depth_tags(rng):
    reg = EllipseRegion(0, 0, 1, 1)
    pts = np.array([reg.boundary_point(p)
                    for p in rng.uniform(0, 2 * np.pi, 32)])
    g = build_gprime(reg, pts)
    assert np.all(g.depth[:32] == -1)
    assert np.all(g.depth[32:] >= 0)
    assert g.depth.max() <= math.ceil(math.log2(32)) + 1


def test_gprime_edges_monotone_and_inside_region(rng):
    # Use a real diagram cell as the region so containment can be checked
    # against the quadratic margin.
    fx = unsolvable_fixture()
    diag = build_diagram(fx.curve_a, fx.curve_b, 1.0)
    cell = diag.cells[0][0]
    pts = []
    for x in rng.uniform(cell.rect.x0, cell.rect.x1, 60):
        pts.extend(cell.line_crossings("vertical", float(x)))
    pts = np.array(pts)
    g = build_gprime(cell, pts)
    for (u, v), l1 in zip(g.edges, g.l1_len):
        a, b = g.vertices[u], g.vertices[v]
        assert b[0] >= a[0] - 1e-12 and b[1] >= a[1] - 1e-12
        for t in np.linspace(0, 1, 16):
            p = (1 - t) * a + t * b
            assert cell.margin(p[0], p[1]) <= cell.tol + 1e-12


def test_gstar_fully_forbidden_reduces_to_boundary_grid():
    t1 = make_curve([(0, 0), (1, 0), (2, 0.5)])
    t2 = make_curve([(0, 50), (1, 50)])
    diag = build_diagram(t1, t2, 0.5)
    g = build_graph_gstar(diag, 0.5)
    g.validate()
    sol = shortest_forbidden_path(g)
    assert sol.quality_B == pytest.approx(diag.W + diag.H, rel=1e-12)
    assert sol.quality_W == pytest.approx(0.0, abs=1e-12)


def test_gstar_matches_oracle_window():
    fx = unsolvable_fixture()
    diag = build_diagram(fx.curve_a, fx.curve_b, 1.0)
    g = build_graph_gstar(diag, 0.05)
    sol = shortest_forbidden_path(g)
    oracle = oracle_minex(fx.curve_a, fx.curve_b, 1.0, OracleConfig(2048))
    err = oracle_error_bound(fx.curve_a, fx.curve_b, 2048)
    assert oracle - err - 1e-9 <= sol.quality_B
    assert sol.quality_B <= oracle + 0.05 * 16 * max(diag.W, diag.H) + 1e-9


def test_gstar_never_worse_than_grid(rng):
    for _ in range(3):
        t1 = random_curve(rng, 2)
        t2 = random_curve(rng, 1, start=t1.vertices[0] + 0.3)
        eps = float(rng.uniform(0.6, 1.4))
        diag = build_diagram(t1, t2, eps)
        delta = 0.02
        g_grid = build_graph_g(diag, place_grid(diag, delta))
        g_star = build_graph_gstar(diag, delta)
        w_grid = shortest_forbidden_path(g_grid).quality_B
        w_star = shortest_forbidden_path(g_star).quality_B
        assert w_star <= w_grid + 1e-9


def test_gstar_cell_vertex_count_untouched_cell():
    t1 = make_curve([(0, 0), (1, 0)])
    t2 = make_curve([(0, 5), (1, 5)])
    diag = build_diagram(t1, t2, 0.1)
    g = build_graph_gstar(diag, 1.0)
    # Empty free space and only boundary lines: the four corners remain.
    assert gstar_cell_vertex_count(g, 0, 0) == 4


def test_gstar_cell_count_scaling():
    fx = unsolvable_fixture()
    diag = build_diagram(fx.curve_a, fx.curve_b, 1.0)
    counts = []
    for delta in (0.2, 0.1, 0.05):
        g = build_graph_gstar(diag, delta)
        counts.append(max(g.cell_vertex_counts.values()))
    for a, b in zip(counts[:-1], counts[1:]):
        assert b <= 2.5 * a


def test_gstar_cell_count_with_k_crossings():
    fx = unsolvable_fixture()
    diag = build_diagram(fx.curve_a, fx.curve_b, 1.0)
    delta = 0.1
    g = build_graph_gstar(diag, delta)
    lines = place_grid(diag, delta)
    for (i, j), count in g.cell_vertex_counts.items():
        cell = diag.cells[i][j]
        k = 0
        for x in lines.xs:
            k += len(cell.line_crossings("vertical", float(x)))
        for y in lines.ys:
            k += len(cell.line_crossings("horizontal", float(y)))
        if k >= 4:
            assert count <= 14 * k * math.log2(k)


def test_gstar_spaced_graph_small_instance():
    c1 = make_curve([(0, 0), (1, 0.1), (2, 0)])
    c2 = make_curve([(0, 0.2), (1, 0.3), (2, 0.2)])
    diag = build_diagram(c1, c2, 0.5)
    g = build_gstar_spaced(diag, 0.05)
    g.validate()
    sol = shortest_forbidden_path(g)
    assert sol.quality_B >= 0.0
    assert sol.quality_B + sol.quality_W == pytest.approx(
        diag.W + diag.H, rel=1e-9)


def test_gstar_spaced_rejects_bad_spacing():
    c1 = make_curve([(0, 0), (1, 0)])
    diag = build_diagram(c1, c1, 0.5)
    with pytest.raises(ValueError):
        build_gstar_spaced(diag, 0.0)
