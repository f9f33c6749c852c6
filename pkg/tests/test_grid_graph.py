import numpy as np
import pytest

from outlierfrechet import (
    build_diagram,
    build_graph_g,
    graph_size_report,
    make_curve,
    place_grid,
    unsolvable_fixture,
)
from outlierfrechet.grid_graph import (
    TAG_CELL_BOUNDARY,
    TAG_EQUIDISTANT,
    TAG_INTERSECTION,
)

from conftest import random_curve


def _fixture_diagram(eps=1.0):
    fx = unsolvable_fixture()
    return build_diagram(fx.curve_a, fx.curve_b, eps)


def test_equidistant_count_formula():
    # n = 2, delta = 1: two equidistant lines per direction, which coincide
    # with the outer cell boundaries of a single-cell diagram.
    t1 = make_curve([(0, 0), (1, 0)])
    t2 = make_curve([(0, 5), (1, 5)])
    diag = build_diagram(t1, t2, 0.1)
    lines = place_grid(diag, 1.0)
    assert lines.count("x", TAG_EQUIDISTANT) == 2
    assert lines.count("y", TAG_EQUIDISTANT) == 2
    assert lines.count("x", TAG_CELL_BOUNDARY) == 2
    assert len(lines.xs) == 2 and len(lines.ys) == 2


def test_equidistant_count_matches_ceil(rng):
    diag = _fixture_diagram()
    for delta in (0.9, 0.5, 0.21):
        lines = place_grid(diag, delta)
        expected = int(np.ceil((diag.n1 + diag.n2) / delta))
        assert lines.count("x", TAG_EQUIDISTANT) == expected
        assert lines.count("y", TAG_EQUIDISTANT) == expected


def test_no_intersection_lines_when_free_space_empty():
    t1 = make_curve([(0, 0), (1, 0)])
    t2 = make_curve([(0, 5), (1, 5)])
    diag = build_diagram(t1, t2, 0.1)  # far apart: free space empty
    lines = place_grid(diag, 0.5)
    assert lines.count("x", TAG_INTERSECTION) == 0
    assert lines.count("y", TAG_INTERSECTION) == 0


def test_intersection_lines_pass_through_boundaries():
    diag = _fixture_diagram()
    lines = place_grid(diag, 0.25)
    cells = [diag.cells[i][j] for i in range(diag.n1) for j in range(diag.n2)]
    for x, tag in zip(lines.xs, lines.x_tags):
        if not (tag & TAG_INTERSECTION) or tag & (TAG_EQUIDISTANT | TAG_CELL_BOUNDARY):
            continue
        hits = [p for c in cells for p in c.line_crossings("vertical", float(x))]
        assert hits, f"vertical intersection line {x} misses every boundary"
    for y, tag in zip(lines.ys, lines.y_tags):
        if not (tag & TAG_INTERSECTION) or tag & (TAG_EQUIDISTANT | TAG_CELL_BOUNDARY):
            continue
        hits = [p for c in cells for p in c.line_crossings("horizontal", float(y))]
        assert hits, f"horizontal intersection line {y} misses every boundary"


def test_orthogonal_line_exists_for_every_grid_crossing():
    diag = _fixture_diagram()
    lines = place_grid(diag, 0.3)
    tol = 1e-9 * (diag.W + diag.H)
    cells = [diag.cells[i][j] for i in range(diag.n1) for j in range(diag.n2)]
    for x, tag in zip(lines.xs, lines.x_tags):
        if not (tag & (TAG_EQUIDISTANT | TAG_CELL_BOUNDARY)):
            continue
        for c in cells:
            for _, yc in c.line_crossings("vertical", float(x)):
                assert np.min(np.abs(lines.ys - yc)) <= tol


def test_fully_free_graph_all_zero_weight():
    c = random_curve(np.random.default_rng(1), 2)
    diag = build_diagram(c, c, 100.0)
    g = build_graph_g(diag, place_grid(diag, 0.5))
    g.validate()
    assert np.all(g.forbidden_len == 0.0)


def test_fully_forbidden_graph_all_full_weight():
    t1 = make_curve([(0, 0), (1, 0), (2, 0.5)])
    t2 = make_curve([(0, 50), (1, 50)])
    diag = build_diagram(t1, t2, 0.5)
    g = build_graph_g(diag, place_grid(diag, 0.5))
    g.validate()
    assert np.allclose(g.forbidden_len, g.l1_len)


def test_edge_weights_match_midpoint_classification(rng):
    t1 = random_curve(rng, 2)
    t2 = random_curve(rng, 1, start=t1.vertices[0] + 0.2)
    diag = build_diagram(t1, t2, 0.8)
    g = build_graph_g(diag, place_grid(diag, 0.4))
    g.validate()
    pick = rng.choice(len(g.edges), size=min(1000, len(g.edges)), replace=False)
    src = g.edges[pick, 0]
    dst = g.edges[pick, 1]
    mx = 0.5 * (g.points[src, 0] + g.points[dst, 0])
    my = 0.5 * (g.points[src, 1] + g.points[dst, 1])
    free = diag.free_mask(mx, my)
    fb = g.forbidden_len[pick]
    # Diagonal (boundary-chord) edges are always free; axis edges follow the
    # midpoint rule exactly.
    axis = (g.points[src, 0] == g.points[dst, 0]) | \
        (g.points[src, 1] == g.points[dst, 1])
    assert np.all(fb[free] == 0.0)
    assert np.all(fb[axis & ~free] == g.l1_len[pick][axis & ~free])


def test_edge_purity_interior_samples(rng):
    diag = _fixture_diagram()
    g = build_graph_g(diag, place_grid(diag, 0.6))
    pick = rng.choice(len(g.edges), size=min(1000, len(g.edges)), replace=False)
    for k in pick:
        u, v = g.edges[k]
        a, b = g.points[u], g.points[v]
        ts = (np.arange(8) + 0.5) / 8.0
        xs = a[0] + ts * (b[0] - a[0])
        ys = a[1] + ts * (b[1] - a[1])
        states = diag.free_mask(xs, ys)
        assert states.all() or not states.any()


def test_monotone_length_law(rng):
    diag = _fixture_diagram()
    g = build_graph_g(diag, place_grid(diag, 0.7))
    order = np.lexsort((g.edges[:, 0], g.edges[:, 1]))
    src = g.edges[order, 0].tolist()
    dst = g.edges[order, 1].tolist()
    l1 = g.l1_len[order].tolist()
    n = g.vertex_count
    for u0 in rng.choice(n // 2, size=5, replace=False):
        lo = [np.inf] * n
        hi = [-np.inf] * n
        lo[u0] = hi[u0] = 0.0
        for u, v, w in zip(src, dst, l1):
            if lo[u] < np.inf:
                lo[v] = min(lo[v], lo[u] + w)
                hi[v] = max(hi[v], hi[u] + w)
        base = g.points[u0]
        tol = 1e-9 * (diag.W + diag.H)
        for v in range(n):
            if lo[v] < np.inf:
                want = (g.points[v, 0] - base[0]) + (g.points[v, 1] - base[1])
                assert abs(lo[v] - want) <= tol
                assert abs(hi[v] - want) <= tol


def test_graph_size_pure_line_arrangement():
    # Empty free space, one cell, delta = 1: only the four corner vertices
    # and the four boundary edges of the single cell remain.
    t1 = make_curve([(0, 0), (1, 0)])
    t2 = make_curve([(0, 5), (1, 5)])
    diag = build_diagram(t1, t2, 0.1)
    g = build_graph_g(diag, place_grid(diag, 1.0))
    assert graph_size_report(g) == (4, 4)


def test_graph_size_grid_product_when_no_crossings():
    t1 = make_curve([(0, 0), (1, 0)])
    t2 = make_curve([(0, 5), (1, 5)])
    diag = build_diagram(t1, t2, 0.1)
    lines = place_grid(diag, 0.25)
    g = build_graph_g(diag, lines)
    assert g.vertex_count == len(lines.xs) * len(lines.ys)


def test_vertex_count_scaling_when_halving_delta():
    diag = _fixture_diagram()
    counts = []
    for delta in (0.4, 0.2, 0.1):
        g = build_graph_g(diag, place_grid(diag, delta))
        counts.append(g.vertex_count)
    for a, b in zip(counts[:-1], counts[1:]):
        assert b <= 4.5 * a


def test_path_total_l1_is_curve_length_sum():
    from outlierfrechet import shortest_forbidden_path

    diag = _fixture_diagram()
    g = build_graph_g(diag, place_grid(diag, 0.5))
    sol = shortest_forbidden_path(g)
    seg = np.abs(np.diff(sol.polyline, axis=0))
    total = float((seg[:, 0] + seg[:, 1]).sum())
    assert total == pytest.approx(diag.W + diag.H, rel=1e-12)


def test_graph_json_dump(tmp_path):
    import json

    t1 = make_curve([(0, 0), (1, 0)])
    t2 = make_curve([(0, 0.4), (1, 0.4)])
    diag = build_diagram(t1, t2, 0.5)
    g = build_graph_g(diag, place_grid(diag, 1.0))
    out = tmp_path / "g.json"
    g.save_json(out)
    data = json.loads(out.read_text())
    assert set(data) == {"vertices", "edges"}
    assert set(data["vertices"][0]) == {"id", "x", "y"}
    assert set(data["edges"][0]) == {"src", "dst", "l1", "forbidden"}
