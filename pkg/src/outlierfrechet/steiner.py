"""L1-distance-preserving Steiner graphs over convex boundaries.

`build_gprime` implements a median recursion over points on the boundary of a
convex region: the vertical median line is intersected with the region, points
between the two intersection heights are projected orthogonally onto the
median and chained, points above/below link through the chord endpoints, and
the construction recurses left and right of the median.  Any dominated pair
(p, q) with q up-and-right of p is then connected by a directed path of total
L1 length exactly |pq|_1, with only O(k log k) vertices and edges.

`build_graph_gstar` uses these graphs per parameter cell to shrink the
arrangement graph: vertices are kept only on cell boundaries and free-space
boundaries, free travel inside a cell goes through the median-recursion graph,
and forbidden travel uses axis-parallel projections onto the cell sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .freespace import DeformedDiagram, _overlap
from .grid_graph import (
    KIND_BOUNDARY,
    KIND_GRID,
    KIND_STEINER,
    MonotoneGraph,
    GridLines,
    boundary_crossings_by_line,
    finalize_graph,
    place_grid,
)

# Hard cap on boundary Steiner points; denser placements signal a spacing that
# the instance cannot support.
MAX_BOUNDARY_POINTS = 2_000_000


class EllipseRegion:
    """Axis-rotated ellipse used as a convex region for standalone
    median-recursion graphs (mainly exercised by the test suite)."""

    def __init__(self, cx, cy, rx, ry, theta=0.0):
        self.cx, self.cy = float(cx), float(cy)
        self.rx, self.ry = float(rx), float(ry)
        self.theta = float(theta)

    def boundary_point(self, phi: float) -> tuple[float, float]:
        c, s = math.cos(self.theta), math.sin(self.theta)
        ex = self.rx * math.cos(phi)
        ey = self.ry * math.sin(phi)
        return (self.cx + c * ex - s * ey, self.cy + s * ex + c * ey)

    def vertical_interval(self, x: float):
        c, s = math.cos(self.theta), math.sin(self.theta)
        dx = x - self.cx
        # Local coords u = (c*dx + s*dy)/rx, v = (-s*dx + c*dy)/ry, u^2+v^2<=1.
        a = (s / self.rx) ** 2 + (c / self.ry) ** 2
        b = 2.0 * (c * dx * s / self.rx ** 2 - s * dx * c / self.ry ** 2)
        cc = (c * dx / self.rx) ** 2 + (s * dx / self.ry) ** 2 - 1.0
        disc = b * b - 4.0 * a * cc
        if disc < 0:
            if disc > -1e-12 * max(b * b, abs(4 * a * cc), 1.0):
                disc = 0.0
            else:
                return None
        r = math.sqrt(disc)
        return (self.cy + (-b - r) / (2 * a), self.cy + (-b + r) / (2 * a))

    @property
    def diameter(self) -> float:
        return 2.0 * max(self.rx, self.ry)


@dataclass
class SteinerGraph:
    """Result of the median recursion: input points first, Steiner points
    after, with directed monotone edges weighted by L1 length."""

    points: np.ndarray
    vertices: np.ndarray
    depth: np.ndarray
    edges: np.ndarray
    l1_len: np.ndarray

    @property
    def size(self) -> int:
        return len(self.vertices) + len(self.edges)

    def distances_from(self, src: int) -> np.ndarray:
        """Shortest unweighted-L1 distances from one vertex to all others."""
        n = len(self.vertices)
        order = np.lexsort((self.vertices[:, 1], self.vertices[:, 0]))
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        if len(self.edges):
            idx = np.lexsort((rank[self.edges[:, 0]], rank[self.edges[:, 1]]))
            es = self.edges[idx]
            ws = self.l1_len[idx]
        else:
            es = self.edges
            ws = self.l1_len
        dist = np.full(n, np.inf)
        dist[src] = 0.0
        for (u, v), w in zip(es, ws):
            d = dist[u] + w
            if d < dist[v]:
                dist[v] = d
        return dist


def _gprime_recurse(region, xs, ys, ids, lo, hi, depth,
                    add_vertex, add_edge, tol):
    """One level of the median recursion on the slice [lo, hi) (sorted by x)."""
    if hi - lo <= 1:
        return
    mid = (lo + hi) // 2
    mx = float(xs[mid])
    left_end = int(np.searchsorted(xs[lo:hi], mx, side="left")) + lo
    right_start = int(np.searchsorted(xs[lo:hi], mx, side="right")) + lo

    iv = region.vertical_interval(mx)
    on_m = ys[left_end:right_start]
    if iv is None:
        ylo = float(on_m.min()) if len(on_m) else float(ys[mid])
        yhi = float(on_m.max()) if len(on_m) else float(ys[mid])
    else:
        ylo, yhi = float(iv[0]), float(iv[1])
        if len(on_m):
            ylo = min(ylo, float(on_m.min()))
            yhi = max(yhi, float(on_m.max()))
    m2 = add_vertex(mx, ylo, depth)
    m1 = add_vertex(mx, yhi, depth)

    chain: list[tuple[float, int]] = [(ylo, m2), (yhi, m1)]
    for k in range(lo, hi):
        px, py, pid = float(xs[k]), float(ys[k]), int(ids[k])
        if py > yhi + tol:
            if px >= mx:
                add_edge(m1, pid)
        elif py < ylo - tol:
            if px <= mx:
                add_edge(pid, m2)
        else:
            proj = add_vertex(mx, py, depth)
            if proj != pid:
                if px <= mx:
                    add_edge(pid, proj)
                else:
                    add_edge(proj, pid)
            chain.append((py, proj))
    chain.sort(key=lambda e: (e[0], e[1]))
    for (ya, ua), (yb, ub) in zip(chain[:-1], chain[1:]):
        if ua != ub:
            add_edge(ua, ub)

    _gprime_recurse(region, xs, ys, ids, lo, left_end, depth + 1,
                    add_vertex, add_edge, tol)
    _gprime_recurse(region, xs, ys, ids, right_start, hi, depth + 1,
                    add_vertex, add_edge, tol)


def build_gprime(region, points) -> SteinerGraph:
    """Median-recursion graph over points on a convex region's boundary.

    For every dominated pair ``p_i < p_j`` (componentwise) the graph contains
    a directed path of total length ``|p_i p_j|_1``; total size is
    O(k log k).
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    k = len(points)
    verts: list[tuple[float, float]] = [tuple(p) for p in points]
    depth: list[int] = [-1] * k
    index: dict[tuple[float, float], int] = {}
    for idx, p in enumerate(verts):
        index.setdefault(p, idx)
    edges: list[tuple[int, int]] = []

    def add_vertex(x: float, y: float, d: int) -> int:
        key = (x, y)
        vid = index.get(key)
        if vid is None:
            vid = len(verts)
            verts.append(key)
            depth.append(d)
            index[key] = vid
        return vid

    def add_edge(u: int, v: int) -> None:
        if u != v:
            edges.append((u, v))

    if k:
        order = np.lexsort((points[:, 1], points[:, 0]))
        xs = points[order, 0].copy()
        ys = points[order, 1].copy()
        ids = order.astype(np.int64)
        span = max(xs.max() - xs.min(), ys.max() - ys.min(), 1e-300)
        _gprime_recurse(region, xs, ys, ids, 0, k, 0,
                        add_vertex, add_edge, 1e-12 * span)

    varr = np.array(verts, dtype=float) if verts else np.zeros((0, 2))
    earr = np.array(edges, dtype=np.int64) if edges else np.zeros((0, 2), dtype=np.int64)
    if len(earr):
        d = varr[earr[:, 1]] - varr[earr[:, 0]]
        l1 = np.abs(d[:, 0]) + np.abs(d[:, 1])
    else:
        l1 = np.zeros(0)
    return SteinerGraph(points=points, vertices=varr,
                        depth=np.array(depth, dtype=int),
                        edges=earr, l1_len=l1)


class _BoundaryGraphBuilder:
    """Shared assembly for per-cell boundary graphs."""

    def __init__(self, diag: DeformedDiagram):
        self.diag = diag
        self.coords: list[tuple[float, float]] = []
        self.kinds: list[int] = []
        self.index: dict[tuple[float, float], int] = {}
        self.eu: list[int] = []
        self.ev: list[int] = []
        self.el1: list[float] = []
        self.efb: list[float] = []
        # side registries: vertical boundary (bi, j) and horizontal (i, bj)
        self.vsides: dict[tuple[int, int], dict[int, float]] = {}
        self.hsides: dict[tuple[int, int], dict[int, float]] = {}

    def vertex(self, x: float, y: float, kind: int) -> int:
        # Exact-coordinate dedup only: shared side vertices are computed from
        # the same floats, while independently computed near-duplicates stay
        # distinct and get joined by tiny monotone edges.
        key = (x, y)
        vid = self.index.get(key)
        if vid is None:
            vid = len(self.coords)
            self.coords.append((x, y))
            self.kinds.append(kind)
            self.index[key] = vid
        return vid

    def point(self, vid: int) -> tuple[float, float]:
        return self.coords[vid]

    def edge(self, u: int, v: int, fb: float) -> None:
        if u == v:
            return
        pu, pv = self.coords[u], self.coords[v]
        l1 = abs(pv[0] - pu[0]) + abs(pv[1] - pu[1])
        if l1 <= 0.0:
            return
        self.eu.append(u)
        self.ev.append(v)
        self.el1.append(l1)
        self.efb.append(min(max(fb, 0.0), l1))

    def side_vertex(self, kind_key: str, a: int, b: int, x: float, y: float,
                    vkind: int = KIND_GRID) -> int:
        vid = self.vertex(x, y, vkind)
        if kind_key == "v":
            self.vsides.setdefault((a, b), {})[vid] = y
        else:
            self.hsides.setdefault((a, b), {})[vid] = x
        return vid

    def finish(self, cell_vertex_counts) -> MonotoneGraph:
        chunks = []
        if self.eu:
            chunks.append((np.array(self.eu, dtype=np.int64),
                           np.array(self.ev, dtype=np.int64),
                           np.array(self.el1), np.array(self.efb)))
        return finalize_graph(np.array(self.coords, dtype=float),
                              np.array(self.kinds, dtype=np.uint8),
                              chunks, self.diag,
                              cell_vertex_counts=cell_vertex_counts)


def _span_overlap_union(spans, lo: float, hi: float) -> float:
    """Length of [lo, hi] covered by the union of up to two intervals."""
    ivs = [s for s in spans if s is not None]
    if not ivs:
        return 0.0
    if len(ivs) == 1:
        return _overlap(ivs[0][0], ivs[0][1], lo, hi)
    a, b = ivs
    inter_lo, inter_hi = max(a[0], b[0]), min(a[1], b[1])
    total = (_overlap(a[0], a[1], lo, hi) + _overlap(b[0], b[1], lo, hi))
    if inter_lo < inter_hi:
        total -= _overlap(inter_lo, inter_hi, lo, hi)
    return total


def _assemble_boundary_graph(diag: DeformedDiagram,
                             conic_pts_per_cell: dict,
                             lines: GridLines | None) -> MonotoneGraph:
    """Per-cell boundary graph: median-recursion graphs inside free regions,
    axis-parallel projections through forbidden space, and weighted edges
    along cell sides; cells are glued at shared side vertices."""
    b = _BoundaryGraphBuilder(diag)
    colb, rowb = diag.col_bounds, diag.row_bounds
    n1, n2 = diag.n1, diag.n2

    # Corners of every cell.
    for bi in range(n1 + 1):
        for bj in range(n2 + 1):
            x, y = float(colb[bi]), float(rowb[bj])
            vid = b.vertex(x, y, KIND_GRID)
            if bj < n2:
                b.vsides.setdefault((bi, bj), {})[vid] = y
            if bj > 0:
                b.vsides.setdefault((bi, bj - 1), {})[vid] = y
            if bi < n1:
                b.hsides.setdefault((bi, bj), {})[vid] = x
            if bi > 0:
                b.hsides.setdefault((bi - 1, bj), {})[vid] = x

    # Grid/intersection line crossings with every cell side.
    if lines is not None:
        snap = 1e-12 * (diag.W + diag.H)
        for bi in range(n1 + 1):
            x = float(colb[bi])
            for j in range(n2):
                lo = np.searchsorted(lines.ys, rowb[j] + snap)
                hi = np.searchsorted(lines.ys, rowb[j + 1] - snap)
                for iy in range(lo, hi):
                    b.side_vertex("v", bi, j, x, float(lines.ys[iy]))
        for bj in range(n2 + 1):
            y = float(rowb[bj])
            for i in range(n1):
                lo = np.searchsorted(lines.xs, colb[i] + snap)
                hi = np.searchsorted(lines.xs, colb[i + 1] - snap)
                for ix in range(lo, hi):
                    b.side_vertex("h", i, bj, float(lines.xs[ix]), y)

    # Free-space boundary points and their four projections.
    cell_conic_ids: dict[tuple[int, int], list[int]] = {}
    for (i, j), pts in conic_pts_per_cell.items():
        cell = diag.cells[i][j]
        r = cell.rect
        ids: list[int] = []
        for x, y in pts:
            vid = b.vertex(float(x), float(y), KIND_BOUNDARY)
            ids.append(vid)
            vx, vy = b.point(vid)
            xs_span = cell.x_span(vy)
            ys_span = cell.y_span(vx)
            # left projection -> v
            left = b.side_vertex("v", i, j, r.x0, vy)
            fb = (vx - r.x0) - _span_overlap_union([xs_span], r.x0, vx)
            b.edge(left, vid, fb)
            # v -> right projection
            right = b.side_vertex("v", i + 1, j, r.x1, vy)
            fb = (r.x1 - vx) - _span_overlap_union([xs_span], vx, r.x1)
            b.edge(vid, right, fb)
            # bottom projection -> v
            bottom = b.side_vertex("h", i, j, vx, r.y0)
            fb = (vy - r.y0) - _span_overlap_union([ys_span], r.y0, vy)
            b.edge(bottom, vid, fb)
            # v -> top projection
            top = b.side_vertex("h", i, j + 1, vx, r.y1)
            fb = (r.y1 - vy) - _span_overlap_union([ys_span], vy, r.y1)
            b.edge(vid, top, fb)
        cell_conic_ids[(i, j)] = ids

    # Median-recursion graph per cell over free boundary vertices: the
    # free-space boundary points plus every free vertex on the cell sides
    # (all of them lie on the boundary of the convex free region).
    steiner_counts: dict[tuple[int, int], int] = {}
    for i in range(n1):
        for j in range(n2):
            cell = diag.cells[i][j]
            if cell.is_empty:
                continue
            cand: dict[int, tuple[float, float]] = {}
            for vid in cell_conic_ids.get((i, j), ()):
                cand[vid] = b.point(vid)
            for key, reg in (((i, j), b.vsides), ((i + 1, j), b.vsides),
                             ((i, j), b.hsides), ((i, j + 1), b.hsides)):
                for vid in reg.get(key, ()):
                    cand[vid] = b.point(vid)
            ids = [vid for vid, (x, y) in cand.items()
                   if cell.margin(x, y) <= cell.tol]
            if len(ids) < 2:
                steiner_counts[(i, j)] = 0
                continue
            pts = np.array([b.point(v) for v in ids])
            order = np.lexsort((pts[:, 1], pts[:, 0]))
            xs = pts[order, 0].copy()
            ys = pts[order, 1].copy()
            idarr = np.array(ids, dtype=np.int64)[order]
            before = len(b.coords)

            def add_vertex(x, y, d):
                return b.vertex(x, y, KIND_STEINER)

            def add_edge(u, v):
                b.edge(u, v, 0.0)

            _gprime_recurse(cell, xs, ys, idarr, 0, len(ids), 0,
                            add_vertex, add_edge,
                            1e-12 * (cell.rect.width + cell.rect.height))
            steiner_counts[(i, j)] = len(b.coords) - before

    # Directed edges between consecutive vertices on each cell side, weighted
    # by the forbidden portion (free if free in either adjacent cell).
    for (bi, j), reg in b.vsides.items():
        x = float(colb[bi])
        spans = []
        for ii in (bi - 1, bi):
            if 0 <= ii < n1:
                spans.append(diag.cells[ii][j].y_span(x))
        items = sorted(reg.items(), key=lambda kv: (kv[1], kv[0]))
        for (u, ya), (v, yb) in zip(items[:-1], items[1:]):
            if u == v or yb <= ya:
                continue
            fb = (yb - ya) - _span_overlap_union(spans, ya, yb)
            b.edge(u, v, fb)
    for (i, bj), reg in b.hsides.items():
        y = float(rowb[bj])
        spans = []
        for jj in (bj - 1, bj):
            if 0 <= jj < n2:
                spans.append(diag.cells[i][jj].x_span(y))
        items = sorted(reg.items(), key=lambda kv: (kv[1], kv[0]))
        for (u, xa), (v, xb) in zip(items[:-1], items[1:]):
            if u == v or xb <= xa:
                continue
            fb = (xb - xa) - _span_overlap_union(spans, xa, xb)
            b.edge(u, v, fb)

    # Per-cell vertex counts: free-boundary points, their Steiner points, and
    # the vertices on the four cell sides.
    counts: dict[tuple[int, int], int] = {}
    for i in range(n1):
        for j in range(n2):
            seen = set(cell_conic_ids.get((i, j), ()))
            for key, reg in (((i, j), b.vsides), ((i + 1, j), b.vsides),
                             ((i, j), b.hsides), ((i, j + 1), b.hsides)):
                seen.update(reg.get(key, ()))
            counts[(i, j)] = len(seen) + steiner_counts.get((i, j), 0)

    return b.finish(counts)


def build_graph_gstar(diag: DeformedDiagram, delta: float) -> MonotoneGraph:
    """Reduced graph: grid construction restricted to cell sides and
    free-space boundaries, with median-recursion graphs providing exact free
    travel inside each cell."""
    lines = place_grid(diag, delta)
    vcross, hcross = boundary_crossings_by_line(diag, lines)
    conic: dict[tuple[int, int], list[tuple[float, float]]] = {}
    for ix, groups in vcross.items():
        x = float(lines.xs[ix])
        for y, cell_ids in groups:
            for cid in cell_ids:
                conic.setdefault(cid, []).append((x, float(y)))
    for iy, groups in hcross.items():
        y = float(lines.ys[iy])
        for x, cell_ids in groups:
            for cid in cell_ids:
                conic.setdefault(cid, []).append((float(x), y))
    return _assemble_boundary_graph(diag, conic, lines)


def equally_spaced_boundary_points(cell, spacing: float) -> np.ndarray:
    """Points along the cell's free-space boundary with gaps <= spacing."""
    pts: list[np.ndarray] = []
    for arc in cell.boundary_arcs(max_gap=spacing / 4.0):
        seg = np.diff(arc, axis=0)
        step_len = np.abs(seg[:, 0]) + np.abs(seg[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(step_len)])
        total = cum[-1]
        if total <= 0:
            pts.append(arc[:1])
            continue
        count = max(2, int(math.ceil(total / spacing)) + 1)
        targets = np.linspace(0.0, total, count)
        xi = np.interp(targets, cum, arc[:, 0])
        yi = np.interp(targets, cum, arc[:, 1])
        pts.append(np.column_stack([xi, yi]))
    if not pts:
        return np.zeros((0, 2))
    return np.vstack(pts)


def build_gstar_spaced(diag: DeformedDiagram, spacing: float) -> MonotoneGraph:
    """Boundary graph built from equally spaced free-boundary points instead
    of line crossings (the relative-guarantee pipeline)."""
    if not (spacing > 0 and np.isfinite(spacing)):
        raise ValueError(f"spacing must be positive, got {spacing}")
    conic: dict[tuple[int, int], list[tuple[float, float]]] = {}
    total = 0
    for i in range(diag.n1):
        for j in range(diag.n2):
            cell = diag.cells[i][j]
            if cell.is_empty:
                continue
            pts = equally_spaced_boundary_points(cell, spacing)
            total += len(pts)
            if total > MAX_BOUNDARY_POINTS:
                raise RuntimeError(
                    f"boundary spacing {spacing:g} needs more than "
                    f"{MAX_BOUNDARY_POINTS} points; relax delta or epsilon")
            if len(pts):
                conic[(i, j)] = [tuple(p) for p in pts]
    return _assemble_boundary_graph(diag, conic, lines=None)


def gstar_cell_vertex_count(g: MonotoneGraph, i: int, j: int) -> int:
    """Number of graph vertices contributed by one parameter cell."""
    return g.cell_vertex_counts[(i, j)]
