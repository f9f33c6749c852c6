"""Arrangement graph over the deformed diagram.

Construction: equidistant grid lines (plus the cell boundaries) are added to
the diagram; every crossing of such a line with a cell's free-space boundary
spawns an orthogonal intersection line through the crossing point.  The graph
vertices are the arrangement vertices of all lines and boundary curves, and
the directed edges are the xy-monotone arrangement edges.  Each edge carries
its L1 length and the portion of that length lying in forbidden space (by
construction an edge never crosses a free-space boundary in its interior, so
it is wholly free or wholly forbidden).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .freespace import DeformedDiagram

TAG_CELL_BOUNDARY = 1
TAG_EQUIDISTANT = 2
TAG_INTERSECTION = 4

KIND_GRID = 0
KIND_BOUNDARY = 1
KIND_STEINER = 2
KIND_CORNER = 3

# Coincident lines are merged within this fraction of (W + H).
LINE_MERGE_TOL_REL = 1e-12
# Boundary crossings within this fraction of (W + H) of an existing line (or
# of each other) are snapped together.
VERTEX_SNAP_TOL_REL = 1e-9


@dataclass(frozen=True)
class GridLines:
    """Vertical/horizontal line coordinates with provenance bitmasks."""

    xs: np.ndarray
    ys: np.ndarray
    x_tags: np.ndarray
    y_tags: np.ndarray
    delta: float

    def count(self, axis: str, tag: int) -> int:
        tags = self.x_tags if axis == "x" else self.y_tags
        return int(np.count_nonzero(tags & tag))


def _merge_lines(values: list[float], tags: list[int], tol: float):
    order = np.argsort(values, kind="stable")
    out_vals: list[float] = []
    out_tags: list[int] = []
    for idx in order:
        v, t = values[idx], tags[idx]
        if out_vals and v - out_vals[-1] <= tol:
            # Prefer the boundary/equidistant coordinate as the representative.
            if (t & (TAG_CELL_BOUNDARY | TAG_EQUIDISTANT)) and not (
                    out_tags[-1] & (TAG_CELL_BOUNDARY | TAG_EQUIDISTANT)):
                out_vals[-1] = v
            out_tags[-1] |= t
        else:
            out_vals.append(v)
            out_tags.append(t)
    return np.array(out_vals), np.array(out_tags, dtype=int)


def _cells_for_coord(bounds: np.ndarray, coord: float, tol: float) -> list[int]:
    """Indices of cells (columns or rows) whose closed range contains coord."""
    n = len(bounds) - 1
    k = int(np.searchsorted(bounds, coord, side="right")) - 1
    k = min(max(k, 0), n - 1)
    out = [k]
    if k > 0 and abs(coord - bounds[k]) <= tol:
        out.append(k - 1)
    if k + 1 < n and abs(coord - bounds[k + 1]) <= tol:
        out.append(k + 1)
    return out


def place_grid(diag: DeformedDiagram, delta: float) -> GridLines:
    """Equidistant grid lines plus one intersection line per crossing of a
    grid line with a free-space boundary.

    The equidistant family has ``max(2, ceil(n / delta))`` lines per
    direction spanning the diagram, boundary lines included; cell-boundary
    lines are always present and also spawn intersection lines.
    """
    if not (delta > 0.0 and np.isfinite(delta)):
        raise ValueError(f"grid parameter must be positive, got {delta}")
    n = diag.n1 + diag.n2
    k = max(2, math.ceil(n / delta))
    tol = LINE_MERGE_TOL_REL * (diag.W + diag.H)

    xs = list(np.linspace(0.0, diag.W, k))
    x_tags = [TAG_EQUIDISTANT] * k
    xs += [float(v) for v in diag.col_bounds]
    x_tags += [TAG_CELL_BOUNDARY] * len(diag.col_bounds)
    ys = list(np.linspace(0.0, diag.H, k))
    y_tags = [TAG_EQUIDISTANT] * k
    ys += [float(v) for v in diag.row_bounds]
    y_tags += [TAG_CELL_BOUNDARY] * len(diag.row_bounds)

    xs0, x_tags0 = _merge_lines(xs, x_tags, tol)
    ys0, y_tags0 = _merge_lines(ys, y_tags, tol)

    new_ys: list[float] = []
    for x in xs0:
        for i in _cells_for_coord(diag.col_bounds, x, tol):
            for j in range(diag.n2):
                for _, yc in diag.cells[i][j].line_crossings("vertical", x):
                    new_ys.append(yc)
    new_xs: list[float] = []
    for y in ys0:
        for j in _cells_for_coord(diag.row_bounds, y, tol):
            for i in range(diag.n1):
                for xc, _ in diag.cells[i][j].line_crossings("horizontal", y):
                    new_xs.append(xc)

    xs_all = list(xs0) + new_xs
    xt_all = list(x_tags0) + [TAG_INTERSECTION] * len(new_xs)
    ys_all = list(ys0) + new_ys
    yt_all = list(y_tags0) + [TAG_INTERSECTION] * len(new_ys)
    xs_f, xt_f = _merge_lines(xs_all, xt_all, tol)
    ys_f, yt_f = _merge_lines(ys_all, yt_all, tol)
    return GridLines(xs=xs_f, ys=ys_f, x_tags=xt_f, y_tags=yt_f, delta=delta)


class MonotoneGraph:
    """Directed acyclic graph of xy-monotone edges over the diagram.

    Vertices are stored in (x, y)-lexicographic order, which is a topological
    order.  Edge weights: ``l1_len`` is the L1 length, ``forbidden_len`` the
    portion of it lying in forbidden space (``0 <= forbidden_len <= l1_len``).
    """

    def __init__(self, points, kinds, edges, l1_len, forbidden_len,
                 s_id, t_id, diagram=None, cell_vertex_counts=None):
        self.points = points
        self.kinds = kinds
        self.edges = edges
        self.l1_len = l1_len
        self.forbidden_len = forbidden_len
        self.s_id = s_id
        self.t_id = t_id
        self.diagram = diagram
        self.cell_vertex_counts = cell_vertex_counts or {}
        for arr in (points, kinds, edges, l1_len, forbidden_len):
            arr.flags.writeable = False

    @property
    def vertex_count(self) -> int:
        return len(self.points)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def validate(self) -> None:
        """Structural checks used by the test suite."""
        pts = self.points
        src, dst = self.edges[:, 0], self.edges[:, 1]
        dx = pts[dst, 0] - pts[src, 0]
        dy = pts[dst, 1] - pts[src, 1]
        if len(dx) and (dx.min() < 0 or dy.min() < 0):
            raise AssertionError("non-monotone edge present")
        if len(dx) and np.any((dx == 0) & (dy == 0)):
            raise AssertionError("zero-length edge present")
        if np.any(self.forbidden_len < -1e-12) or np.any(
                self.forbidden_len > self.l1_len + 1e-9 * (1 + self.l1_len)):
            raise AssertionError("edge weight outside [0, l1_len]")
        # Lexicographic vertex order is topological for monotone edges.
        if len(src) and not np.all(src < dst):
            raise AssertionError("edges not aligned with topological order")

    def to_json_dict(self) -> dict:
        return {
            "vertices": [
                {"id": int(k), "x": float(x), "y": float(y)}
                for k, (x, y) in enumerate(self.points)
            ],
            "edges": [
                {"src": int(u), "dst": int(v), "l1": float(l),
                 "forbidden": float(w)}
                for (u, v), l, w in zip(self.edges, self.l1_len,
                                        self.forbidden_len)
            ],
        }

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)


def finalize_graph(coords, kinds, edge_chunks, diag,
                   cell_vertex_counts=None) -> MonotoneGraph:
    """Sort vertices lexicographically, remap edges, locate s and t."""
    coords = np.asarray(coords, dtype=float)
    kinds = np.asarray(kinds, dtype=np.uint8)
    order = np.lexsort((coords[:, 1], coords[:, 0]))
    inv = np.empty(len(order), dtype=np.int64)
    inv[order] = np.arange(len(order))
    coords = coords[order]
    kinds = kinds[order].copy()

    if edge_chunks:
        src = inv[np.concatenate([c[0] for c in edge_chunks])]
        dst = inv[np.concatenate([c[1] for c in edge_chunks])]
        l1 = np.concatenate([c[2] for c in edge_chunks]).astype(float)
        fb = np.concatenate([c[3] for c in edge_chunks]).astype(float)
    else:
        src = np.zeros(0, dtype=np.int64)
        dst = np.zeros(0, dtype=np.int64)
        l1 = np.zeros(0)
        fb = np.zeros(0)
    keep = l1 > 0
    edges = np.column_stack([src[keep], dst[keep]])
    l1 = l1[keep]
    fb = np.clip(fb[keep], 0.0, l1)

    s_id = 0
    t_id = len(coords) - 1
    tol = 1e-9 * (diag.W + diag.H)
    if abs(coords[s_id, 0]) > tol or abs(coords[s_id, 1]) > tol:
        raise AssertionError("diagram corner s missing from graph")
    if (abs(coords[t_id, 0] - diag.W) > tol
            or abs(coords[t_id, 1] - diag.H) > tol):
        raise AssertionError("diagram corner t missing from graph")
    for cx, cy in ((0.0, 0.0), (diag.W, 0.0), (0.0, diag.H), (diag.W, diag.H)):
        hit = np.flatnonzero((np.abs(coords[:, 0] - cx) <= tol)
                             & (np.abs(coords[:, 1] - cy) <= tol))
        if len(hit):
            kinds[hit[0]] = KIND_CORNER
    if cell_vertex_counts is not None:
        cell_vertex_counts = dict(cell_vertex_counts)
    return MonotoneGraph(coords, kinds, edges, l1, fb, s_id, t_id,
                         diagram=diag, cell_vertex_counts=cell_vertex_counts)


def boundary_crossings_by_line(diag: DeformedDiagram, lines: GridLines):
    """All crossings of the line arrangement with free-space boundaries.

    Returns ``(vcross, hcross)``: for each vertical line index a list of
    ``(y, cells)`` records (and symmetrically for horizontal lines), with
    near-coincident crossings on the same line merged and each record tagged
    with the parameter cells that produced it.
    """
    snap = VERTEX_SNAP_TOL_REL * (diag.W + diag.H)
    vcross_raw: dict[int, list[tuple[float, tuple[int, int]]]] = {}
    hcross_raw: dict[int, list[tuple[float, tuple[int, int]]]] = {}
    for i in range(diag.n1):
        for j in range(diag.n2):
            cell = diag.cells[i][j]
            if cell.is_empty:
                continue
            r = cell.rect
            lo = np.searchsorted(lines.xs, r.x0 - snap)
            hi = np.searchsorted(lines.xs, r.x1 + snap)
            for ix in range(lo, hi):
                for _, yc in cell.line_crossings("vertical", float(lines.xs[ix])):
                    vcross_raw.setdefault(ix, []).append((yc, (i, j)))
            lo = np.searchsorted(lines.ys, r.y0 - snap)
            hi = np.searchsorted(lines.ys, r.y1 + snap)
            for iy in range(lo, hi):
                for xc, _ in cell.line_crossings("horizontal", float(lines.ys[iy])):
                    hcross_raw.setdefault(iy, []).append((xc, (i, j)))

    def merge(raw):
        merged: dict[int, list[tuple[float, set]]] = {}
        for k, recs in raw.items():
            recs.sort(key=lambda r: r[0])
            groups: list[tuple[float, set]] = []
            for val, cell_id in recs:
                if groups and val - groups[-1][0] <= snap:
                    groups[-1][1].add(cell_id)
                else:
                    groups.append((val, {cell_id}))
            merged[k] = groups
        return merged

    return merge(vcross_raw), merge(hcross_raw)


def build_graph_g(diag: DeformedDiagram, lines: GridLines) -> MonotoneGraph:
    """Arrangement graph: all line crossings plus free-space boundary
    vertices, with monotone directed edges along lines and along boundary
    chains."""
    X, Y = lines.xs, lines.ys
    P, R = len(X), len(Y)
    snap = VERTEX_SNAP_TOL_REL * (diag.W + diag.H)

    vcross, hcross = boundary_crossings_by_line(diag, lines)

    coords = [np.column_stack([np.repeat(X, R), np.tile(Y, P)])]
    kinds = [np.zeros(P * R, dtype=np.uint8)]
    next_id = P * R
    extra_pts: list[tuple[float, float]] = []
    cell_buckets: dict[tuple[int, int], dict[int, tuple[float, float]]] = {}
    on_vline: dict[int, list[tuple[float, int]]] = {}
    on_hline: dict[int, list[tuple[float, int]]] = {}

    def grid_id(ix: int, iy: int) -> int:
        return ix * R + iy

    def snap_to(coords_arr: np.ndarray, value: float) -> int | None:
        pos = np.searchsorted(coords_arr, value)
        best, best_d = None, snap
        for cand in (pos - 1, pos):
            if 0 <= cand < len(coords_arr):
                d = abs(coords_arr[cand] - value)
                if d <= best_d:
                    best, best_d = cand, d
        return best

    for ix, groups in vcross.items():
        for y, cell_ids in groups:
            iy = snap_to(Y, y)
            if iy is not None:
                vid = grid_id(ix, iy)
                pt = (float(X[ix]), float(Y[iy]))
            else:
                vid = next_id
                next_id += 1
                pt = (float(X[ix]), float(y))
                extra_pts.append(pt)
                on_vline.setdefault(ix, []).append((pt[1], vid))
            for cid in cell_ids:
                cell_buckets.setdefault(cid, {})[vid] = pt
    for iy, groups in hcross.items():
        for x, cell_ids in groups:
            ix = snap_to(X, x)
            if ix is not None:
                vid = grid_id(ix, iy)
                pt = (float(X[ix]), float(Y[iy]))
            else:
                vid = next_id
                next_id += 1
                pt = (float(x), float(Y[iy]))
                extra_pts.append(pt)
                on_hline.setdefault(iy, []).append((pt[0], vid))
            for cid in cell_ids:
                cell_buckets.setdefault(cid, {})[vid] = pt

    if extra_pts:
        coords.append(np.array(extra_pts))
        kinds.append(np.full(len(extra_pts), KIND_BOUNDARY, dtype=np.uint8))
    all_coords = np.vstack(coords)
    all_kinds = np.concatenate(kinds)

    edge_chunks = []
    mid_chunks = []

    def add_line_edges(vals: np.ndarray, vids: np.ndarray, fixed: float,
                       vertical: bool):
        order = np.argsort(vals, kind="stable")
        vals = vals[order]
        vids = vids[order]
        dedup = np.concatenate([[True], np.diff(vids) != 0]) if len(vids) else \
            np.zeros(0, dtype=bool)
        vals, vids = vals[dedup], vids[dedup]
        if len(vals) < 2:
            return
        u, v = vids[:-1], vids[1:]
        l1 = np.diff(vals)
        keep = l1 > 0
        u, v, l1 = u[keep], v[keep], l1[keep]
        mids = 0.5 * (vals[:-1] + vals[1:])[keep]
        if vertical:
            mx = np.full(len(u), fixed)
            my = mids
        else:
            mx = mids
            my = np.full(len(u), fixed)
        edge_chunks.append((u, v, l1, None))
        mid_chunks.append((mx, my))

    grid_ids_v = np.arange(R)
    for ix in range(P):
        extra = on_vline.get(ix, [])
        vals = np.concatenate([Y, np.array([e[0] for e in extra])]) \
            if extra else Y
        vids = np.concatenate([grid_id(ix, grid_ids_v),
                               np.array([e[1] for e in extra], dtype=np.int64)]) \
            if extra else grid_id(ix, grid_ids_v)
        add_line_edges(vals.astype(float), vids.astype(np.int64),
                       float(X[ix]), vertical=True)
    for iy in range(R):
        extra = on_hline.get(iy, [])
        base_ids = np.arange(P) * R + iy
        vals = np.concatenate([X, np.array([e[0] for e in extra])]) \
            if extra else X
        vids = np.concatenate([base_ids,
                               np.array([e[1] for e in extra], dtype=np.int64)]) \
            if extra else base_ids
        add_line_edges(vals.astype(float), vids.astype(np.int64),
                       float(Y[iy]), vertical=False)

    # Classify line-edge midpoints in one vectorized pass; each edge lies in a
    # single cell, wholly free or wholly forbidden.
    if mid_chunks:
        mx = np.concatenate([m[0] for m in mid_chunks])
        my = np.concatenate([m[1] for m in mid_chunks])
        free = diag.free_mask(mx, my)
        pos = 0
        fixed_chunks = []
        for (u, v, l1, _), m in zip(edge_chunks, mid_chunks):
            k = len(u)
            fb = np.where(free[pos:pos + k], 0.0, l1)
            fixed_chunks.append((u, v, l1, fb))
            pos += k
        edge_chunks = fixed_chunks

    # Boundary chains: consecutive vertices along each free-space boundary
    # branch, joined by the monotone chords (chords of a convex free set stay
    # free, so they carry zero forbidden length).
    for (i, j), bucket in cell_buckets.items():
        if len(bucket) < 2:
            continue
        vids = np.fromiter(bucket.keys(), dtype=np.int64)
        pts = np.array([bucket[k] for k in bucket], dtype=float)
        cell = diag.cells[i][j]
        branch, key = cell.boundary_order(pts)
        order = np.lexsort((key, branch))
        vids, pts, branch = vids[order], pts[order], branch[order]
        closed = not cell.is_degenerate
        us, vs, l1s = [], [], []
        for b in np.unique(branch):
            sel = np.flatnonzero(branch == b)
            if len(sel) < 2:
                continue
            pairs = list(zip(sel[:-1], sel[1:]))
            if closed and len(sel) > 2:
                pairs.append((sel[-1], sel[0]))
            for a, c in pairs:
                dx = pts[c, 0] - pts[a, 0]
                dy = pts[c, 1] - pts[a, 1]
                if dx >= 0 and dy >= 0:
                    u, v = vids[a], vids[c]
                elif dx <= 0 and dy <= 0:
                    u, v = vids[c], vids[a]
                else:
                    continue
                l1 = abs(dx) + abs(dy)
                if l1 > 0:
                    us.append(u)
                    vs.append(v)
                    l1s.append(l1)
        if us:
            arr = np.array(l1s)
            edge_chunks.append((np.array(us, dtype=np.int64),
                                np.array(vs, dtype=np.int64),
                                arr, np.zeros(len(arr))))

    return finalize_graph(all_coords, all_kinds, edge_chunks, diag)


def graph_size_report(g: MonotoneGraph) -> tuple[int, int]:
    """Vertex and edge counts (used by the scaling acceptance checks)."""
    return g.vertex_count, g.edge_count
