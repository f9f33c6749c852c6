"""Monotone path solvers over the deformed diagram.

One topological relaxation over the directed acyclic graph serves both
problems: every monotone path from corner to corner has the same total L1
length (the sum of the two curve lengths), so the path minimizing forbidden
length simultaneously maximizes free length.  The solved path embeds directly
into the diagram and decomposes into free/forbidden pieces, from which
shortcut curves are constructed by replacing each ignored subcurve with the
straight segment between its endpoints.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .curves import PolygonalCurve
from .freespace import DeformedDiagram, build_diagram, _quad_span
from .grid_graph import MonotoneGraph, build_graph_g, place_grid
from .steiner import build_graph_gstar, build_gstar_spaced


class EndpointSeparationError(ValueError):
    """Start or end points of the two curves are farther apart than the
    leash, so shortcut curves realizing the solution do not exist."""

    def __init__(self, which: str, distance: float, epsilon: float):
        self.which = which
        self.distance = distance
        self.epsilon = epsilon
        super().__init__(
            f"{which} points are {distance:.6g} apart, beyond the leash "
            f"length {epsilon:.6g}")


@dataclass
class PathSolution:
    """An xy-monotone corner-to-corner path with its quality values.

    ``polyline`` contains the embedded path including free/forbidden split
    points; ``piece_free[k]`` labels the segment from ``polyline[k]`` to
    ``polyline[k+1]``.  ``quality_B + quality_W`` equals the total curve
    length up to numerical bookkeeping error.
    """

    polyline: np.ndarray
    piece_free: np.ndarray
    quality_B: float
    quality_W: float
    epsilon: float
    delta: float | None = None
    algorithm: str = ""
    guarantee_additive: float | None = None
    graph_vertices: int = 0
    graph_edges: int = 0

    def segments(self):
        for k in range(len(self.piece_free)):
            yield self.polyline[k], self.polyline[k + 1], bool(self.piece_free[k])

    def to_json_dict(self) -> dict:
        return {
            "quality_B": float(self.quality_B),
            "quality_W": float(self.quality_W),
            "path": [[float(x), float(y)] for x, y in self.polyline],
            "algorithm": self.algorithm,
            "delta": self.delta,
            "epsilon": float(self.epsilon),
            "guarantee": {"additive": self.guarantee_additive},
        }


def _union_intervals(spans):
    """Union of intervals as a sorted list of disjoint (lo, hi)."""
    ivs = sorted(s for s in spans if s is not None)
    out: list[list[float]] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return out


def _segment_pieces(diag: DeformedDiagram, p, q):
    """Split one monotone segment into (point, point, free) pieces.

    The segment must lie within a single cell (or on a shared boundary, where
    it is free if free in either adjacent cell) -- true for every edge the
    graph builders produce.
    """
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    length = abs(dx) + abs(dy)
    if length == 0.0:
        return []
    mid = (0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]))
    cells = diag.cells_containing(mid[0], mid[1])
    margins = []
    for c in cells:
        margins.append(max(c.margin(*p), c.margin(*q), c.margin(*mid)) - c.tol)
    if min(margins) <= 0.0:
        # Endpoints and midpoint free in one cell: chords of a convex free
        # set stay free, so skip root finding (robust near tangency).
        return [(tuple(p), tuple(q), True)]
    spans = []
    for c in cells:
        s = c.segment_free_tspan(p, q)
        if s is not None:
            lo, hi = max(s[0], 0.0), min(s[1], 1.0)
            if lo < hi:
                spans.append((lo, hi))
    union = _union_intervals(spans)
    cuts = [0.0]
    for lo, hi in union:
        cuts += [lo, hi]
    cuts.append(1.0)
    cuts = sorted(set(cuts))
    pieces = []
    for ta, tb in zip(cuts[:-1], cuts[1:]):
        if tb - ta <= 0.0:
            continue
        tm = 0.5 * (ta + tb)
        free = any(lo - 1e-12 <= tm <= hi + 1e-12 for lo, hi in union)
        pa = (p[0] + ta * dx, p[1] + ta * dy)
        pb = (p[0] + tb * dx, p[1] + tb * dy)
        pieces.append((pa, pb, free))
    return pieces


def shortest_forbidden_path(g: MonotoneGraph) -> PathSolution:
    """Minimum-forbidden-length monotone path from s to t.

    Single relaxation pass in topological (lexicographic) order; ties prefer
    the lexicographically smaller predecessor for reproducible output.  The
    same path maximizes free length, since all monotone corner-to-corner
    paths share the same total L1 length.
    """
    diag = g.diagram
    if diag is None:
        raise ValueError("graph carries no diagram; build it from a diagram")
    n = g.vertex_count
    order = np.lexsort((g.edges[:, 0], g.edges[:, 1]))
    srcl = g.edges[order, 0].tolist()
    dstl = g.edges[order, 1].tolist()
    wl = g.forbidden_len[order].tolist()
    inf = math.inf
    dist = [inf] * n
    pred = [-1] * n
    dist[g.s_id] = 0.0
    for u, v, w in zip(srcl, dstl, wl):
        du = dist[u]
        if du == inf:
            continue
        nd = du + w
        if nd < dist[v]:
            dist[v] = nd
            pred[v] = u
    if dist[g.t_id] == inf:
        raise RuntimeError("corner t unreachable: graph construction error")

    ids = [g.t_id]
    while ids[-1] != g.s_id:
        prev = pred[ids[-1]]
        if prev < 0:
            raise RuntimeError("broken predecessor chain")
        ids.append(prev)
    ids.reverse()
    verts = g.points[ids]

    pts: list[tuple[float, float]] = [tuple(verts[0])]
    labels: list[bool] = []
    for a, b in zip(verts[:-1], verts[1:]):
        for pa, pb, free in _segment_pieces(diag, a, b):
            if labels and labels[-1] == free:
                pts[-1] = pb
            else:
                pts.append(pb)
                labels.append(free)
    polyline = np.array(pts)
    piece_free = np.array(labels, dtype=bool)
    seg = np.abs(np.diff(polyline, axis=0))
    lens = seg[:, 0] + seg[:, 1] if len(seg) else np.zeros(0)
    quality_w = float(lens[piece_free].sum()) if len(lens) else 0.0
    return PathSolution(
        polyline=polyline,
        piece_free=piece_free,
        quality_B=float(dist[g.t_id]),
        quality_W=quality_w,
        epsilon=diag.eps,
        graph_vertices=g.vertex_count,
        graph_edges=g.edge_count,
    )


def _pipeline(t1, t2, eps, delta, algorithm, metric) -> PathSolution:
    if not (np.isfinite(eps) and eps >= 0):
        raise ValueError(f"epsilon must be finite and >= 0, got {eps}")
    if not (np.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be finite and > 0, got {delta}")
    diag = build_diagram(t1, t2, eps, metric)
    # The grid is refined by the constant from the per-cell detour bound so
    # the end-to-end additive error stays within delta * max curve length.
    grid_param = delta / 16.0
    if algorithm == "grid":
        g = build_graph_g(diag, place_grid(diag, grid_param))
    elif algorithm == "steiner":
        g = build_graph_gstar(diag, grid_param)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    sol = shortest_forbidden_path(g)
    sol.delta = delta
    sol.algorithm = algorithm
    sol.guarantee_additive = delta * max(t1.length, t2.length)
    return sol


def solve_minex(t1: PolygonalCurve, t2: PolygonalCurve, eps: float,
                delta: float, algorithm: str = "steiner",
                metric: str = "l2") -> PathSolution:
    """Minimize total ignored curve length for leash ``eps``.

    Returns a solution whose ``quality_B`` is within an additive
    ``delta * max(|T1|, |T2|)`` of the optimum; ``algorithm`` selects the
    full arrangement graph ("grid") or the reduced per-cell boundary graph
    ("steiner", default, much smaller for the same guarantee).
    """
    return _pipeline(t1, t2, eps, delta, algorithm, metric)


def solve_maxin(t1: PolygonalCurve, t2: PolygonalCurve, eps: float,
                delta: float, algorithm: str = "steiner",
                metric: str = "l2") -> PathSolution:
    """Maximize total matched curve length for leash ``eps``.

    Identical pipeline to `solve_minex` (one search serves both problems);
    the relevant output is ``quality_W``, which is within an additive
    ``delta * max(|T1|, |T2|)`` below the optimum.
    """
    return _pipeline(t1, t2, eps, delta, algorithm, metric)


@dataclass
class ShortcutCurves:
    """Curves obtained by replacing ignored subcurves with straight segments."""

    curve_a: PolygonalCurve
    curve_b: PolygonalCurve
    replaced_a: list[tuple[float, float]]
    replaced_b: list[tuple[float, float]]
    replaced_length: float


def _forbidden_runs(sol: PathSolution, scale: float):
    """Maximal forbidden runs of the solution path, with grazing free runs
    (length below 1e-12 of the diagram size) absorbed."""
    seg = np.abs(np.diff(sol.polyline, axis=0))
    lens = seg[:, 0] + seg[:, 1]
    runs = []  # [free, start_idx, end_idx (exclusive), length]
    for k, free in enumerate(sol.piece_free):
        if runs and runs[-1][0] == bool(free):
            runs[-1][2] = k + 1
            runs[-1][3] += float(lens[k])
        else:
            runs.append([bool(free), k, k + 1, float(lens[k])])
    tiny = 1e-12 * scale
    changed = True
    while changed:
        changed = False
        for idx, run in enumerate(runs):
            if not run[0] or run[3] >= tiny:
                continue
            prev_fb = idx > 0 and not runs[idx - 1][0]
            next_fb = idx + 1 < len(runs) and not runs[idx + 1][0]
            if prev_fb or next_fb:
                run[0] = False
                merged = []
                for r in runs:
                    if merged and merged[-1][0] == r[0]:
                        merged[-1][2] = r[2]
                        merged[-1][3] += r[3]
                    else:
                        merged.append(r)
                runs = merged
                changed = True
                break
    out = []
    for free, a, bnd, _ in runs:
        if not free:
            out.append((sol.polyline[a], sol.polyline[bnd]))
    return out


def _apply_shortcuts(curve: PolygonalCurve, intervals) -> PolygonalCurve:
    from .curves import make_curve

    tol = 1e-12 * max(curve.length, 1.0)
    merged: list[list[float]] = []
    for s0, s1 in sorted(intervals):
        s0 = max(0.0, min(s0, curve.length))
        s1 = max(0.0, min(s1, curve.length))
        if s1 - s0 <= 0.0:
            continue
        if merged and s0 <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], s1)
        else:
            merged.append([s0, s1])
    pts: list[np.ndarray] = []
    pos = 0
    cum = curve.cum_len
    for s0, s1 in merged:
        while pos < len(cum) and cum[pos] < s0 - tol:
            pts.append(curve.vertices[pos])
            pos += 1
        pts.append(curve.point_at_arclength(s0))
        pts.append(curve.point_at_arclength(s1))
        while pos < len(cum) and cum[pos] <= s1 + tol:
            pos += 1
    while pos < len(cum):
        pts.append(curve.vertices[pos])
        pos += 1
    return make_curve(np.array(pts))


def build_shortcut_curves(t1: PolygonalCurve, t2: PolygonalCurve,
                          sol: PathSolution, eps: float) -> ShortcutCurves:
    """Replace the subcurves matched through forbidden space by straight
    segments; the resulting pair has Fréchet distance at most ``eps``.

    Requires start and end point pairs within the leash (each maximal
    forbidden run then starts and ends at matched pairs within distance
    ``eps``, so replacing both subcurves by segments keeps the matching
    within the leash).
    """
    eps_eff = eps * (1.0 + 1e-12)
    d_start = float(np.hypot(*(t1.vertices[0] - t2.vertices[0])))
    if d_start > eps_eff:
        raise EndpointSeparationError("start", d_start, eps)
    d_end = float(np.hypot(*(t1.vertices[-1] - t2.vertices[-1])))
    if d_end > eps_eff:
        raise EndpointSeparationError("end", d_end, eps)

    runs = _forbidden_runs(sol, t1.length + t2.length)
    ints_a = [(float(a[0]), float(b[0])) for a, b in runs if b[0] - a[0] > 0]
    ints_b = [(float(a[1]), float(b[1])) for a, b in runs if b[1] - a[1] > 0]
    replaced = sum(b[0] - a[0] + b[1] - a[1] for a, b in runs)
    return ShortcutCurves(
        curve_a=_apply_shortcuts(t1, ints_a),
        curve_b=_apply_shortcuts(t2, ints_b),
        replaced_a=ints_a,
        replaced_b=ints_b,
        replaced_length=float(replaced),
    )


def _point_segment_interval(p, q0, q1, eps):
    d = q1 - q0
    w = p - q0
    dd = float(d @ d)
    b = -2.0 * float(w @ d) / dd
    c = (float(w @ w) - eps * eps) / dd
    span = _quad_span(b, c)
    if span is None:
        return None
    lo, hi = max(span[0], 0.0), min(span[1], 1.0)
    return (lo, hi) if lo <= hi else None


def frechet_decision(t1: PolygonalCurve, t2: PolygonalCurve, eps: float) -> bool:
    """Standard free-space reachability decision: is there a monotone
    corner-to-corner path entirely within free space (Fréchet distance at
    most ``eps``)?"""
    eps_eff = eps * (1.0 + 1e-12)
    P, Q = t1.vertices, t2.vertices
    n1, n2 = t1.n_segments, t2.n_segments
    if float(np.hypot(*(P[0] - Q[0]))) > eps_eff:
        return False
    if float(np.hypot(*(P[-1] - Q[-1]))) > eps_eff:
        return False
    tol = 1e-12

    L = [[_point_segment_interval(P[i], Q[j], Q[j + 1], eps_eff)
          for j in range(n2)] for i in range(n1 + 1)]
    B = [[_point_segment_interval(Q[j], P[i], P[i + 1], eps_eff)
          for i in range(n1)] for j in range(n2 + 1)]

    RL = [[None] * n2 for _ in range(n1 + 1)]
    RB = [[None] * (n2 + 1) for _ in range(n1)]
    ok = True
    for j in range(n2):
        iv = L[0][j] if ok else None
        if iv is None or iv[0] > tol:
            ok = False
        else:
            RL[0][j] = (0.0, iv[1])
            ok = iv[1] >= 1.0 - tol
    ok = True
    for i in range(n1):
        iv = B[0][i] if ok else None
        if iv is None or iv[0] > tol:
            ok = False
        else:
            RB[i][0] = (0.0, iv[1])
            ok = iv[1] >= 1.0 - tol

    for i in range(n1):
        for j in range(n2):
            left, bottom = RL[i][j], RB[i][j]
            if left is None and bottom is None:
                continue
            freeR = L[i + 1][j]
            if freeR is not None:
                if bottom is not None:
                    RL[i + 1][j] = freeR
                else:
                    lo = max(freeR[0], left[0])
                    if lo <= freeR[1] + tol:
                        RL[i + 1][j] = (lo, freeR[1])
            freeT = B[j + 1][i]
            if freeT is not None:
                if left is not None:
                    RB[i][j + 1] = freeT
                else:
                    lo = max(freeT[0], bottom[0])
                    if lo <= freeT[1] + tol:
                        RB[i][j + 1] = (lo, freeT[1])

    right = RL[n1][n2 - 1]
    top = RB[n1 - 1][n2]
    return bool((right is not None and right[1] >= 1.0 - tol)
                or (top is not None and top[1] >= 1.0 - tol))


@dataclass
class MaxInDeltaResult:
    """Result of the relative-guarantee matched-length solver.

    ``gamma_lb`` is a certified lower bound on the L1-metric optimum used to
    scale the boundary point spacing; when it degenerates to zero the solver
    falls back to the additive pipeline (flagged, with a warning).
    """

    gamma_lb: float
    quality_W: float
    steiner_spacing: float
    fallback_additive: bool
    solution: PathSolution


def solve_maxin_one_minus_delta(t1: PolygonalCurve, t2: PolygonalCurve,
                                eps: float, delta: float) -> MaxInDeltaResult:
    """Matched-length solver with a multiplicative (1 - delta) guarantee.

    A conservative lower bound on the L1-metric optimum sets the spacing of
    equally spaced points along each free-space boundary; the per-cell error
    is then at most four spacings over at most n crossed cells, i.e. at most
    ``delta`` times the optimum.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    internal_delta = 0.25
    l1_sol = solve_maxin(t1, t2, eps, internal_delta,
                         algorithm="steiner", metric="l1")
    err = internal_delta * max(t1.length, t2.length)
    gamma_lb = max(0.0, l1_sol.quality_W - err)
    n = t1.n_segments + t2.n_segments
    if gamma_lb <= 0.0:
        warnings.warn(
            "L1 lower bound degenerated to zero; falling back to the "
            "additive-guarantee solver", RuntimeWarning, stacklevel=2)
        sol = solve_maxin(t1, t2, eps, delta, algorithm="steiner")
        return MaxInDeltaResult(gamma_lb=0.0, quality_W=sol.quality_W,
                                steiner_spacing=0.0, fallback_additive=True,
                                solution=sol)
    spacing = gamma_lb * delta / (4.0 * n)
    diag = build_diagram(t1, t2, eps, "l2")
    g = build_gstar_spaced(diag, spacing)
    sol = shortest_forbidden_path(g)
    sol.delta = delta
    sol.algorithm = "one-minus-delta"
    return MaxInDeltaResult(gamma_lb=float(gamma_lb),
                            quality_W=sol.quality_W,
                            steiner_spacing=float(spacing),
                            fallback_additive=False,
                            solution=sol)
