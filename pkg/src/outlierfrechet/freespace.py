"""Deformed free-space diagram construction.

The parameter space of two curves is scaled so column widths and row heights
equal the corresponding segment arc lengths; L1 path length in this deformed
diagram then equals matched curve length.  Each cell stores its free set
(matched parameter pairs within leash distance): under the Euclidean metric
that set is a conic sublevel set clipped to the cell, under L1 it is a convex
polygon.

Cell-local quadratic convention (Euclidean metric): with ``X = x - x0`` and
``Y = y - y0`` the free set is ``Q(X, Y) <= 0`` where

    Q = X^2 + B*X*Y + Y^2 + D*X + E*Y + F

(the leading coefficients are 1 because both axes are scaled by segment
length; ``B = -2 cos(angle between the segments)``).  Parallel segments give
``|B| = 2`` and the conic degenerates into a pair of parallel lines; all
classification and root finding goes through the quadratic form so that case
needs no special handling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .curves import PolygonalCurve

# Classification: distance exactly epsilon is free, so Q <= tol counts as
# free with tol = CLASSIFY_TOL_REL * (scale of Q over the cell).
CLASSIFY_TOL_REL = 1e-9
# Discriminants within TANGENT_TOL_REL * coefficient scale are double roots.
TANGENT_TOL_REL = 1e-12
# |4 - B^2| at or below this (relative) means a degenerate, parallel-segment
# conic: a pair of parallel lines instead of an ellipse.
DEGENERATE_TOL = 1e-12

Metric = Literal["l1", "l2"]

FREE = True
FORBIDDEN = False


def _quad_span(b: float, c: float) -> tuple[float, float] | None:
    """Solutions of ``t^2 + b t + c <= 0`` as an interval, or None if empty.

    Near-tangency (discriminant within tolerance of zero) collapses to a
    double root.
    """
    disc = b * b - 4.0 * c
    scale = max(b * b, abs(4.0 * c), 1e-300)
    if disc < -TANGENT_TOL_REL * scale:
        return None
    if disc < TANGENT_TOL_REL * scale:
        r = -0.5 * b
        return (r, r)
    s = math.sqrt(disc)
    return (0.5 * (-b - s), 0.5 * (-b + s))


def _quad_span_vec(b: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized `_quad_span`; empty intervals come back as NaN pairs."""
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    disc = b * b - 4.0 * c
    scale = np.maximum(np.maximum(b * b, np.abs(4.0 * c)), 1e-300)
    near = np.abs(disc) < TANGENT_TOL_REL * scale
    disc = np.where(near, 0.0, disc)
    with np.errstate(invalid="ignore"):
        s = np.sqrt(np.where(disc < 0, np.nan, disc))
    lo = 0.5 * (-b - s)
    hi = 0.5 * (-b + s)
    return lo, hi


def _overlap(lo: float, hi: float, a: float, b: float) -> float:
    """Length of [lo, hi] ∩ [a, b] (zero if either is empty)."""
    return max(0.0, min(hi, b) - max(lo, a))


@dataclass(frozen=True)
class CellRect:
    """Deformed-diagram rectangle of one parameter cell."""

    i: int
    j: int
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0


class CellFreeSpaceL2:
    """Free set of one cell under the Euclidean metric: ``{Q <= 0}`` ∩ rect."""

    __slots__ = (
        "rect", "a", "b", "c", "d", "e", "f", "tol", "is_empty", "is_full",
    )

    def __init__(self, rect: CellRect, b: float, d: float, e: float, f: float):
        self.rect = rect
        self.a = 1.0
        self.b = b
        self.c = 1.0
        self.d = d
        self.e = e
        self.f = f
        w, h = rect.width, rect.height
        scale = max(w * w, h * h, abs(b) * w * h, abs(d) * w, abs(e) * h,
                    abs(f), 1e-300)
        self.tol = CLASSIFY_TOL_REL * scale
        self.is_empty = self._min_over_rect() > self.tol
        corners = [self.margin_local(x, y) for x in (0.0, w) for y in (0.0, h)]
        self.is_full = max(corners) <= self.tol

    # -- evaluation ---------------------------------------------------------

    def margin_local(self, X, Y):
        """Q in cell-local coordinates; <= 0 (within tol) means free."""
        return (X * X + self.b * X * Y + Y * Y
                + self.d * X + self.e * Y + self.f)

    def margin(self, x, y):
        """Q at diagram coordinates."""
        return self.margin_local(x - self.rect.x0, y - self.rect.y0)

    def _min_over_rect(self) -> float:
        w, h = self.rect.width, self.rect.height
        best = math.inf
        den = 4.0 - self.b * self.b
        if abs(den) > DEGENERATE_TOL * 4.0:
            xc = (self.b * self.e - 2.0 * self.d) / den
            yc = (self.b * self.d - 2.0 * self.e) / den
            if 0.0 <= xc <= w and 0.0 <= yc <= h:
                best = self.margin_local(xc, yc)
        # Edge minima: Q restricted to an edge is a 1-D convex quadratic.
        for X in (0.0, w):
            yv = min(max(-0.5 * (self.b * X + self.e), 0.0), h)
            best = min(best, self.margin_local(X, yv))
        for Y in (0.0, h):
            xv = min(max(-0.5 * (self.b * Y + self.d), 0.0), w)
            best = min(best, self.margin_local(xv, Y))
        return best

    # -- line intersections -------------------------------------------------

    def y_span(self, x: float) -> tuple[float, float] | None:
        """Free interval (diagram y) on the vertical line at diagram x.

        Unclipped: the metric constraint only, not intersected with the cell
        rectangle.
        """
        X = x - self.rect.x0
        span = _quad_span(self.b * X + self.e, X * X + self.d * X + self.f)
        if span is None:
            return None
        return (span[0] + self.rect.y0, span[1] + self.rect.y0)

    def x_span(self, y: float) -> tuple[float, float] | None:
        """Free interval (diagram x) on the horizontal line at diagram y."""
        Y = y - self.rect.y0
        span = _quad_span(self.b * Y + self.d, Y * Y + self.e * Y + self.f)
        if span is None:
            return None
        return (span[0] + self.rect.x0, span[1] + self.rect.x0)

    def y_interval(self, x: float) -> tuple[float, float] | None:
        """Free y-interval on the vertical line, clipped to the cell."""
        span = self.y_span(x)
        if span is None:
            return None
        lo = max(span[0], self.rect.y0)
        hi = min(span[1], self.rect.y1)
        return (lo, hi) if lo <= hi else None

    def x_interval(self, y: float) -> tuple[float, float] | None:
        span = self.x_span(y)
        if span is None:
            return None
        lo = max(span[0], self.rect.x0)
        hi = min(span[1], self.rect.x1)
        return (lo, hi) if lo <= hi else None

    vertical_interval = y_interval

    def segment_free_tspan(self, p, q) -> tuple[float, float] | None:
        """Free sub-interval (in t) of the segment ``p + t (q - p)``.

        Only the metric constraint is applied; the caller clips to [0, 1].
        """
        X0 = p[0] - self.rect.x0
        Y0 = p[1] - self.rect.y0
        dx = q[0] - p[0]
        dy = q[1] - p[1]
        a = dx * dx + self.b * dx * dy + dy * dy
        gx = 2.0 * X0 + self.b * Y0 + self.d
        gy = self.b * X0 + 2.0 * Y0 + self.e
        bb = gx * dx + gy * dy
        cc = self.margin_local(X0, Y0)
        scale = max(abs(a), abs(bb), abs(cc), 1e-300)
        if abs(a) <= 1e-14 * scale:
            if abs(bb) <= 1e-14 * scale:
                return (-math.inf, math.inf) if cc <= self.tol else None
            t = -cc / bb
            return (t, math.inf) if bb < 0 else (-math.inf, t)
        return _quad_span(bb / a, cc / a)

    def line_crossings(self, orientation: str, coord: float) -> list[tuple[float, float]]:
        """Points where a grid line crosses the conic inside the cell.

        ``orientation`` is "vertical" (coord is x) or "horizontal" (coord is
        y).  Tangency yields a single point; the empty list is allowed.
        """
        r = self.rect
        pts: list[tuple[float, float]] = []
        if orientation == "vertical":
            if not (r.x0 - self.tol <= coord <= r.x1 + self.tol):
                return pts
            span = self.y_span(coord)
            if span is None:
                return pts
            vals = (span[0],) if span[0] == span[1] else span
            for y in vals:
                if r.y0 - self.tol <= y <= r.y1 + self.tol:
                    pts.append((coord, min(max(y, r.y0), r.y1)))
        elif orientation == "horizontal":
            if not (r.y0 - self.tol <= coord <= r.y1 + self.tol):
                return pts
            span = self.x_span(coord)
            if span is None:
                return pts
            vals = (span[0],) if span[0] == span[1] else span
            for x in vals:
                if r.x0 - self.tol <= x <= r.x1 + self.tol:
                    pts.append((min(max(x, r.x0), r.x1), coord))
        else:
            raise ValueError(f"unknown orientation {orientation!r}")
        return pts

    # -- shape of the boundary ---------------------------------------------

    @property
    def is_degenerate(self) -> bool:
        return abs(4.0 - self.b * self.b) <= DEGENERATE_TOL * 4.0

    def principal(self):
        """Center, principal directions, and radii of the (proper) conic.

        Returns ``(center, u1, u2, r1, r2)`` in diagram coordinates, or None
        when degenerate or empty.
        """
        den = 4.0 - self.b * self.b
        if abs(den) <= DEGENERATE_TOL * 4.0:
            return None
        xc = (self.b * self.e - 2.0 * self.d) / den
        yc = (self.b * self.d - 2.0 * self.e) / den
        qc = self.f + 0.5 * (self.d * xc + self.e * yc)
        if qc >= 0.0:
            return None
        lam1 = 1.0 + 0.5 * self.b
        lam2 = 1.0 - 0.5 * self.b
        inv = 1.0 / math.sqrt(2.0)
        u1 = np.array([inv, inv])
        u2 = np.array([inv, -inv])
        r1 = math.sqrt(-qc / lam1)
        r2 = math.sqrt(-qc / lam2)
        center = np.array([xc + self.rect.x0, yc + self.rect.y0])
        return center, u1, u2, r1, r2

    def _degenerate_lines(self):
        """The two parallel boundary lines of a degenerate conic.

        Returns ``(sign, roots)``: the conic is ``S^2 + p*S + f`` with
        ``S = X - Y`` (sign -1, parallel same-direction segments) or
        ``S = X + Y`` (sign +1, antiparallel); ``roots`` are the 0, 1, or 2
        solutions in S.
        """
        sgn = 1.0 if self.b > 0 else -1.0
        # d*X + e*Y = ((d+e)/2)(X+Y) + ((d-e)/2)(X-Y); for parallel segments
        # the coefficient of the non-degenerate direction vanishes.
        if sgn > 0:
            p = 0.5 * (self.d + self.e)
        else:
            p = 0.5 * (self.d - self.e)
        span = _quad_span(p, self.f)
        if span is None:
            return sgn, ()
        if span[0] == span[1]:
            return sgn, (span[0],)
        return sgn, span

    def boundary_order(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Branch id and monotone ordering key along the conic boundary.

        For a proper ellipse there is a single closed branch and the key is
        the principal-frame angle; for the degenerate line-pair case points
        are assigned to the nearer line and ordered along it.
        """
        points = np.asarray(points, dtype=float)
        X = points[:, 0] - self.rect.x0
        Y = points[:, 1] - self.rect.y0
        if not self.is_degenerate:
            pr = self.principal()
            if pr is None:
                return np.zeros(len(points), dtype=int), X + Y
            center, u1, u2, r1, r2 = pr
            rel = points - center
            xi = (rel @ u1) / max(r1, 1e-300)
            eta = (rel @ u2) / max(r2, 1e-300)
            return np.zeros(len(points), dtype=int), np.arctan2(eta, xi)
        sgn, roots = self._degenerate_lines()
        S = X + Y if sgn > 0 else X - Y
        T = X - Y if sgn > 0 else X + Y
        if len(roots) <= 1:
            return np.zeros(len(points), dtype=int), T
        mid = 0.5 * (roots[0] + roots[1])
        return (S > mid).astype(int), T

    def boundary_arcs(self, max_gap: float | None = None) -> list[np.ndarray]:
        """Polyline approximations of the conic boundary clipped to the cell.

        One array per connected arc; consecutive samples are no farther apart
        than ``max_gap`` (default: ~1/256 of the conic extent).  Arc endpoints
        are exact crossings with the cell sides.
        """
        r = self.rect
        arcs: list[np.ndarray] = []
        if self.is_empty:
            return arcs
        if self.is_degenerate:
            sgn, roots = self._degenerate_lines()
            for root in roots:
                seg = _clip_line_to_rect(sgn, root, r)
                if seg is None:
                    continue
                p0, p1 = seg
                length = abs(p1[0] - p0[0]) + abs(p1[1] - p0[1])
                gap = max_gap or max(length / 64.0, 1e-12)
                n = max(2, int(math.ceil(length / gap)) + 1)
                ts = np.linspace(0.0, 1.0, n)
                arcs.append(np.outer(1 - ts, p0) + np.outer(ts, p1))
            return arcs
        pr = self.principal()
        if pr is None:
            return arcs
        center, u1, u2, r1, r2 = pr

        def at(phi):
            phi = np.asarray(phi, dtype=float)
            return (center
                    + np.outer(np.cos(phi), u1 * r1)
                    + np.outer(np.sin(phi), u2 * r2))

        # Split the angle circle at every crossing with a cell side, then
        # keep the sub-arcs whose midpoint lies inside the rectangle.
        cross_phi: list[float] = []
        for orientation, coord in (("vertical", r.x0), ("vertical", r.x1),
                                   ("horizontal", r.y0), ("horizontal", r.y1)):
            for p in self.line_crossings(orientation, coord):
                rel = np.asarray(p) - center
                phi = math.atan2(float(rel @ u2) / max(r2, 1e-300),
                                 float(rel @ u1) / max(r1, 1e-300))
                cross_phi.append(phi)
        perimeter_hint = 2.0 * math.pi * max(r1, r2)
        gap = max_gap or max(perimeter_hint / 256.0, 1e-12)
        if not cross_phi:
            mid = at([0.0])[0]
            if (r.x0 - self.tol <= mid[0] <= r.x1 + self.tol
                    and r.y0 - self.tol <= mid[1] <= r.y1 + self.tol):
                n = max(16, int(math.ceil(perimeter_hint / gap)) + 1)
                phis = np.linspace(-math.pi, math.pi, n)
                arcs.append(at(phis))
            return arcs
        cross_phi.sort()
        edge_tol = self.tol + 1e-12 * max(r.width, r.height, 1.0)
        for k in range(len(cross_phi)):
            a = cross_phi[k]
            b = cross_phi[(k + 1) % len(cross_phi)]
            if k == len(cross_phi) - 1:
                b += 2.0 * math.pi
            if b - a < 1e-14:
                continue
            mid = at([0.5 * (a + b)])[0]
            if not (r.x0 - edge_tol <= mid[0] <= r.x1 + edge_tol
                    and r.y0 - edge_tol <= mid[1] <= r.y1 + edge_tol):
                continue
            span = (b - a) * max(r1, r2)
            n = max(2, int(math.ceil(span / gap)) + 1)
            phis = np.linspace(a, b, n)
            pts = at(phis)
            np.clip(pts[:, 0], r.x0, r.x1, out=pts[:, 0])
            np.clip(pts[:, 1], r.y0, r.y1, out=pts[:, 1])
            arcs.append(pts)
        return arcs


def _clip_line_to_rect(sgn: float, root: float, r: CellRect):
    """Clip the local line X + sgn_choice Y = root to the cell rectangle."""
    # sgn > 0: X + Y = root; sgn < 0: X - Y = root (local coordinates).
    w, h = r.width, r.height
    pts = []
    for X in (0.0, w):
        Y = (root - X) if sgn > 0 else (X - root)
        if -1e-12 <= Y <= h + 1e-12:
            pts.append((X, min(max(Y, 0.0), h)))
    for Y in (0.0, h):
        X = (root - Y) if sgn > 0 else (root + Y)
        if -1e-12 <= X <= w + 1e-12:
            pts.append((X, Y))
    if not pts:
        return None
    uniq: list[tuple[float, float]] = []
    for p in pts:
        if all(abs(p[0] - q[0]) + abs(p[1] - q[1]) > 1e-12 * (w + h + 1.0)
               for q in uniq):
            uniq.append(p)
    if len(uniq) < 2:
        return None
    uniq.sort()
    p0 = (uniq[0][0] + r.x0, uniq[0][1] + r.y0)
    p1 = (uniq[-1][0] + r.x0, uniq[-1][1] + r.y0)
    return np.array(p0), np.array(p1)


class CellFreeSpaceL1:
    """Free set of one cell under the L1 metric: a convex polygon.

    The constraint ``|dx| + |dy| <= eps`` splits into four half-planes (one
    per sign pattern), linear in the cell-local coordinates.
    """

    __slots__ = ("rect", "polygon", "tol", "is_empty", "is_full",
                 "_gu", "_gv", "_rhs")

    def __init__(self, rect: CellRect, gu: np.ndarray, gv: np.ndarray,
                 rhs: np.ndarray):
        # gu[k]*X + gv[k]*Y <= rhs[k], k = 0..3, in cell-local coordinates.
        self.rect = rect
        self._gu = gu
        self._gv = gv
        self._rhs = rhs
        scale = max(float(np.max(np.abs(rhs))), rect.width, rect.height, 1e-300)
        self.tol = CLASSIFY_TOL_REL * scale
        self.polygon = self._clip_polygon()
        self.is_empty = len(self.polygon) == 0
        w, h = rect.width, rect.height
        corners = [self.margin_local(x, y) for x in (0.0, w) for y in (0.0, h)]
        self.is_full = max(corners) <= self.tol

    def margin_local(self, X, Y):
        """max over half-plane constraints; <= 0 means free (L1 dist <= eps)."""
        vals = [self._gu[k] * X + self._gv[k] * Y - self._rhs[k]
                for k in range(4)]
        return np.maximum.reduce(vals) if isinstance(X, np.ndarray) else max(vals)

    def margin(self, x, y):
        return self.margin_local(x - self.rect.x0, y - self.rect.y0)

    def _axis_span(self, fixed: float, along_v: bool):
        lo, hi = -math.inf, math.inf
        for k in range(4):
            if along_v:
                coef, off = self._gv[k], self._gu[k] * fixed
            else:
                coef, off = self._gu[k], self._gv[k] * fixed
            rhs = self._rhs[k] - off
            if abs(coef) < 1e-300:
                if rhs < -self.tol:
                    return None
                continue
            bound = rhs / coef
            if coef > 0:
                hi = min(hi, bound)
            else:
                lo = max(lo, bound)
        if lo > hi:
            return None
        return lo, hi

    def y_span(self, x: float):
        span = self._axis_span(x - self.rect.x0, along_v=True)
        if span is None:
            return None
        return (span[0] + self.rect.y0, span[1] + self.rect.y0)

    def x_span(self, y: float):
        span = self._axis_span(y - self.rect.y0, along_v=False)
        if span is None:
            return None
        return (span[0] + self.rect.x0, span[1] + self.rect.x0)

    def y_interval(self, x: float):
        span = self.y_span(x)
        if span is None:
            return None
        lo, hi = max(span[0], self.rect.y0), min(span[1], self.rect.y1)
        return (lo, hi) if lo <= hi else None

    def x_interval(self, y: float):
        span = self.x_span(y)
        if span is None:
            return None
        lo, hi = max(span[0], self.rect.x0), min(span[1], self.rect.x1)
        return (lo, hi) if lo <= hi else None

    vertical_interval = y_interval

    def segment_free_tspan(self, p, q) -> tuple[float, float] | None:
        """Free sub-interval (in t) of the segment ``p + t (q - p)``."""
        X0 = p[0] - self.rect.x0
        Y0 = p[1] - self.rect.y0
        dx = q[0] - p[0]
        dy = q[1] - p[1]
        lo, hi = -math.inf, math.inf
        for k in range(4):
            val0 = self._gu[k] * X0 + self._gv[k] * Y0 - self._rhs[k]
            slope = self._gu[k] * dx + self._gv[k] * dy
            if abs(slope) <= 1e-300:
                if val0 > self.tol:
                    return None
                continue
            t = -val0 / slope
            if slope > 0:
                hi = min(hi, t)
            else:
                lo = max(lo, t)
        return (lo, hi) if lo <= hi else None

    def line_crossings(self, orientation: str, coord: float):
        r = self.rect
        pts: list[tuple[float, float]] = []
        if orientation == "vertical":
            if not (r.x0 - self.tol <= coord <= r.x1 + self.tol):
                return pts
            span = self.y_span(coord)
            if span is None:
                return pts
            vals = (span[0],) if span[0] == span[1] else span
            for y in vals:
                if r.y0 - self.tol <= y <= r.y1 + self.tol:
                    pts.append((coord, min(max(y, r.y0), r.y1)))
        elif orientation == "horizontal":
            if not (r.y0 - self.tol <= coord <= r.y1 + self.tol):
                return pts
            span = self.x_span(coord)
            if span is None:
                return pts
            vals = (span[0],) if span[0] == span[1] else span
            for x in vals:
                if r.x0 - self.tol <= x <= r.x1 + self.tol:
                    pts.append((min(max(x, r.x0), r.x1), coord))
        else:
            raise ValueError(f"unknown orientation {orientation!r}")
        return pts

    @property
    def is_degenerate(self) -> bool:
        return False

    def _clip_polygon(self) -> np.ndarray:
        r = self.rect
        poly = [(0.0, 0.0), (r.width, 0.0), (r.width, r.height), (0.0, r.height)]
        for k in range(4):
            gu, gv, rhs = self._gu[k], self._gv[k], self._rhs[k]
            out: list[tuple[float, float]] = []
            m = len(poly)
            for idx in range(m):
                p = poly[idx]
                q = poly[(idx + 1) % m]
                fp = gu * p[0] + gv * p[1] - rhs
                fq = gu * q[0] + gv * q[1] - rhs
                if fp <= self.tol:
                    out.append(p)
                if (fp <= self.tol) != (fq <= self.tol) and fq != fp:
                    t = fp / (fp - fq)
                    out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
            poly = out
            if not poly:
                return np.zeros((0, 2))
        arr = np.array(poly, dtype=float)
        arr[:, 0] += r.x0
        arr[:, 1] += r.y0
        return arr

    def boundary_order(self, points: np.ndarray):
        points = np.asarray(points, dtype=float)
        if len(self.polygon):
            center = self.polygon.mean(axis=0)
        else:
            center = np.array([self.rect.x0, self.rect.y0])
        rel = points - center
        return (np.zeros(len(points), dtype=int),
                np.arctan2(rel[:, 1], rel[:, 0]))

    def boundary_arcs(self, max_gap: float | None = None) -> list[np.ndarray]:
        if len(self.polygon) < 2:
            return []
        closed = np.vstack([self.polygon, self.polygon[:1]])
        return [closed]


def _unit(v: np.ndarray) -> tuple[np.ndarray, float]:
    n = float(np.hypot(v[0], v[1]))
    if n == 0.0:
        raise ValueError("degenerate (zero-length) segment")
    return v / n, n


def build_cell_l2(seg1, seg2, eps: float, rect: CellRect | None = None) -> CellFreeSpaceL2:
    """Euclidean free set for one segment pair.

    ``seg1``/``seg2`` are ``(start, end)`` point pairs; the free set is
    expressed in deformed (arc-length) cell coordinates.
    """
    p0, p1 = np.asarray(seg1[0], dtype=float), np.asarray(seg1[1], dtype=float)
    q0, q1 = np.asarray(seg2[0], dtype=float), np.asarray(seg2[1], dtype=float)
    ahat, alen = _unit(p1 - p0)
    bhat, blen = _unit(q1 - q0)
    w = p0 - q0
    if rect is None:
        rect = CellRect(0, 0, 0.0, alen, 0.0, blen)
    b = -2.0 * float(ahat @ bhat)
    d = 2.0 * float(w @ ahat)
    e = -2.0 * float(w @ bhat)
    f = float(w @ w) - eps * eps
    return CellFreeSpaceL2(rect, b, d, e, f)


def build_cell_l1(seg1, seg2, eps: float, rect: CellRect | None = None) -> CellFreeSpaceL1:
    """L1-metric free set for one segment pair (a convex polygon)."""
    p0, p1 = np.asarray(seg1[0], dtype=float), np.asarray(seg1[1], dtype=float)
    q0, q1 = np.asarray(seg2[0], dtype=float), np.asarray(seg2[1], dtype=float)
    ahat, alen = _unit(p1 - p0)
    bhat, blen = _unit(q1 - q0)
    w = p0 - q0
    if rect is None:
        rect = CellRect(0, 0, 0.0, alen, 0.0, blen)
    gu, gv, rhs = [], [], []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            gu.append(s1 * ahat[0] + s2 * ahat[1])
            gv.append(-(s1 * bhat[0] + s2 * bhat[1]))
            rhs.append(eps - s1 * w[0] - s2 * w[1])
    return CellFreeSpaceL1(rect, np.array(gu), np.array(gv), np.array(rhs))


class DeformedDiagram:
    """The full deformed free-space diagram for a curve pair.

    Immutable once built.  ``s = (0, 0)`` and ``t = (W, H)`` are the path
    endpoints; W and H are the total curve lengths.
    """

    def __init__(self, t1: PolygonalCurve, t2: PolygonalCurve, eps: float,
                 metric: Metric, cells):
        self.t1 = t1
        self.t2 = t2
        self.eps = eps
        self.metric = metric
        self.cells = cells
        self.col_bounds = t1.cum_len
        self.row_bounds = t2.cum_len
        self.W = t1.length
        self.H = t2.length
        self.n1 = t1.n_segments
        self.n2 = t2.n_segments
        self.s = (0.0, 0.0)
        self.t = (self.W, self.H)
        self.coord_tol = 1e-12 * (self.W + self.H)
        if metric == "l2":
            self._Bm = np.array([[c.b for c in row] for row in cells])
            self._Dm = np.array([[c.d for c in row] for row in cells])
            self._Em = np.array([[c.e for c in row] for row in cells])
            self._Fm = np.array([[c.f for c in row] for row in cells])
            self._tolm = np.array([[c.tol for c in row] for row in cells])
        else:
            self._gu = np.stack([[c._gu for c in row] for row in cells])
            self._gv = np.stack([[c._gv for c in row] for row in cells])
            self._rhs = np.stack([[c._rhs for c in row] for row in cells])
            self._tolm = np.array([[c.tol for c in row] for row in cells])

    def cell(self, i: int, j: int):
        return self.cells[i][j]

    def cell_indices_at(self, x: float, y: float) -> tuple[int, int]:
        """Cell containing (x, y); boundary points go to the higher cell."""
        if not (-self.coord_tol <= x <= self.W + self.coord_tol
                and -self.coord_tol <= y <= self.H + self.coord_tol):
            raise ValueError(f"point ({x}, {y}) outside the diagram")
        i = int(np.searchsorted(self.col_bounds, x, side="right")) - 1
        j = int(np.searchsorted(self.row_bounds, y, side="right")) - 1
        return min(max(i, 0), self.n1 - 1), min(max(j, 0), self.n2 - 1)

    def cells_containing(self, x: float, y: float):
        """All cells whose closed rectangle contains (x, y), up to 4."""
        i, j = self.cell_indices_at(x, y)
        out = []
        i_opts = [i]
        j_opts = [j]
        if i > 0 and abs(x - self.col_bounds[i]) <= self.coord_tol:
            i_opts.append(i - 1)
        if j > 0 and abs(y - self.row_bounds[j]) <= self.coord_tol:
            j_opts.append(j - 1)
        for ii in i_opts:
            for jj in j_opts:
                out.append(self.cells[ii][jj])
        return out

    # -- vectorized classification -----------------------------------------

    def _margins_at(self, i: np.ndarray, j: np.ndarray,
                    x: np.ndarray, y: np.ndarray) -> np.ndarray:
        X = x - self.col_bounds[i]
        Y = y - self.row_bounds[j]
        if self.metric == "l2":
            return (X * X + self._Bm[i, j] * X * Y + Y * Y
                    + self._Dm[i, j] * X + self._Em[i, j] * Y + self._Fm[i, j])
        vals = (self._gu[i, j, :] * X[..., None]
                + self._gv[i, j, :] * Y[..., None]
                - self._rhs[i, j, :])
        return vals.max(axis=-1)

    def free_mask(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Vectorized free test; points on shared cell boundaries are free if
        free in either adjacent cell."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        i = np.clip(np.searchsorted(self.col_bounds, x, side="right") - 1,
                    0, self.n1 - 1)
        j = np.clip(np.searchsorted(self.row_bounds, y, side="right") - 1,
                    0, self.n2 - 1)
        margin = self._margins_at(i, j, x, y)
        tol = self._tolm[i, j]
        free = margin <= tol
        near_left = (i > 0) & (np.abs(x - self.col_bounds[i]) <= self.coord_tol)
        if np.any(near_left):
            i2 = np.where(near_left, i - 1, i)
            m2 = self._margins_at(i2, j, x, y)
            free |= near_left & (m2 <= self._tolm[i2, j])
        near_bot = (j > 0) & (np.abs(y - self.row_bounds[j]) <= self.coord_tol)
        if np.any(near_bot):
            j2 = np.where(near_bot, j - 1, j)
            m2 = self._margins_at(i, j2, x, y)
            free |= near_bot & (m2 <= self._tolm[i, j2])
        return free

    def y_span_vec(self, i: np.ndarray, j: np.ndarray, x: np.ndarray):
        """Vectorized unclipped free y-interval on vertical lines (NaN=empty)."""
        X = x - self.col_bounds[i]
        if self.metric == "l2":
            lo, hi = _quad_span_vec(self._Bm[i, j] * X + self._Em[i, j],
                                    X * X + self._Dm[i, j] * X + self._Fm[i, j])
            return lo + self.row_bounds[j], hi + self.row_bounds[j]
        return self._linear_span_vec(i, j, X, along_v=True)

    def x_span_vec(self, i: np.ndarray, j: np.ndarray, y: np.ndarray):
        Y = y - self.row_bounds[j]
        if self.metric == "l2":
            lo, hi = _quad_span_vec(self._Bm[i, j] * Y + self._Dm[i, j],
                                    Y * Y + self._Em[i, j] * Y + self._Fm[i, j])
            return lo + self.col_bounds[i], hi + self.col_bounds[i]
        return self._linear_span_vec(i, j, Y, along_v=False)

    def _linear_span_vec(self, i, j, fixed, along_v: bool):
        """L1 version of the span computation: intersect 4 half-planes."""
        n = np.shape(fixed)
        lo = np.full(n, -np.inf)
        hi = np.full(n, np.inf)
        feasible = np.ones(n, dtype=bool)
        for k in range(4):
            if along_v:
                coef = self._gv[i, j, k]
                off = self._gu[i, j, k] * fixed
            else:
                coef = self._gu[i, j, k]
                off = self._gv[i, j, k] * fixed
            rhs = self._rhs[i, j, k] - off
            pos = coef > 1e-300
            neg = coef < -1e-300
            zero = ~(pos | neg)
            with np.errstate(divide="ignore", invalid="ignore"):
                bound = rhs / np.where(zero, 1.0, coef)
            hi = np.where(pos, np.minimum(hi, bound), hi)
            lo = np.where(neg, np.maximum(lo, bound), lo)
            feasible &= ~(zero & (rhs < -self._tolm[i, j]))
        feasible &= lo <= hi
        base = self.row_bounds[j] if along_v else self.col_bounds[i]
        lo = np.where(feasible, lo + base, np.nan)
        hi = np.where(feasible, hi + base, np.nan)
        return lo, hi


def build_diagram(t1: PolygonalCurve, t2: PolygonalCurve, eps: float,
                  metric: Metric = "l2") -> DeformedDiagram:
    """Build the deformed free-space diagram for a curve pair.

    Column widths equal T1 segment lengths and row heights equal T2 segment
    lengths, so ``W + H = |T1| + |T2|``.
    """
    if not (np.isfinite(eps) and eps >= 0.0):
        raise ValueError(f"leash length must be finite and >= 0, got {eps}")
    builder = build_cell_l2 if metric == "l2" else build_cell_l1
    cells = []
    for i in range(t1.n_segments):
        row = []
        for j in range(t2.n_segments):
            rect = CellRect(i, j,
                            float(t1.cum_len[i]), float(t1.cum_len[i + 1]),
                            float(t2.cum_len[j]), float(t2.cum_len[j + 1]))
            row.append(builder(t1.segment(i), t2.segment(j), eps, rect))
        cells.append(row)
    return DeformedDiagram(t1, t2, eps, metric, cells)


def classify_point(diag: DeformedDiagram, p) -> bool:
    """True when the matched parameter pair at ``p`` is free (distance <= eps,
    boundary inclusive)."""
    x, y = float(p[0]), float(p[1])
    i, j = diag.cell_indices_at(x, y)
    cell = diag.cells[i][j]
    return bool(cell.margin(x, y) <= cell.tol)


def line_ellipse_intersections(cell, orientation: str, coord: float) -> list[tuple[float, float]]:
    """Crossings of an axis-parallel line with the cell's free-space boundary,
    clipped to the cell; tangency returns a single point."""
    return cell.line_crossings(orientation, coord)


def free_region_polygon(cell, n_slices: int = 256) -> np.ndarray | None:
    """Dense polygon approximation of the cell's free region (for rendering
    and boundary-length estimates); None when empty."""
    r = cell.rect
    if cell.is_empty:
        return None
    # y-extent of the free region within the cell.
    ys = np.linspace(r.y0, r.y1, n_slices)
    lows, highs, yvals = [], [], []
    for y in ys:
        iv = cell.x_interval(y)
        if iv is None:
            continue
        yvals.append(y)
        lows.append(iv[0])
        highs.append(iv[1])
    if not yvals:
        return None
    left = np.column_stack([lows, yvals])
    right = np.column_stack([highs, yvals])[::-1]
    return np.vstack([left, right])
