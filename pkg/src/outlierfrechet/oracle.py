"""Independent reference solvers and pinned numeric fixtures.

`oracle_minex` solves the ignored-length problem by dynamic programming over
a dense staircase lattice with exact per-move interval arithmetic; it
converges to the optimum from above as the lattice is refined and is kept
deliberately independent of the graph pipelines it cross-checks.

The fixture functions reproduce a two-against-one segment instance whose
optimal ignored length is a root of a degree-8 polynomial with ~40-digit
coefficients; the optimum (~4.59277 at crossing height ~0.50696) and the
single-obstacle variant (~4.80810) are pinned as regression values, and the
polynomial residual is evaluated in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize

from .curves import PolygonalCurve, make_curve
from .freespace import DeformedDiagram, build_diagram, free_region_polygon


@dataclass(frozen=True)
class OracleConfig:
    """Lattice resolution (subdivisions per diagram side) and metric."""

    resolution: int
    metric: str = "l2"

    def __post_init__(self):
        if self.resolution < 8:
            raise ValueError("oracle resolution must be at least 8")
        if self.metric not in ("l1", "l2"):
            raise ValueError(f"unknown metric {self.metric!r}")


def _voverlap(lo, hi, a, b):
    """Vectorized overlap length of [lo, hi] with [a, b]; NaN spans count 0."""
    out = np.minimum(hi, b) - np.maximum(lo, a)
    return np.nan_to_num(np.maximum(out, 0.0), nan=0.0)


def _union_overlap(lo1, hi1, lo2, hi2, a, b):
    """Overlap of [a, b] with the union of two (possibly NaN) intervals."""
    ov = _voverlap(lo1, hi1, a, b) + _voverlap(lo2, hi2, a, b)
    ov -= _voverlap(np.maximum(lo1, lo2), np.minimum(hi1, hi2), a, b)
    return ov


def oracle_minex(t1: PolygonalCurve, t2: PolygonalCurve, eps: float,
                 cfg: OracleConfig) -> float:
    """Reference value of the minimum ignored length via staircase DP.

    The lattice is the uniform ``resolution + 1`` grid per side joined with
    the exact cell boundary coordinates; moves are rightward/upward with the
    forbidden portion of every move computed by interval arithmetic.  The
    value is an upper bound on the optimum and is non-increasing as the
    resolution doubles.
    """
    diag = build_diagram(t1, t2, eps, cfg.metric)
    R = cfg.resolution
    xs = np.unique(np.concatenate([np.linspace(0.0, diag.W, R + 1),
                                   diag.col_bounds]))
    ys = np.unique(np.concatenate([np.linspace(0.0, diag.H, R + 1),
                                   diag.row_bounds]))
    nx = len(xs)
    tol = diag.coord_tol

    # Column of each horizontal move and of each lattice x (for vertical
    # moves x may sit on a column boundary: union with the left column).
    mx = 0.5 * (xs[:-1] + xs[1:])
    mcol = np.clip(np.searchsorted(diag.col_bounds, mx, side="right") - 1,
                   0, diag.n1 - 1)
    vcol = np.clip(np.searchsorted(diag.col_bounds, xs, side="right") - 1,
                   0, diag.n1 - 1)
    on_bound = (vcol > 0) & (np.abs(xs - diag.col_bounds[vcol]) <= tol)
    vcol2 = np.where(on_bound, vcol - 1, vcol)

    def row_weights(y: float, j: int, j2: int) -> np.ndarray:
        jj = np.full(len(mx), j)
        lo1, hi1 = diag.x_span_vec(mcol, jj, np.full(len(mx), y))
        if j2 != j:
            lo2, hi2 = diag.x_span_vec(mcol, np.full(len(mx), j2),
                                       np.full(len(mx), y))
        else:
            lo2 = np.full(len(mx), np.nan)
            hi2 = lo2
        free = _union_overlap(lo1, hi1, lo2, hi2, xs[:-1], xs[1:])
        return np.diff(xs) - free

    def col_weights(ya: float, yb: float, j: int) -> np.ndarray:
        jj = np.full(nx, j)
        lo1, hi1 = diag.y_span_vec(vcol, jj, xs)
        lo2, hi2 = diag.y_span_vec(vcol2, jj, xs)
        lo2 = np.where(on_bound, lo2, np.nan)
        hi2 = np.where(on_bound, hi2, np.nan)
        free = _union_overlap(lo1, hi1, lo2, hi2,
                              np.full(nx, ya), np.full(nx, yb))
        return (yb - ya) - free

    def rows_at(y: float) -> tuple[int, int]:
        j = int(np.clip(np.searchsorted(diag.row_bounds, y, side="right") - 1,
                        0, diag.n2 - 1))
        j2 = j - 1 if (j > 0 and abs(y - diag.row_bounds[j]) <= tol) else j
        return j, j2

    j, j2 = rows_at(float(ys[0]))
    dist = np.concatenate([[0.0], np.cumsum(row_weights(float(ys[0]), j, j2))])
    for r in range(1, len(ys)):
        ymid = 0.5 * (ys[r - 1] + ys[r])
        jmid = int(np.clip(
            np.searchsorted(diag.row_bounds, ymid, side="right") - 1,
            0, diag.n2 - 1))
        wu = col_weights(float(ys[r - 1]), float(ys[r]), jmid)
        j, j2 = rows_at(float(ys[r]))
        wr = row_weights(float(ys[r]), j, j2)
        s = np.concatenate([[0.0], np.cumsum(wr)])
        dist = s + np.minimum.accumulate(dist + wu - s)
    return float(dist[-1])


def oracle_error_bound(t1: PolygonalCurve, t2: PolygonalCurve,
                       resolution: int) -> float:
    """Conservative lattice-resolution error of `oracle_minex`.

    Staircase detours only cost extra where a lattice cell straddles a
    free-space boundary; each of the O(n) straddled cells contributes at most
    one lattice step in each direction.
    """
    n = t1.n_segments + t2.n_segments
    return 8.0 * (t1.length + t2.length) * n / resolution


# ---------------------------------------------------------------------------
# Hard-instance fixture: the optimum is a root of this degree-8 polynomial
# (exact integer coefficients; evaluated in rational arithmetic only).

HARD_POLY_COEFFS = (
    585090042379589947534557557525634765625,
    -3039825965000401080955586792871093750000,
    5307213095548843266935155031210937500000,
    -2973595218630130711131340711267500000000,
    -649444075888789852190828979088700000000,
    562445109533777824218782819614464000000,
    193996238215889538903991144689745920000,
    21705929355568145355212682312548352000,
    826789346560923302640987287586865152,
)

CASE1_LENGTH_CLOSED_FORM = (2851.0 - 1200.0 * math.sqrt(2.0)) / 240.0
CASE1_EXIT_X = (35.0 * math.sqrt(2.0) - 43.0) / 14.0
CASE2_H_REFERENCE = 0.50696
CASE2_LENGTH_REFERENCE = 4.59277


@dataclass(frozen=True)
class UnsolvableFixture:
    """The pinned two-segment versus one-segment instance with exact rational
    coordinates, leash length 1."""

    curve_a: PolygonalCurve
    curve_b: PolygonalCurve
    epsilon: float
    case1_length: float
    case1_exit_x: float
    case2_h: float
    case2_length: float


def unsolvable_fixture() -> UnsolvableFixture:
    curve_a = make_curve([(0.0, 0.0), (1.0, 0.0), (-1.0, -31.0 / 240.0)])
    curve_b = make_curve([(-0.5, 0.75), (2.5, 1.625)])
    return UnsolvableFixture(
        curve_a=curve_a,
        curve_b=curve_b,
        epsilon=1.0,
        case1_length=CASE1_LENGTH_CLOSED_FORM,
        case1_exit_x=CASE1_EXIT_X,
        case2_h=CASE2_H_REFERENCE,
        case2_length=CASE2_LENGTH_REFERENCE,
    )


def _case1_minimize() -> tuple[float, float]:
    """Numerically minimize the path cost when only the first free region is
    crossed: exit at (x, y_up(x)) and continue to the far corner through
    forbidden space.  Returns (exit_x, length)."""
    fx = unsolvable_fixture()
    diag = build_diagram(fx.curve_a, fx.curve_b, fx.epsilon)
    cell = diag.cells[0][0]
    tx, ty = diag.W, diag.H

    # Feasible x-extent of the region: where the vertical slice is nonempty.
    b, d, e, f = cell.b, cell.d, cell.e, cell.f
    coeffs = (b * b - 4.0, 2.0 * b * e - 4.0 * d, e * e - 4.0 * f)
    roots = np.roots(coeffs)
    xr = sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9)
    lo = max(xr[0], cell.rect.x0) + 1e-12
    hi = min(xr[1], cell.rect.x1) - 1e-12

    def cost(x: float) -> float:
        span = cell.y_span(x)
        if span is None:
            return math.inf
        return (tx - x) + (ty - span[1])

    res = optimize.minimize_scalar(cost, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    return float(res.x), float(res.fun)


def reproduce_unsolvable_case1() -> float:
    """Length of the optimal path crossing only the first free region.

    Computed by bounded one-dimensional minimization over the exit point and
    checked against the closed form (2851 - 1200*sqrt(2))/240; disagreement
    beyond 1e-6 aborts (it would indicate a transcription error).
    """
    exit_x, length = _case1_minimize()
    if abs(length - CASE1_LENGTH_CLOSED_FORM) > 1e-6:
        raise RuntimeError(
            f"single-region minimization ({length!r}) disagrees with the "
            f"closed form ({CASE1_LENGTH_CLOSED_FORM!r})")
    return length


def _case2_length(h: float) -> float:
    r1 = 4375.0 - 4200.0 * h - 784.0 * h * h
    r2 = 165296875.0 - 212680800.0 * h - 27373824.0 * h * h
    return (1591.0 / 240.0 - (49.0 / 25.0) * h
            - math.sqrt(max(r1, 0.0)) / 100.0
            - math.sqrt(max(r2, 0.0)) / 12025.0)


def _case2_derivative(h: float) -> float:
    r1 = 4375.0 - 4200.0 * h - 784.0 * h * h
    r2 = 165296875.0 - 212680800.0 * h - 27373824.0 * h * h
    if r1 <= 0.0 or r2 <= 0.0:
        return math.inf
    return (-49.0 / 25.0
            + (4200.0 + 1568.0 * h) / (200.0 * math.sqrt(r1))
            + (212680800.0 + 54747648.0 * h) / (24050.0 * math.sqrt(r2)))


def _case2_feasible_interval() -> tuple[float, float]:
    """h-range where both radicands are nonnegative (and h >= 0)."""
    h1 = (-4200.0 + math.sqrt(4200.0 ** 2 + 4.0 * 784.0 * 4375.0)) / (2.0 * 784.0)
    disc = 212680800.0 ** 2 + 4.0 * 27373824.0 * 165296875.0
    h2 = (-212680800.0 + math.sqrt(disc)) / (2.0 * 27373824.0)
    return 0.0, min(h1, h2)


def reproduce_unsolvable_case2() -> tuple[float, float]:
    """Crossing height and length of the optimal path through both regions.

    The cost in the crossing height h has one interior minimum on the
    feasible interval; it is located by bisection on the derivative with a
    1e-12 bracket.  A bracketing failure aborts loudly.
    """
    lo, hi = _case2_feasible_interval()
    a = lo + 1e-9
    b = hi - 1e-9
    if not (_case2_derivative(a) < 0.0 < _case2_derivative(b)):
        raise RuntimeError("derivative does not bracket a minimum; "
                           "fixture transcription error")
    h = float(optimize.bisect(_case2_derivative, a, b, xtol=1e-12))
    return h, _case2_length(h)


def case2_polynomial_residual(h: float) -> float:
    """Relative residual of the degree-8 optimality polynomial at h.

    Exact rational evaluation (the coefficients span ~40 digits, far beyond
    double precision); the residual is scaled by the largest term magnitude.
    """
    hq = Fraction(h)
    terms = [Fraction(c) * hq ** k for k, c in enumerate(HARD_POLY_COEFFS)]
    total = sum(terms)
    scale = max(abs(t) for t in terms)
    return float(abs(total) / scale)


def _polygon_perimeter(poly: np.ndarray) -> float:
    closed = np.vstack([poly, poly[:1]])
    d = np.diff(closed, axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def appendix_ratio_growth(separation_sequence, eps: float = 1.0,
                          resolution: int = 2048):
    """Boundary length versus matched-length optimum for antiparallel unit
    segments at the given separations.

    As the separation approaches the leash length the free region thins to
    the anti-diagonal: its boundary length stays bounded away from zero while
    the matched-length optimum vanishes, so the ratio grows without bound.
    Returns one ``(omega, quality_W)`` pair per separation.
    """
    out = []
    for d in separation_sequence:
        t1 = make_curve([(0.0, 0.0), (1.0, 0.0)])
        t2 = make_curve([(1.0, float(d)), (0.0, float(d))])
        diag = build_diagram(t1, t2, eps)
        poly = free_region_polygon(diag.cells[0][0], n_slices=2048)
        omega = _polygon_perimeter(poly) if poly is not None else 0.0
        value = oracle_minex(t1, t2, eps, OracleConfig(resolution, "l2"))
        quality_w = (diag.W + diag.H) - value
        out.append((omega, quality_w))
    return out
