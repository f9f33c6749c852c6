"""Outlier-tolerant similarity of polygonal curves.

For a fixed leash length, compute how much total curve length must be ignored
(or, dually, how much can be matched) so that the rest of the two curves stays
within Fréchet distance of the leash, with an additive or multiplicative
approximation guarantee, and construct shortcut curves realizing the result.
"""

from .curves import (
    CurveParseError,
    CurvePoint,
    CurveValidationError,
    Point2,
    PolygonalCurve,
    curve_length,
    load_curve,
    make_curve,
    point_at,
    save_curve,
)
from .freespace import (
    CellFreeSpaceL1,
    CellFreeSpaceL2,
    CellRect,
    DeformedDiagram,
    build_cell_l1,
    build_cell_l2,
    build_diagram,
    classify_point,
    free_region_polygon,
    line_ellipse_intersections,
)
from .grid_graph import (
    GridLines,
    MonotoneGraph,
    build_graph_g,
    graph_size_report,
    place_grid,
)
from .oracle import (
    OracleConfig,
    UnsolvableFixture,
    appendix_ratio_growth,
    case2_polynomial_residual,
    oracle_error_bound,
    oracle_minex,
    reproduce_unsolvable_case1,
    reproduce_unsolvable_case2,
    unsolvable_fixture,
)
from .pathsearch import (
    EndpointSeparationError,
    MaxInDeltaResult,
    PathSolution,
    ShortcutCurves,
    build_shortcut_curves,
    frechet_decision,
    shortest_forbidden_path,
    solve_maxin,
    solve_maxin_one_minus_delta,
    solve_minex,
)
from .steiner import (
    EllipseRegion,
    SteinerGraph,
    build_gprime,
    build_graph_gstar,
    build_gstar_spaced,
    gstar_cell_vertex_count,
)

__version__ = "0.1.0"

__all__ = [
    "CellFreeSpaceL1",
    "CellFreeSpaceL2",
    "CellRect",
    "CurveParseError",
    "CurvePoint",
    "CurveValidationError",
    "DeformedDiagram",
    "EllipseRegion",
    "EndpointSeparationError",
    "GridLines",
    "MaxInDeltaResult",
    "MonotoneGraph",
    "OracleConfig",
    "PathSolution",
    "Point2",
    "PolygonalCurve",
    "ShortcutCurves",
    "SteinerGraph",
    "UnsolvableFixture",
    "appendix_ratio_growth",
    "build_cell_l1",
    "build_cell_l2",
    "build_diagram",
    "build_gprime",
    "build_graph_g",
    "build_graph_gstar",
    "build_gstar_spaced",
    "build_shortcut_curves",
    "case2_polynomial_residual",
    "classify_point",
    "curve_length",
    "frechet_decision",
    "free_region_polygon",
    "graph_size_report",
    "gstar_cell_vertex_count",
    "line_ellipse_intersections",
    "load_curve",
    "make_curve",
    "oracle_error_bound",
    "oracle_minex",
    "place_grid",
    "point_at",
    "reproduce_unsolvable_case1",
    "reproduce_unsolvable_case2",
    "save_curve",
    "shortest_forbidden_path",
    "solve_maxin",
    "solve_maxin_one_minus_delta",
    "solve_minex",
    "unsolvable_fixture",
]
