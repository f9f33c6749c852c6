"""Figure rendering for diagrams and solution paths (matplotlib)."""

from __future__ import annotations

import numpy as np

from .freespace import DeformedDiagram, free_region_polygon
from .pathsearch import PathSolution


def render_diagram(diag: DeformedDiagram, ax=None):
    """Draw the deformed diagram: shaded forbidden space, free-space
    boundaries, and the cell grid."""
    import matplotlib.pyplot as plt
    from matplotlib.patches import Rectangle

    if ax is None:
        width = 7.0
        height = max(2.0, width * diag.H / max(diag.W, 1e-9))
        _, ax = plt.subplots(figsize=(width, min(height, 10.0)))
    ax.add_patch(Rectangle((0, 0), diag.W, diag.H,
                           facecolor="0.85", edgecolor="none", zorder=0))
    for row in diag.cells:
        for cell in row:
            poly = free_region_polygon(cell, n_slices=192)
            if poly is not None and len(poly) >= 3:
                ax.fill(poly[:, 0], poly[:, 1], color="white",
                        lw=0, zorder=1)
            for arc in cell.boundary_arcs():
                ax.plot(arc[:, 0], arc[:, 1], color="tab:blue",
                        lw=1.0, zorder=2)
    for x in diag.col_bounds:
        ax.axvline(float(x), color="0.55", lw=0.6, zorder=3)
    for y in diag.row_bounds:
        ax.axhline(float(y), color="0.55", lw=0.6, zorder=3)
    ax.plot([0], [0], "ko", ms=4, zorder=5)
    ax.plot([diag.W], [diag.H], "ks", ms=4, zorder=5)
    ax.set_xlim(-0.02 * diag.W, 1.02 * diag.W)
    ax.set_ylim(-0.02 * diag.H, 1.02 * diag.H)
    ax.set_aspect("equal")
    ax.set_xlabel("arc length along curve A")
    ax.set_ylabel("arc length along curve B")
    return ax


def render_solution(diag: DeformedDiagram, sol: PathSolution, ax=None):
    """Diagram plus the solution path, free pieces green and ignored pieces
    red."""
    ax = render_diagram(diag, ax=ax)
    for pa, pb, free in sol.segments():
        color = "tab:green" if free else "tab:red"
        ax.plot([pa[0], pb[0]], [pa[1], pb[1]], color=color, lw=1.8, zorder=4)
    return ax


def save_figure(ax, path) -> None:
    fig = ax.figure
    fig.tight_layout()
    fig.savefig(path)
    import matplotlib.pyplot as plt

    plt.close(fig)


def export_diagram_svg(diag: DeformedDiagram, path, sol: PathSolution | None = None) -> None:
    """Render the diagram (optionally with a path) to an image file; the
    format follows the extension (.svg, .png, ...)."""
    import matplotlib

    matplotlib.use("Agg", force=False)
    if sol is None:
        ax = render_diagram(diag)
    else:
        ax = render_solution(diag, sol)
    save_figure(ax, path)
