"""Deterministic SVG rendering of meshes, weights and paths."""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

from .mesh import INF, Mesh, Point, WeightField

# colour per path label; unknown labels fall back to grey
PATH_COLOURS = {
    "SP": "#1f4fd6",
    "SVP": "#1a9c3a",
    "SGP": "#d62020",
    "X": "#f08c00",
    "shortcut": "#00b8d9",
    "shortcut2": "#e6c700",
    "shortcut3": "#1a9c3a",
}
SCALE = 40.0
MARGIN = 20.0


def _shade(v: float, lo: float, hi: float) -> str:
    if v == INF:
        return "#000000"
    if hi <= lo:
        g = 235
    else:
        t = (math.log(v) - math.log(lo)) / (math.log(hi) - math.log(lo))
        g = int(round(245 - 150 * t))
    return f"#{g:02x}{g:02x}{g:02x}"


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(mesh: Mesh, weights: WeightField | None = None, paths: Sequence[Sequence[Point]] = (),
               labels: Sequence[str] = (), title: str | None = None) -> bytes:
    """SVG document; cells are shaded by log-weight (obstacles black), paths drawn in label colours."""
    if len(labels) not in (0, len(paths)):
        raise ValueError("labels must match paths")
    labels = list(labels) or [f"path{i}" for i in range(len(paths))]
    xy = mesh.corner_xy
    x0, y0 = xy.min(axis=0)
    x1, y1 = xy.max(axis=0)
    width = (x1 - x0) * SCALE + 2 * MARGIN
    height = (y1 - y0) * SCALE + 2 * MARGIN

    def sx(x):
        return (x - x0) * SCALE + MARGIN

    def sy(y):  # y grows upwards in the mesh
        return (y1 - y) * SCALE + MARGIN

    vals = weights.values if weights is not None else [1.0] * mesh.n_cells
    finite = [v for v in vals if v != INF]
    lo, hi = (min(finite), max(finite)) if finite else (1.0, 1.0)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
           f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">']
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append('<g id="cells" stroke="#808080" stroke-width="0.5">')
    for ci, cyc in enumerate(mesh.cell_corners):
        pts = " ".join(f"{_fmt(sx(xy[c, 0]))},{_fmt(sy(xy[c, 1]))}" for c in cyc)
        out.append(f'<polygon points="{pts}" fill="{_shade(vals[ci], lo, hi)}"/>')
    out.append("</g>")
    for path, label in zip(paths, labels):
        if not path:
            continue
        colour = PATH_COLOURS.get(label, "#7f7f7f")
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in (mesh.real(p) for p in path))
        out.append(f'<polyline class="{escape(label)}" points="{pts}" fill="none" stroke="{colour}" '
                   f'stroke-width="2" stroke-linejoin="round"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
