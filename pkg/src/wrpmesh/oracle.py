"""Steiner-point approximation of the continuous weighted shortest path.

The discrete path is refined by convex optimisation over the positions of its
edge crossings and certified with a Snell's-law residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .graphs import _check_corner, _csr, _walk
from .mesh import (
    INF,
    InteriorOf,
    Mesh,
    OnEdge,
    Outside,
    Point,
    Polyline,
    WeightField,
    dedupe,
    locate,
    path_weighted_length,
    placement_weight,
    segment_pieces,
)


@dataclass(frozen=True)
class SteinerConfig:
    m: int = 12
    refine: bool = True
    refine_tol: float = 1e-10
    max_iters: int = 10_000
    coarse_levels: bool = True  # also refine the paths for m//2, m//4, ..., 1

    def levels(self) -> tuple[int, ...]:
        out = [self.m]
        while self.coarse_levels and out[-1] > 1:
            out.append(out[-1] // 2)
        return tuple(out)

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, (int, np.integer)) or self.m < 0:
            raise ValueError("m must be a non-negative integer")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")
        if not self.max_iters >= 1:
            raise ValueError("max_iters must be at least 1")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "refine", bool(self.refine))
        object.__setattr__(self, "coarse_levels", bool(self.coarse_levels))


# -- Steiner graph -----------------------------------------------------------


@lru_cache(maxsize=16)
def _cell_template(mesh: Mesh, m: int):
    """Boundary positions of one cell and the chord pairs joining them.

    Every cell of a mesh is a translate of every other, so chord lengths are
    shared.  Pairs on the same closed edge are excluded; they are covered by the
    edge runs.
    """
    sides = mesh.sides
    per = m + 1
    npos = sides * per
    cyc = mesh.cell_corners[0]
    pts = []
    for k in range(sides):
        a = mesh.corner_xy[cyc[k]]
        b = mesh.corner_xy[cyc[(k + 1) % sides]]
        for j in range(per):
            pts.append(a + (b - a) * (j / per))
    pts = np.array(pts)

    def closed_edges(p):
        k, j = divmod(p, per)
        return {k, (k - 1) % sides} if j == 0 else {k}

    ii, jj = [], []
    for p in range(npos):
        ep = closed_edges(p)
        for q in range(p + 1, npos):
            if not ep & closed_edges(q):
                ii.append(p)
                jj.append(q)
    ii = np.array(ii, dtype=np.int64)
    jj = np.array(jj, dtype=np.int64)
    lengths = np.hypot(*(pts[jj] - pts[ii]).T)
    return ii, jj, lengths


@lru_cache(maxsize=16)
def _boundary_ids(mesh: Mesh, m: int) -> np.ndarray:
    sides, per, c = mesh.sides, m + 1, mesh.n_corners
    ids = np.empty((mesh.n_cells, sides * per), dtype=np.int64)
    for ci, cyc in enumerate(mesh.cell_corners):
        for k in range(sides):
            a, b = cyc[k], cyc[(k + 1) % sides]
            e = mesh.edge_between(a, b)
            ids[ci, k * per] = a
            for j in range(m):
                idx = j if a < b else m - 1 - j
                ids[ci, k * per + 1 + j] = c + e * m + idx
    return ids


@dataclass(frozen=True)
class SteinerGraph:
    mesh: Mesh
    m: int
    indptr: np.ndarray
    indices: np.ndarray
    costs: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.mesh.n_corners + self.mesh.n_edges * self.m

    def vertex_point(self, v: int) -> Point:
        c = self.mesh.n_corners
        if v < c:
            return self.mesh.corner_point(v)
        e, k = divmod(v - c, self.m)
        return self.mesh.edge_point(e, Fraction(k + 1, self.m + 1))


def build_steiner_graph(mesh: Mesh, w: WeightField, m: int) -> SteinerGraph:
    """Corners plus ``m`` evenly spaced points per edge, joined through cells and along edges."""
    c, ne = mesh.n_corners, mesh.n_edges
    srcs, dsts, costs = [], [], []
    ii, jj, lengths = _cell_template(mesh, m)
    ids = _boundary_ids(mesh, m)
    finite = np.nonzero(np.isfinite(w.values))[0]
    if finite.size:
        sub = ids[finite]
        srcs.append(sub[:, ii].ravel())
        dsts.append(sub[:, jj].ravel())
        costs.append((w.values[finite][:, None] * lengths[None, :]).ravel())
    # runs along each edge (lower corner, interior points, upper corner)
    edge_w = np.array([w.edge_weight(e) for e in range(ne)])
    keep = np.nonzero(np.isfinite(edge_w))[0]
    if keep.size:
        ends = np.array(mesh.edges, dtype=np.int64)[keep]
        chain = np.empty((keep.size, m + 2), dtype=np.int64)
        chain[:, 0] = ends[:, 0]
        chain[:, -1] = ends[:, 1]
        if m:
            chain[:, 1:-1] = c + keep[:, None] * m + np.arange(m)[None, :]
        srcs.append(chain[:, :-1].ravel())
        dsts.append(chain[:, 1:].ravel())
        costs.append(np.repeat(edge_w[keep] / (m + 1), m + 1))
    n = c + ne * m
    if srcs:
        a, b, cc = np.concatenate(srcs), np.concatenate(dsts), np.concatenate(costs)
    else:
        a = b = np.zeros(0, dtype=np.int64)
        cc = np.zeros(0)
    indptr, indices, csr_costs = _csr(n, a, b, cc)
    return SteinerGraph(mesh, m, indptr, indices, csr_costs)


def steiner_path(mesh: Mesh, w: WeightField, s: int, t: int, m: int) -> tuple[Polyline, float]:
    g = build_steiner_graph(mesh, w, m)
    dist, pred = kernels.csr_dijkstra(g.indptr, g.indices, g.costs, s, t)
    if not math.isfinite(dist[t]):
        return (), INF
    return tuple(g.vertex_point(v) for v in _walk(pred, s, t)), float(dist[t])


# -- refinement ------------------------------------------------------------------


@dataclass
class _Chain:
    nodes: list          # exact points
    pieces: list         # placement of each piece between consecutive nodes
    free: list           # (node index, edge id) of movable crossings


def _build_chain(mesh: Mesh, path: Sequence[Point]) -> _Chain | None:
    nodes = [path[0]]
    pieces: list = []
    for a, b in zip(path, path[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        for _, l1, pl in segment_pieces(mesh, a, b):
            if isinstance(pl, Outside):
                return None
            end = (a[0] + l1 * dx, a[1] + l1 * dy)
            if pieces and pieces[-1] == pl:
                nodes[-1] = end
            else:
                pieces.append(pl)
                nodes.append(end)
    free = []
    for j in range(1, len(nodes) - 1):
        pl = locate(mesh, nodes[j])
        if (isinstance(pl, OnEdge) and isinstance(pieces[j - 1], InteriorOf)
                and isinstance(pieces[j], InteriorOf)):
            free.append((j, pl.edge))
    return _Chain(nodes, pieces, free)


def refine_fixed_sequence(mesh: Mesh, w: WeightField, path: Sequence[Point],
                          cfg: SteinerConfig | None = None) -> tuple[Polyline, float]:
    """Move the edge crossings of ``path`` to minimise its cost.

    Crossings flanked by two cell-interior pieces slide along their edge;
    corners and the endpoints of edge-riding pieces stay put.  Coordinate
    descent runs until a sweep gains less than ``refine_tol`` relatively, then a
    projected Newton pass polishes the joint optimum.
    """
    cfg = cfg or SteinerConfig()
    path = dedupe(path)
    base = path_weighted_length(mesh, w, path)
    if len(path) < 2 or base == INF:
        return path, base
    chain = _build_chain(mesh, path)
    if chain is None or not chain.free:
        return path, base
    c = np.array([placement_weight(w, pl) for pl in chain.pieces])
    if not np.isfinite(c).all():
        return path, base
    sx, sy = mesh.sx, mesh.sy
    px = np.array([float(p[0]) * sx for p in chain.nodes])
    py = np.array([float(p[1]) * sy for p in chain.nodes])
    nf = len(chain.free)
    free_idx = np.array([j for j, _ in chain.free], dtype=np.int64)
    ax, ay, ux, uy, tv = (np.empty(nf) for _ in range(5))
    for i, (j, e) in enumerate(chain.free):
        a, b = mesh.edges[e]
        (x0, y0), (x1, y1) = mesh.corners[a], mesh.corners[b]
        ax[i], ay[i] = x0 * sx, y0 * sy
        ux[i], uy[i] = (x1 - x0) * sx, (y1 - y0) * sy
        node = chain.nodes[j]
        lu = (x1 - x0) ** 2 + (y1 - y0) ** 2
        tv[i] = float(((node[0] - x0) * (x1 - x0) + (node[1] - y0) * (y1 - y0)) / lu)
    kernels.coordinate_descent(px, py, c, free_idx, ax, ay, ux, uy, tv, cfg.refine_tol, cfg.max_iters)
    kernels.newton_polish(px, py, c, free_idx, ax, ay, ux, uy, tv, 100)
    nodes = list(chain.nodes)
    for i, (j, e) in enumerate(chain.free):
        nodes[j] = mesh.edge_point(e, Fraction(float(tv[i])))
    out = dedupe(nodes)
    if len(out) < 2:
        return path, base
    cost = path_weighted_length(mesh, w, out)
    if cost <= base:
        return out, cost
    return path, base


def approx_shortest_path(mesh: Mesh, w: WeightField, s: int, t: int, cfg: SteinerConfig | None = None,
                         candidates: Sequence[Sequence[Point]] = ()) -> tuple[Polyline, float]:
    """Approximate continuous shortest path between corners ``s`` and ``t``.

    The Steiner path is computed for ``m`` and, unless ``coarse_levels`` is off,
    for each halving of ``m``; every path is refined and the cheapest kept, so
    the estimate for ``m`` never exceeds the one for ``m // 2``.
    ``candidates`` are extra s-t polylines (for instance vertex or grid paths)
    that are refined alongside the Steiner path; the cheapest result wins, which
    keeps the estimate below every discrete path handed in.
    """
    cfg = cfg or SteinerConfig()
    s, t = _check_corner(mesh, s), _check_corner(mesh, t)
    if s == t:
        return (mesh.corner_point(s),), 0.0
    starts: list[Polyline] = []
    for m in cfg.levels():
        sp, raw = steiner_path(mesh, w, s, t, m)
        if raw == INF:
            break
        starts.append(dedupe(sp))
    ps, pt = mesh.corner_point(s), mesh.corner_point(t)
    for cand in candidates:
        cand = dedupe(cand)
        if len(cand) >= 2 and cand[0] == ps and cand[-1] == pt:
            starts.append(cand)
    starts = list(dict.fromkeys(starts))
    best_path: Polyline = ()
    best_cost = INF
    for start in starts:
        if cfg.refine:
            path, cost = refine_fixed_sequence(mesh, w, start, cfg)
        else:
            path, cost = start, path_weighted_length(mesh, w, start)
        if cost < best_cost:
            best_path, best_cost = path, cost
    return best_path, best_cost


def snell_residual(mesh: Mesh, w: WeightField, path: Sequence[Point]) -> float:
    """Largest |w_in sin(in) - w_out sin(out)| over proper crossings of an edge interior.

    Angles are measured from the edge normal; corners and edge-riding pieces are
    skipped.
    """
    path = dedupe(path)
    if len(path) < 2:
        return 0.0
    chain = _build_chain(mesh, path)
    if chain is None:
        return 0.0
    worst = 0.0
    nodes, pieces = chain.nodes, chain.pieces
    for j, e in chain.free:
        cin, cout = pieces[j - 1].cell, pieces[j].cell
        if cin == cout:
            continue
        a, b = mesh.edges[e]
        ex, ey = mesh.corner_xy[b] - mesh.corner_xy[a]
        norm = math.hypot(ex, ey)
        ex, ey = ex / norm, ey / norm
        sines = []
        for p, q in ((nodes[j - 1], nodes[j]), (nodes[j], nodes[j + 1])):
            dx, dy = mesh.real((q[0] - p[0], q[1] - p[1]))
            sines.append(abs(dx * ex + dy * ey) / math.hypot(dx, dy))
        worst = max(worst, abs(w[cin] * sines[0] - w[cout] * sines[1]))
    return worst
