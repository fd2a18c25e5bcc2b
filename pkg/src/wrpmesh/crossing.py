"""Crossing paths, coincidence points, polygon types and shortcut paths.

A shortest path is cut into the points where it changes the cell (or edge) it
belongs to.  Each consecutive pair of such points defines a short run of
corners of the current cell; concatenating the runs gives a grid walk whose
ratio to the shortest path decomposes over the polygons bounded by the two
paths.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graphs import GridGraph, NeighborScheme, check_scheme
from .mesh import (
    INF,
    AtCorner,
    InteriorOf,
    Mesh,
    OnEdge,
    Outside,
    Placement,
    Point,
    Polyline,
    WeightField,
    corners_polyline,
    dedupe,
    locate,
    orient,
    path_weighted_length,
    segment_pieces,
)

MEDIANT_SLACK = 1e-9


@dataclass(frozen=True)
class CrossingSequence:
    """Points a_1..a_{n+1} and the signature of the piece between each pair.

    A signature is ``("C", cell)`` for a piece through a cell interior and
    ``("E", edge)`` for a piece riding an edge.
    """

    points: tuple[Point, ...]
    placements: tuple[Placement, ...]
    signatures: tuple[tuple[str, int], ...]

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class PolygonRecord:
    u_start: Point
    u_end: Point
    ell: int
    k: int
    sp_cost: float
    x_cost: float
    ratio: float
    flagged: bool = False


@dataclass(frozen=True)
class PolygonReport:
    records: tuple[PolygonRecord, ...]
    sp_cost: float
    x_cost: float
    whole_ratio: float
    max_ratio: float
    mediant_ok: bool


def _signature(pl: Placement) -> tuple[str, int]:
    if isinstance(pl, InteriorOf):
        return ("C", pl.cell)
    if isinstance(pl, OnEdge):
        return ("E", pl.edge)
    raise ValueError("path leaves the mesh")


def boundary_crossings(mesh: Mesh, path: Sequence[Point]) -> CrossingSequence:
    path = dedupe(path)
    if len(path) < 2:
        raise ValueError("path needs at least two distinct points")
    pts = [path[0]]
    sigs: list[tuple[str, int]] = []
    for a, b in zip(path, path[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        for _, l1, pl in segment_pieces(mesh, a, b):
            if isinstance(pl, Outside):
                raise ValueError("path leaves the mesh")
            sig = _signature(pl)
            end = (a[0] + l1 * dx, a[1] + l1 * dy)
            if sigs and sigs[-1] == sig:
                pts[-1] = end
            else:
                sigs.append(sig)
                pts.append(end)
    for p in (pts[0], pts[-1]):
        if isinstance(locate(mesh, p), Outside):
            raise ValueError("path leaves the mesh")
    return CrossingSequence(tuple(pts), tuple(locate(mesh, p) for p in pts), tuple(sigs))


# -- crossing path ---------------------------------------------------------------


def _cycle_position(mesh: Mesh, cyc: tuple[int, ...], pl: Placement):
    n = len(cyc)
    if isinstance(pl, AtCorner) and pl.corner in cyc:
        return "v", cyc.index(pl.corner)
    if isinstance(pl, OnEdge):
        for k in range(n):
            if mesh.edge_between(cyc[k], cyc[(k + 1) % n]) == pl.edge:
                return "e", k
    raise ValueError("crossing point is not on the boundary of its cell")


def _closed_edges(pos, n: int) -> set[int]:
    kind, j = pos
    return {(j - 1) % n, j} if kind == "v" else {j}


def _same_edge(mesh: Mesh, ends: tuple[int, int], a: Point, b: Point, first: bool, a_corner) -> list[int]:
    lo, hi = ends
    (x0, y0), (x1, y1) = mesh.corners[lo], mesh.corners[hi]
    forward = (b[0] - a[0]) * (x1 - x0) + (b[1] - a[1]) * (y1 - y0) > 0
    u, v = (lo, hi) if forward else (hi, lo)
    if first:
        return [a_corner if a_corner is not None else u, v]
    return [v]


def _side(a: Point, b: Point, mesh: Mesh, corner: int) -> int:
    return orient(a, b, mesh.corner_point(corner))


def _cell_step(mesh: Mesh, cell: int, a: Point, b: Point, pa_pl, pb_pl, scheme: NeighborScheme,
               first: bool, last: int | None) -> list[int]:
    cyc = mesh.cell_corners[cell]
    n = len(cyc)
    pa = _cycle_position(mesh, cyc, pa_pl)
    pb = _cycle_position(mesh, cyc, pb_pl)
    ea_set, eb_set = _closed_edges(pa, n), _closed_edges(pb, n)
    a_corner = cyc[pa[1]] if pa[0] == "v" else None
    common = ea_set & eb_set
    if common:
        k = common.pop()
        ends = tuple(sorted((cyc[k], cyc[(k + 1) % n])))
        return _same_edge(mesh, ends, a, b, first, a_corner)
    both_corners = pa[0] == "v" and pb[0] == "v"
    if both_corners and scheme is NeighborScheme.HEX12:
        return [cyc[pa[1]], cyc[pb[1]]]
    if both_corners and n == 4:
        others = [c for c in cyc if c not in (cyc[pa[1]], cyc[pb[1]])]
        right = [c for c in others if _side(a, b, mesh, c) < 0]
        return [cyc[pa[1]], right[0], cyc[pb[1]]]

    relations = []
    for ea in sorted(ea_set):
        for eb in sorted(eb_set):
            d = (eb - ea) % n
            if d in (1, n - 1):
                relations.append((0, ea, d))
            elif n == 6 and d in (2, 4):
                relations.append((1, ea, d))
            elif d == n // 2:
                relations.append((2, ea, d))
    if not relations:
        raise ValueError("malformed crossing sequence")
    rank = min(r[0] for r in relations)
    chosen = [r for r in relations if r[0] == rank]

    if rank == 0:
        _, ea, d = chosen[0]
        if d == 1:
            u, v, u2 = cyc[ea], cyc[(ea + 1) % n], cyc[(ea + 2) % n]
        else:
            u, v, u2 = cyc[(ea + 1) % n], cyc[ea], cyc[(ea - 1) % n]
        return [u, v, u2] if a_corner == u else [v, u2]

    if rank == 1:
        chains = []
        for _, ea, d in chosen:
            if d == 2:
                chain = (cyc[ea], cyc[(ea + 1) % n], cyc[(ea + 2) % n], cyc[(ea + 3) % n])
            else:
                chain = (cyc[(ea + 1) % n], cyc[ea], cyc[(ea - 1) % n], cyc[(ea - 2) % n])
            chains.append(chain)
        if len(chains) > 1:
            # opposite corners: take the run of corners to the right of a -> b
            chains = [ch for ch in chains if _side(a, b, mesh, ch[1]) < 0] or chains
        u, v, u2, v2 = chains[0]
        if scheme is NeighborScheme.HEX12:
            return [u, u2, v2] if a_corner == u else [u, v, u2, v2]
        return [u, v, u2, v2] if a_corner == u else [v, u2, v2]

    _, ea, _ = chosen[0]
    eb = (ea + n // 2) % n
    side = _side(a, b, mesh, last) if last is not None else -1
    if side == 0:
        side = -1
    e1 = (cyc[ea], cyc[(ea + 1) % n])
    e2 = (cyc[eb], cyc[(eb + 1) % n])
    v2 = next(c for c in e2 if _side(a, b, mesh, c) == side)
    if scheme is NeighborScheme.HEX3:
        v = next(c for c in e1 if _side(a, b, mesh, c) == side)
        step = 1 if v == cyc[(ea + 1) % n] else -1
        j = cyc.index(v)
        return [v, cyc[(j + step) % n], v2]
    return [v2]


def crossing_path_ids(mesh: Mesh, path: Sequence[Point], scheme) -> list[int]:
    scheme = check_scheme(mesh, scheme)
    if scheme is NeighborScheme.CORNER_COMPLETE:
        raise ValueError("crossing paths are defined for the k-corner schemes")
    cs = boundary_crossings(mesh, path)
    out: list[int] = []
    for i, sig in enumerate(cs.signatures):
        a, b = cs.points[i], cs.points[i + 1]
        pa, pb = cs.placements[i], cs.placements[i + 1]
        first = i == 0
        last = out[-1] if out else None
        if sig[0] == "E":
            a_corner = pa.corner if isinstance(pa, AtCorner) else None
            step = _same_edge(mesh, mesh.edges[sig[1]], a, b, first, a_corner)
        else:
            step = _cell_step(mesh, sig[1], a, b, pa, pb, scheme, first, last)
        for c in step:
            if not out or out[-1] != c:
                out.append(c)
    return out


def crossing_path(mesh: Mesh, path: Sequence[Point], scheme) -> Polyline:
    """Grid walk built from the crossing sequence of ``path``.

    Square4 and Square8 share one construction that only uses cell edges; Hex3
    and Hex12 follow their own case lists.
    """
    return corners_polyline(mesh, crossing_path_ids(mesh, path, scheme))


def validate_grid_path(graph: GridGraph, path: Sequence[Point]) -> bool:
    mesh = graph.mesh
    ids = []
    for p in path:
        pl = locate(mesh, p)
        if not isinstance(pl, AtCorner):
            return False
        ids.append(pl.corner)
    if not ids:
        return False
    return all(graph.has_edge(u, v) for u, v in zip(ids, ids[1:]))


# -- coincidence points ---------------------------------------------------------------


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _segment_hits(p0: Point, p1: Point, q0: Point, q1: Point):
    """Exact common points of two closed segments as (lambda on p, mu on q)."""
    if (max(p0[0], p1[0]) < min(q0[0], q1[0]) or max(q0[0], q1[0]) < min(p0[0], p1[0])
            or max(p0[1], p1[1]) < min(q0[1], q1[1]) or max(q0[1], q1[1]) < min(p0[1], p1[1])):
        return []
    rx, ry = p1[0] - p0[0], p1[1] - p0[1]
    sx, sy = q1[0] - q0[0], q1[1] - q0[1]
    qx, qy = q0[0] - p0[0], q0[1] - p0[1]
    denom = _cross(rx, ry, sx, sy)
    if denom != 0:
        lam = _cross(qx, qy, sx, sy) / denom
        mu = _cross(qx, qy, rx, ry) / denom
        if 0 <= lam <= 1 and 0 <= mu <= 1:
            return [(lam, mu)]
        return []
    if _cross(qx, qy, rx, ry) != 0:
        return []
    rr = rx * rx + ry * ry
    ss = sx * sx + sy * sy
    t0 = (qx * rx + qy * ry) / rr
    t1 = ((q1[0] - p0[0]) * rx + (q1[1] - p0[1]) * ry) / rr
    lo, hi = max(Fraction(0), min(t0, t1)), min(Fraction(1), max(t0, t1))
    if lo > hi:
        return []
    out = []
    for lam in {lo, hi}:
        px, py = p0[0] + lam * rx, p0[1] + lam * ry
        mu = ((px - q0[0]) * sx + (py - q0[1]) * sy) / ss
        out.append((lam, mu))
    return out


def _position_point(path: Sequence[Point], pos: Fraction) -> Point:
    i = pos.numerator // pos.denominator
    if i >= len(path) - 1:
        return path[-1]
    lam = pos - i
    a, b = path[i], path[i + 1]
    return (a[0] + lam * (b[0] - a[0]), a[1] + lam * (b[1] - a[1]))


def _coincidences(sp: Sequence[Point], xp: Sequence[Point]) -> list[tuple[Fraction, Fraction]]:
    hits: dict[Fraction, list[Fraction]] = {}
    for i, (p0, p1) in enumerate(zip(sp, sp[1:])):
        for j, (q0, q1) in enumerate(zip(xp, xp[1:])):
            for lam, mu in _segment_hits(p0, p1, q0, q1):
                hits.setdefault(i + lam, []).append(j + mu)
    sp_end, x_end = Fraction(len(sp) - 1), Fraction(len(xp) - 1)
    chosen = [(Fraction(0), Fraction(0))]
    for pos in sorted(hits):
        if pos <= chosen[-1][0] or pos >= sp_end:
            continue
        ahead = [m for m in hits[pos] if m >= chosen[-1][1]]
        if ahead:
            chosen.append((pos, min(ahead)))
    chosen.append((sp_end, x_end))
    return chosen


def coincidence_points(sp: Sequence[Point], xp: Sequence[Point]) -> list[Point]:
    """Ordered points where the two s-t paths meet, monotone along both."""
    sp, xp = dedupe(sp), dedupe(xp)
    if sp[0] != xp[0] or sp[-1] != xp[-1]:
        raise ValueError("paths must share their endpoints")
    if len(sp) < 2:
        return [sp[0]]
    return [_position_point(sp, a) for a, _ in _coincidences(sp, xp)]


def _subpath(path: Sequence[Point], p0: Fraction, p1: Fraction) -> Polyline:
    pts = [_position_point(path, p0)]
    i = p0.numerator // p0.denominator + 1
    while i < p1:
        pts.append(path[i])
        i += 1
    pts.append(_position_point(path, p1))
    return dedupe(pts)


# -- polygon classification ----------------------------------------------------------------


def _simplify(path: Sequence[Point]) -> Polyline:
    pts = list(dedupe(path))
    out: list[Point] = []
    for p in pts:
        while len(out) >= 2 and orient(out[-2], out[-1], p) == 0 and (
                (out[-1][0] - out[-2][0]) * (p[0] - out[-1][0]) + (out[-1][1] - out[-2][1]) * (p[1] - out[-1][1])) > 0:
            out.pop()
        out.append(p)
    return tuple(out)


def _met_edges(mesh: Mesh, path: Sequence[Point]) -> set[int]:
    """Edges whose relative interior the polyline meets."""
    met: set[int] = set()
    for p in path:
        pl = locate(mesh, p)
        if isinstance(pl, OnEdge):
            met.add(pl.edge)
    for a, b in zip(path, path[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        for l0, l1, pl in segment_pieces(mesh, a, b):
            if isinstance(pl, OnEdge):
                met.add(pl.edge)
            for lam in (l0, l1):
                q = locate(mesh, (a[0] + lam * dx, a[1] + lam * dy))
                if isinstance(q, OnEdge):
                    met.add(q.edge)
    return met


def _interior_cells(mesh: Mesh, path: Sequence[Point]) -> list[int]:
    cells: list[int] = []
    for a, b in zip(path, path[1:]):
        for _, _, pl in segment_pieces(mesh, a, b):
            if isinstance(pl, InteriorOf) and (not cells or cells[-1] != pl.cell):
                cells.append(pl.cell)
    return cells


def _edge_vector(mesh: Mesh, e: int):
    a, b = mesh.edges[e]
    (x0, y0), (x1, y1) = mesh.corners[a], mesh.corners[b]
    return x1 - x0, y1 - y0


def _parallel(mesh: Mesh, e: int, f: int) -> bool:
    ux, uy = _edge_vector(mesh, e)
    vx, vy = _edge_vector(mesh, f)
    return ux * vy - uy * vx == 0


def classify_polygon(mesh: Mesh, sp_seg: Sequence[Point], xp_seg: Sequence[Point],
                     scheme=None) -> tuple[int, int]:
    """Type (l, k) of the polygon bounded by the two sub-paths.

    ``l`` counts the cells whose interior the shortest-path piece meets and
    ``k + 1`` the edges of the last such cell met by either piece.  For Hex12 a
    piece that only touches the entry edge and its opposite edge is type k = 3.
    """
    sp_seg, xp_seg = dedupe(sp_seg), dedupe(xp_seg)
    if _simplify(sp_seg) == _simplify(xp_seg):
        return 1, 0
    cells = _interior_cells(mesh, sp_seg)
    distinct = sorted(set(cells))
    ell = max(1, len(distinct))
    if cells:
        last = cells[-1]
    else:
        common = [c for c in range(mesh.n_cells)
                  if all(not isinstance(locate(mesh, p), Outside) and _in_closed_cell(mesh, c, p) for p in sp_seg)]
        if not common:
            return ell, -1
        last = common[0]
    cell_edges = set(mesh.cell_edges[last])
    met = (_met_edges(mesh, sp_seg) | _met_edges(mesh, xp_seg)) & cell_edges
    k = len(met) - 1
    if scheme is not None and NeighborScheme(scheme) is NeighborScheme.HEX12:
        start = locate(mesh, sp_seg[0])
        if isinstance(start, OnEdge):
            e1 = start.edge
            par = {e for e in cell_edges if _parallel(mesh, e, e1)}
            if ell == 1 and e1 in cell_edges and met == par:
                k = 3
            elif ell >= 2 and len(par) == 2 and par <= (_met_edges(mesh, sp_seg) & cell_edges):
                k = 3
    return ell, k


def _in_closed_cell(mesh: Mesh, cell: int, p: Point) -> bool:
    pl = locate(mesh, p)
    if isinstance(pl, InteriorOf):
        return pl.cell == cell
    if isinstance(pl, OnEdge):
        return pl.edge in mesh.cell_edges[cell]
    if isinstance(pl, AtCorner):
        return pl.corner in mesh.cell_corners[cell]
    return False


def admissible(mesh: Mesh, ell: int, k: int) -> bool:
    kmax = 3 if mesh.is_hex else 2
    if ell == 1:
        return 0 <= k <= kmax
    return ell >= 2 and 1 <= k <= kmax


def per_polygon_ratios(mesh: Mesh, w: WeightField, sp: Sequence[Point], xp: Sequence[Point],
                       scheme=None) -> PolygonReport:
    """Split both paths at their coincidence points and price each polygon.

    The whole-path ratio can never exceed the largest local ratio; the report
    records whether that holds numerically.
    """
    sp, xp = dedupe(sp), dedupe(xp)
    if sp[0] != xp[0] or sp[-1] != xp[-1]:
        raise ValueError("paths must share their endpoints")
    records = []
    if len(sp) >= 2:
        marks = _coincidences(sp, xp)
        for (a0, b0), (a1, b1) in zip(marks, marks[1:]):
            sseg = _subpath(sp, a0, a1)
            xseg = _subpath(xp, b0, b1)
            ell, k = classify_polygon(mesh, sseg, xseg, scheme)
            sc = path_weighted_length(mesh, w, sseg) if len(sseg) > 1 else 0.0
            xc = path_weighted_length(mesh, w, xseg) if len(xseg) > 1 else 0.0
            if sc > 0:
                ratio = xc / sc
            else:
                ratio = 1.0 if xc == 0 else INF
            flagged = not admissible(mesh, ell, k) or ratio == INF
            records.append(PolygonRecord(sseg[0], sseg[-1], ell, k, sc, xc, ratio, flagged))
    sp_cost = path_weighted_length(mesh, w, sp) if len(sp) > 1 else 0.0
    x_cost = path_weighted_length(mesh, w, xp) if len(xp) > 1 else 0.0
    whole = x_cost / sp_cost if sp_cost > 0 else 1.0
    finite = [r.ratio for r in records if not (r.sp_cost == 0 and r.x_cost == 0)]
    max_ratio = max(finite) if finite else 1.0
    ok = whole <= max_ratio + MEDIANT_SLACK
    return PolygonReport(tuple(records), sp_cost, x_cost, whole, max_ratio, ok)


# -- shortcut paths -------------------------------------------------------------------


def _corner_ids(mesh: Mesh, xp: Sequence[Point]) -> list[int]:
    ids = []
    for p in xp:
        pl = locate(mesh, p)
        if not isinstance(pl, AtCorner):
            raise ValueError("shortcut input must be a corner walk")
        ids.append(pl.corner)
    return ids


def _boundary_distance(cyc: tuple[int, ...], a: int, b: int) -> int:
    n = len(cyc)
    d = (cyc.index(b) - cyc.index(a)) % n
    return min(d, n - d)


def _replace_run(mesh: Mesh, xp: Sequence[Point], cell: int, run: int, span: int) -> Polyline | None:
    cyc = mesh.cell_corners[cell]
    ids = _corner_ids(mesh, xp)
    for i in range(len(ids) - run + 1):
        window = ids[i:i + run]
        if not all(c in cyc for c in window) or len(set(window)) != run:
            continue
        if not all(_boundary_distance(cyc, x, y) == 1 for x, y in zip(window, window[1:])):
            continue
        if _boundary_distance(cyc, window[0], window[-1]) != span:
            continue
        return corners_polyline(mesh, ids[:i + 1] + ids[i + run - 1:])
    return None


def shortcut_path_square(mesh: Mesh, xp: Sequence[Point], cell: int) -> Polyline:
    """Replace two boundary edges of ``cell`` walked by ``xp`` with the cell diagonal."""
    out = _replace_run(mesh, xp, cell, 3, 2)
    if out is None:
        raise ValueError("crossing path does not walk two edges of this cell")
    return out


def shortcut_paths_hex(mesh: Mesh, xp: Sequence[Point], cell: int) -> dict[str, Polyline]:
    """Shortcuts through a hex cell: two edges by a short chord, three by the long diagonal."""
    out = {}
    pi2 = _replace_run(mesh, xp, cell, 3, 2)
    pi3 = _replace_run(mesh, xp, cell, 4, 3)
    if pi2 is not None:
        out["pi2"] = pi2
    if pi3 is not None:
        out["pi3"] = pi3
    if not out:
        raise ValueError("crossing path does not walk two consecutive edges of this cell")
    return out
