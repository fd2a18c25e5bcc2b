"""Square and hexagonal tessellations with exact incidence and the weighted-region metric.

Points are stored in *lattice coordinates* made of ``Fraction`` pairs.  For a
square mesh lattice and real coordinates coincide.  For a hexagonal mesh the
real position of lattice point ``(i, j)`` is ``(i * sqrt(3)/2, j / 2)``; every
corner has integer lattice coordinates.  The map is linear with positive
determinant, so incidence, parameters along segments and orientation tests are
exact in lattice coordinates.  Only lengths go through floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

INF = math.inf
SQRT3 = math.sqrt(3.0)

Point = tuple[Fraction, Fraction]
Polyline = tuple[Point, ...]
CellId = tuple[int, int]

# corner offsets listed clockwise (y axis pointing up)
SQUARE_CORNERS = ((0, 1), (1, 1), (1, 0), (0, 0))  # relative to the lower-left corner
HEX_CORNERS = ((0, 2), (1, 1), (1, -1), (0, -2), (-1, -1), (-1, 1))  # relative to the centre
HEX_NEIGHBOURS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))

# edge supporting lines: a*x + b*y = k*step for integer k
_SQUARE_LINES = ((1, 0, 1), (0, 1, 1))
_HEX_LINES = ((1, 0, 1), (1, -1, 2), (1, 1, 2))


class MeshKind(str, Enum):
    SQUARE = "Square"
    HEX = "Hex"


@dataclass(frozen=True)
class MeshSpec:
    kind: MeshKind
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "kind", MeshKind(self.kind))
        for name in ("width", "height"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))


@dataclass(frozen=True)
class InteriorOf:
    cell: int


@dataclass(frozen=True)
class OnEdge:
    edge: int


@dataclass(frozen=True)
class AtCorner:
    corner: int


@dataclass(frozen=True)
class Outside:
    pass


Placement = Union[InteriorOf, OnEdge, AtCorner, Outside]
OUTSIDE = Outside()


def point(x, y) -> Point:
    return (Fraction(x), Fraction(y))


class Mesh:
    """Immutable tessellation with corner, edge and cell incidence.

    Cells are indexed row-major.  Corner ids follow the lexicographic order of
    ``(y, x)`` lattice coordinates; edges are ordered by their corner-id pair.
    """

    def __init__(self, spec: MeshSpec):
        self.spec = spec
        self.kind = spec.kind
        self.width = spec.width
        self.height = spec.height
        self.is_hex = spec.kind is MeshKind.HEX
        if self.is_hex:
            self.sx, self.sy = SQRT3 / 2.0, 0.5
            offsets = HEX_CORNERS
        else:
            self.sx, self.sy = 1.0, 1.0
            offsets = SQUARE_CORNERS
        self.sides = len(offsets)

        cells: list[CellId] = []
        lattice_cycles = []
        for row in range(self.height):
            for col in range(self.width):
                if self.is_hex:
                    q, r = col - row // 2, row
                    cx, cy = 2 * q + r, 3 * r
                    cells.append((q, r))
                else:
                    cx, cy = col, row
                    cells.append((col, row))
                lattice_cycles.append([(cx + dx, cy + dy) for dx, dy in offsets])

        corners = sorted({c for cyc in lattice_cycles for c in cyc}, key=lambda c: (c[1], c[0]))
        self.corners: tuple[tuple[int, int], ...] = tuple(corners)
        self.corner_index = {c: i for i, c in enumerate(corners)}
        self.cells: tuple[CellId, ...] = tuple(cells)
        self.cell_index = {c: i for i, c in enumerate(cells)}
        self.cell_corners = tuple(tuple(self.corner_index[c] for c in cyc) for cyc in lattice_cycles)

        pairs = set()
        for cyc in self.cell_corners:
            for k in range(self.sides):
                a, b = cyc[k], cyc[(k + 1) % self.sides]
                pairs.add((min(a, b), max(a, b)))
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(pairs))
        self.edge_index = {e: i for i, e in enumerate(self.edges)}

        edge_cells = [[] for _ in self.edges]
        cell_edges = []
        for ci, cyc in enumerate(self.cell_corners):
            row = []
            for k in range(self.sides):
                a, b = cyc[k], cyc[(k + 1) % self.sides]
                e = self.edge_index[(min(a, b), max(a, b))]
                edge_cells[e].append(ci)
                row.append(e)
            cell_edges.append(tuple(row))
        self.edge_cells = tuple(tuple(x) for x in edge_cells)
        self.cell_edges = tuple(cell_edges)

        corner_cells = [[] for _ in self.corners]
        corner_edges = [[] for _ in self.corners]
        for ci, cyc in enumerate(self.cell_corners):
            for c in cyc:
                corner_cells[c].append(ci)
        for e, (a, b) in enumerate(self.edges):
            corner_edges[a].append(e)
            corner_edges[b].append(e)
        self.corner_cells = tuple(tuple(x) for x in corner_cells)
        self.corner_edges = tuple(tuple(x) for x in corner_edges)

        lat = np.array(self.corners, dtype=np.float64).reshape(-1, 2)
        self.corner_lattice = lat
        self.corner_lattice.flags.writeable = False
        self.corner_xy = lat * np.array([self.sx, self.sy])
        self.corner_xy.flags.writeable = False

    def __repr__(self):
        return f"Mesh({self.kind.value}, {self.width}x{self.height})"

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_corners(self) -> int:
        return len(self.corners)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    # -- geometry -----------------------------------------------------------

    def corner_point(self, c: int) -> Point:
        x, y = self.corners[c]
        return (Fraction(x), Fraction(y))

    def edge_point(self, e: int, t) -> Point:
        """Point at parameter ``t`` from the lower-id corner of edge ``e``."""
        a, b = self.edges[e]
        t = Fraction(t)
        (ax, ay), (bx, by) = self.corners[a], self.corners[b]
        return (ax + t * (bx - ax), ay + t * (by - ay))

    def real(self, p: Point) -> tuple[float, float]:
        return (float(p[0]) * self.sx, float(p[1]) * self.sy)

    def dist(self, p: Point, q: Point) -> float:
        return math.hypot(float(q[0] - p[0]) * self.sx, float(q[1] - p[1]) * self.sy)

    def cell_of(self, cid: CellId) -> int | None:
        return self.cell_index.get(tuple(cid))

    def cell_lattice_corners(self, cid: CellId) -> list[tuple[int, int]]:
        if self.is_hex:
            q, r = cid
            cx, cy = 2 * q + r, 3 * r
            return [(cx + dx, cy + dy) for dx, dy in HEX_CORNERS]
        col, row = cid
        return [(col + dx, row + dy) for dx, dy in SQUARE_CORNERS]

    def edge_between(self, a: int, b: int) -> int | None:
        return self.edge_index.get((min(a, b), max(a, b)))

    def common_cells(self, a: int, b: int) -> tuple[int, ...]:
        return tuple(c for c in self.corner_cells[a] if c in self.corner_cells[b])

    def locate(self, p: Point) -> Placement:
        return locate(self, p)


def build_mesh(spec: MeshSpec) -> Mesh:
    return Mesh(spec)


class WeightField:
    """Per-cell weights in [0, inf]; cells outside the mesh read as inf."""

    def __init__(self, mesh: Mesh, values: Iterable[float]):
        arr = np.array([float(v) for v in values], dtype=np.float64)
        if arr.shape != (mesh.n_cells,):
            raise ValueError(f"expected {mesh.n_cells} weights, got {arr.size}")
        if np.isnan(arr).any() or (arr < 0).any():
            raise ValueError("weights must be non-negative (inf allowed)")
        arr.flags.writeable = False
        self.mesh = mesh
        self.values = arr

    @classmethod
    def uniform(cls, mesh: Mesh, value: float = 1.0) -> "WeightField":
        return cls(mesh, [value] * mesh.n_cells)

    def __getitem__(self, cell: int) -> float:
        return float(self.values[cell])

    def of(self, cid: CellId) -> float:
        i = self.mesh.cell_of(cid)
        return INF if i is None else float(self.values[i])

    def edge_weight(self, e: int) -> float:
        cells = self.mesh.edge_cells[e]
        if len(cells) < 2:
            return INF if not cells else float(self.values[cells[0]])
        return float(min(self.values[cells[0]], self.values[cells[1]]))

    def replace(self, updates: dict[int, float]) -> "WeightField":
        vals = self.values.copy()
        for k, v in updates.items():
            vals[k] = v
        return WeightField(self.mesh, vals)

    def __eq__(self, other):
        return isinstance(other, WeightField) and self.mesh.spec == other.mesh.spec and np.array_equal(
            self.values, other.values)

    def __hash__(self):
        return hash((self.mesh.spec, self.values.tobytes()))


# -- point location -------------------------------------------------------------


def _floor(v: Fraction) -> int:
    return v.numerator // v.denominator


def _locate_square(mesh: Mesh, p: Point) -> Placement:
    x, y = p
    w, h = mesh.width, mesh.height
    xi, yi = _floor(x), _floor(y)
    x_int, y_int = x.denominator == 1, y.denominator == 1
    if x_int and y_int:
        c = mesh.corner_index.get((xi, yi))
        return AtCorner(c) if c is not None else OUTSIDE
    if x_int or y_int:
        if x_int:
            a, b = (xi, yi), (xi, yi + 1)
        else:
            a, b = (xi, yi), (xi + 1, yi)
        ca, cb = mesh.corner_index.get(a), mesh.corner_index.get(b)
        if ca is None or cb is None:
            return OUTSIDE
        e = mesh.edge_between(ca, cb)
        return OnEdge(e) if e is not None else OUTSIDE
    if 0 <= xi < w and 0 <= yi < h:
        return InteriorOf(yi * w + xi)
    return OUTSIDE


def _locate_hex(mesh: Mesh, p: Point) -> Placement:
    x, y = p
    q0 = _floor(x / 2 - y / 6)
    r0 = _floor(y / 3)
    best = None
    ties: list[CellId] = []
    for r in range(r0 - 1, r0 + 3):
        for q in range(q0 - 1, q0 + 3):
            dx = x - (2 * q + r)
            dy = y - 3 * r
            d = 3 * dx * dx + dy * dy
            if best is None or d < best:
                best, ties = d, [(q, r)]
            elif d == best:
                ties.append((q, r))
    if len(ties) == 1:
        ci = mesh.cell_of(ties[0])
        return InteriorOf(ci) if ci is not None else OUTSIDE
    if len(ties) == 2:
        common = set(mesh.cell_lattice_corners(ties[0])) & set(mesh.cell_lattice_corners(ties[1]))
        ids = [mesh.corner_index.get(c) for c in common]
        if len(ids) != 2 or None in ids:
            return OUTSIDE
        e = mesh.edge_between(ids[0], ids[1])
        return OnEdge(e) if e is not None else OUTSIDE
    if x.denominator != 1 or y.denominator != 1:  # pragma: no cover - Voronoi vertices are lattice points
        return OUTSIDE
    c = mesh.corner_index.get((int(x), int(y)))
    return AtCorner(c) if c is not None else OUTSIDE


def locate(mesh: Mesh, p: Point) -> Placement:
    """Exact classification of ``p`` as cell interior, edge, corner or outside."""
    p = (Fraction(p[0]), Fraction(p[1]))
    if mesh.is_hex:
        return _locate_hex(mesh, p)
    return _locate_square(mesh, p)


def placement_cells(mesh: Mesh, pl: Placement) -> tuple[int, ...]:
    if isinstance(pl, InteriorOf):
        return (pl.cell,)
    if isinstance(pl, OnEdge):
        return mesh.edge_cells[pl.edge]
    if isinstance(pl, AtCorner):
        return mesh.corner_cells[pl.corner]
    return ()


def placement_weight(w: WeightField, pl: Placement) -> float:
    if isinstance(pl, InteriorOf):
        return w[pl.cell]
    if isinstance(pl, OnEdge):
        return w.edge_weight(pl.edge)
    return INF


# -- segment decomposition ----------------------------------------------------------


def _ceil_div(a: Fraction, step: int) -> int:
    v = a / step
    return -((-v.numerator) // v.denominator)


def segment_pieces(mesh: Mesh, p: Point, q: Point) -> list[tuple[Fraction, Fraction, Placement]]:
    """Split ``pq`` at every crossing with a mesh edge line.

    Returns ``(lam0, lam1, placement)`` triples covering ``[0, 1]``;
    ``placement`` classifies the open piece and consecutive equal placements are
    merged.
    """
    p = (Fraction(p[0]), Fraction(p[1]))
    q = (Fraction(q[0]), Fraction(q[1]))
    lams = {Fraction(0), Fraction(1)}
    for a, b, step in (_HEX_LINES if mesh.is_hex else _SQUARE_LINES):
        f0 = a * p[0] + b * p[1]
        f1 = a * q[0] + b * q[1]
        if f0 == f1:
            continue
        lo, hi = (f0, f1) if f0 < f1 else (f1, f0)
        k = _ceil_div(lo, step)
        while k * step <= hi:
            lam = (k * step - f0) / (f1 - f0)
            if 0 < lam < 1:
                lams.add(lam)
            k += 1
    ordered = sorted(lams)
    dx, dy = q[0] - p[0], q[1] - p[1]
    out: list[tuple[Fraction, Fraction, Placement]] = []
    for l0, l1 in zip(ordered, ordered[1:]):
        m = (l0 + l1) / 2
        pl = locate(mesh, (p[0] + m * dx, p[1] + m * dy))
        if out and out[-1][2] == pl:
            out[-1] = (out[-1][0], l1, pl)
        else:
            out.append((l0, l1, pl))
    return out


def _check_inside(mesh: Mesh, p: Point):
    if isinstance(locate(mesh, p), Outside):
        raise ValueError(f"point {tuple(map(str, p))} lies outside the mesh")


def segment_weighted_length(mesh: Mesh, w: WeightField, p: Point, q: Point) -> float:
    """Weighted-region cost of the straight segment ``pq``.

    Interior pieces cost weight times length, pieces lying on an edge cost the
    smaller incident weight (outside counts as inf), isolated corner contacts
    cost nothing.
    """
    p = (Fraction(p[0]), Fraction(p[1]))
    q = (Fraction(q[0]), Fraction(q[1]))
    if p == q:
        raise ValueError("degenerate segment")
    _check_inside(mesh, p)
    _check_inside(mesh, q)
    a, b = (p, q) if p < q else (q, p)  # fixed orientation keeps the sum bitwise symmetric
    length = mesh.dist(a, b)
    total = 0.0
    for l0, l1, pl in segment_pieces(mesh, a, b):
        wt = placement_weight(w, pl)
        if wt == INF:
            return INF
        total += wt * (length * float(l1 - l0))
    return total


def as_polyline(points: Sequence) -> Polyline:
    pts = tuple((Fraction(x), Fraction(y)) for x, y in points)
    if not pts:
        raise ValueError("empty polyline")
    for a, b in zip(pts, pts[1:]):
        if a == b:
            raise ValueError("consecutive polyline vertices must differ")
    return pts


def dedupe(points: Sequence[Point]) -> Polyline:
    out: list[Point] = []
    for p in points:
        if not out or out[-1] != p:
            out.append(p)
    return tuple(out)


def path_weighted_length(mesh: Mesh, w: WeightField, path: Sequence[Point]) -> float:
    total = 0.0
    for a, b in zip(path, path[1:]):
        c = segment_weighted_length(mesh, w, a, b)
        if c == INF:
            return INF
        total += c
    return total


def polyline_length(mesh: Mesh, path: Sequence[Point]) -> float:
    return sum(mesh.dist(a, b) for a, b in zip(path, path[1:]))


def corners_polyline(mesh: Mesh, ids: Sequence[int]) -> Polyline:
    return tuple(mesh.corner_point(c) for c in ids)


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the cross product (b - a) x (c - a): +1 left, -1 right, 0 collinear."""
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)
