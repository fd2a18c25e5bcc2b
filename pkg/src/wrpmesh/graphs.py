"""k-corner grid graphs, the complete corner graph and deterministic Dijkstra."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .mesh import INF, Mesh, Polyline, WeightField, corners_polyline

DEFAULT_CORNER_CAP = 3000


class NeighborScheme(str, Enum):
    SQUARE4 = "Square4"
    SQUARE8 = "Square8"
    HEX3 = "Hex3"
    HEX12 = "Hex12"
    CORNER_COMPLETE = "CornerComplete"


SQUARE_SCHEMES = (NeighborScheme.SQUARE4, NeighborScheme.SQUARE8)
HEX_SCHEMES = (NeighborScheme.HEX3, NeighborScheme.HEX12)


def schemes_for(mesh: Mesh) -> tuple[NeighborScheme, ...]:
    return HEX_SCHEMES if mesh.is_hex else SQUARE_SCHEMES


def check_scheme(mesh: Mesh, scheme) -> NeighborScheme:
    scheme = NeighborScheme(scheme)
    if scheme is NeighborScheme.CORNER_COMPLETE:
        return scheme
    if (scheme in HEX_SCHEMES) != mesh.is_hex:
        raise ValueError(f"scheme {scheme.value} does not fit a {mesh.kind.value} mesh")
    return scheme


def _csr(n: int, a: np.ndarray, b: np.ndarray, cost: np.ndarray):
    src = np.concatenate([a, b])
    dst = np.concatenate([b, a])
    cc = np.concatenate([cost, cost])
    order = np.lexsort((dst, src))
    src, dst, cc = src[order], dst[order], cc[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int64), cc.astype(np.float64)


@dataclass(frozen=True)
class GridGraph:
    """Corner graph for one neighbour scheme.

    ``edges`` holds corner-id pairs (lower id first) and ``costs`` their prices;
    inf-cost edges are kept so degree counts do not depend on weights.  The
    complete corner graph is never materialised and is priced during search.
    """

    mesh: Mesh
    weights: WeightField
    scheme: NeighborScheme
    edges: np.ndarray
    costs: np.ndarray
    lengths: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    csr_costs: np.ndarray = field(repr=False)

    @property
    def lazy(self) -> bool:
        return self.scheme is NeighborScheme.CORNER_COMPLETE

    def degree(self, v: int) -> int:
        if self.lazy:
            return self.mesh.n_corners - 1
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        if self.lazy:
            return np.array([u for u in range(self.mesh.n_corners) if u != v], dtype=np.int64)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if self.lazy:
            return 0 <= u < self.mesh.n_corners and 0 <= v < self.mesh.n_corners
        return bool(np.any(self.neighbors(u) == v))

    def edge_cost(self, u: int, v: int) -> float:
        if self.lazy:
            return corner_pair_cost(self.mesh, self.weights, u, v)
        lo, hi = self.indptr[u], self.indptr[u + 1]
        hit = np.nonzero(self.indices[lo:hi] == v)[0]
        if hit.size == 0:
            raise KeyError((u, v))
        return float(self.csr_costs[lo + hit[0]])


def corner_pair_cost(mesh: Mesh, w: WeightField, u: int, v: int) -> float:
    """Float-kernel price of the straight segment between corners u and v."""
    (x0, y0), (x1, y1) = mesh.corners[u], mesh.corners[v]
    if (y0, x0) > (y1, x1):
        x0, y0, x1, y1 = x1, y1, x0, y0
    return float(kernels.corner_segment_cost(mesh.is_hex, float(x0), float(y0), float(x1), float(y1),
                                             w.values, mesh.width, mesh.height, mesh.sx, mesh.sy))


def _chord_offsets(scheme: NeighborScheme):
    """Pairs of cycle positions joined through a cell's interior."""
    if scheme is NeighborScheme.SQUARE8:
        return ((0, 2), (1, 3))
    if scheme is NeighborScheme.HEX12:
        return tuple((k, (k + 2) % 6) for k in range(6)) + tuple((k, k + 3) for k in range(3))
    return ()


def build_graph(mesh: Mesh, w: WeightField, scheme) -> GridGraph:
    scheme = check_scheme(mesh, scheme)
    n = mesh.n_corners
    if scheme is NeighborScheme.CORNER_COMPLETE:
        empty_i = np.zeros((0, 2), dtype=np.int64)
        empty_f = np.zeros(0)
        return GridGraph(mesh, w, scheme, empty_i, empty_f, empty_f, np.zeros(n + 1, dtype=np.int64),
                         np.zeros(0, dtype=np.int64), empty_f)
    pairs = [tuple(e) for e in mesh.edges]
    costs = [w.edge_weight(e) for e in range(mesh.n_edges)]
    lengths = [1.0] * mesh.n_edges
    for ci, cyc in enumerate(mesh.cell_corners):
        wc = w[ci]
        for i, j in _chord_offsets(scheme):
            a, b = cyc[i], cyc[j]
            length = mesh.dist(mesh.corner_point(a), mesh.corner_point(b))
            pairs.append((min(a, b), max(a, b)))
            lengths.append(length)
            costs.append(wc * length if wc != INF else INF)
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    cost_arr = np.array(costs, dtype=np.float64)
    len_arr = np.array(lengths, dtype=np.float64)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    edges, cost_arr, len_arr = edges[order], cost_arr[order], len_arr[order]
    for arr in (edges, cost_arr, len_arr):
        arr.flags.writeable = False
    indptr, indices, cc = _csr(n, edges[:, 0], edges[:, 1], cost_arr)
    return GridGraph(mesh, w, scheme, edges, cost_arr, len_arr, indptr, indices, cc)


def _check_corner(mesh: Mesh, v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < mesh.n_corners:
        raise ValueError(f"{v!r} is not a corner id")
    return int(v)


def _walk(pred: np.ndarray, s: int, t: int) -> list[int]:
    ids = [t]
    while ids[-1] != s:
        ids.append(int(pred[ids[-1]]))
    return ids[::-1]


def _usable_corners(mesh: Mesh, w: WeightField) -> np.ndarray:
    vals = w.values
    return np.array([any(vals[c] != INF for c in cells) for cells in mesh.corner_cells], dtype=np.bool_)


def _complete_search(mesh: Mesh, w: WeightField, s: int, t: int, cap: int):
    if mesh.n_corners > cap:
        raise ValueError(f"complete corner graph on {mesh.n_corners} corners exceeds the cap of {cap}")
    lat = mesh.corner_lattice
    dist, pred = kernels.complete_graph_dijkstra(
        mesh.is_hex, np.ascontiguousarray(lat[:, 0]), np.ascontiguousarray(lat[:, 1]),
        _usable_corners(mesh, w), w.values, mesh.width, mesh.height, mesh.sx, mesh.sy, s, t)
    return dist, pred


def shortest_grid_path(graph: GridGraph, s: int, t: int) -> tuple[Polyline, float]:
    """Cheapest walk from corner s to corner t; ``((), inf)`` when unreachable."""
    mesh = graph.mesh
    s, t = _check_corner(mesh, s), _check_corner(mesh, t)
    if s == t:
        return (mesh.corner_point(s),), 0.0
    if graph.lazy:
        dist, pred = _complete_search(mesh, graph.weights, s, t, max(DEFAULT_CORNER_CAP, mesh.n_corners))
    else:
        dist, pred = kernels.csr_dijkstra(graph.indptr, graph.indices, graph.csr_costs, s, t)
    if not math.isfinite(dist[t]):
        return (), INF
    return corners_polyline(mesh, _walk(pred, s, t)), float(dist[t])


def grid_path_ids(graph: GridGraph, s: int, t: int) -> list[int]:
    s, t = _check_corner(graph.mesh, s), _check_corner(graph.mesh, t)
    dist, pred = kernels.csr_dijkstra(graph.indptr, graph.indices, graph.csr_costs, s, t)
    return _walk(pred, s, t) if math.isfinite(dist[t]) else []


def shortest_vertex_path(mesh: Mesh, w: WeightField, s: int, t: int,
                         cap: int = DEFAULT_CORNER_CAP) -> tuple[Polyline, float]:
    """Cheapest polyline whose vertices are corners (complete corner graph)."""
    s, t = _check_corner(mesh, s), _check_corner(mesh, t)
    if s == t:
        return (mesh.corner_point(s),), 0.0
    dist, pred = _complete_search(mesh, w, s, t, cap)
    if not math.isfinite(dist[t]):
        return (), INF
    return corners_polyline(mesh, _walk(pred, s, t)), float(dist[t])
