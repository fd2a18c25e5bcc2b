"""Scenario families, the bound table and batch ratio measurement."""
from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .crossing import _simplify, boundary_crossings, crossing_path, per_polygon_ratios
from .graphs import (
    HEX_SCHEMES,
    SQUARE_SCHEMES,
    NeighborScheme,
    build_graph,
    check_scheme,
    shortest_grid_path,
    shortest_vertex_path,
)
from .mesh import INF, HEX_NEIGHBOURS, Mesh, MeshKind, MeshSpec, Point, WeightField, build_mesh
from .oracle import SteinerConfig, approx_shortest_path

log = logging.getLogger(__name__)

EPS_ACC = 0.02
SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


@lru_cache(maxsize=64)
def cached_mesh(spec: MeshSpec) -> Mesh:
    return build_mesh(spec)


@dataclass(frozen=True)
class Scenario:
    """One s-t query on a weighted mesh.  ``source``/``target`` are corner ids."""

    id: str
    spec: MeshSpec
    weights: tuple[float, ...]
    source: int
    target: int
    schemes: tuple[NeighborScheme, ...]
    oracle: SteinerConfig = SteinerConfig()
    seed: int | None = None
    family: str = "custom"
    scored: bool = True

    def __post_init__(self):
        mesh = self.mesh
        object.__setattr__(self, "weights", tuple(float(x) for x in self.weights))
        object.__setattr__(self, "schemes", tuple(check_scheme(mesh, s) for s in self.schemes))
        if len(self.weights) != mesh.n_cells:
            raise ValueError(f"scenario {self.id}: expected {mesh.n_cells} weights")
        for v in (self.source, self.target):
            if not 0 <= v < mesh.n_corners:
                raise ValueError(f"scenario {self.id}: corner {v} does not exist")
        if self.source == self.target:
            raise ValueError(f"scenario {self.id}: source equals target")

    @property
    def mesh(self) -> Mesh:
        return cached_mesh(self.spec)

    @property
    def weight_field(self) -> WeightField:
        return WeightField(self.mesh, self.weights)


# -- bound table --------------------------------------------------------------------


@dataclass(frozen=True)
class Bound:
    kind: MeshKind
    scheme: str          # scheme name, or "any" for vertex paths
    ratio: str           # sgp_sp, svp_sp or sgp_svp
    lower: float
    upper: float
    lower_form: str
    upper_form: str


@dataclass(frozen=True)
class BoundTable:
    bounds: tuple[Bound, ...]

    def get(self, kind, scheme, ratio: str) -> Bound:
        kind = MeshKind(kind)
        name = NeighborScheme(scheme).value if ratio != "svp_sp" else "any"
        for b in self.bounds:
            if b.kind is kind and b.scheme == name and b.ratio == ratio:
                return b
        raise KeyError((kind, scheme, ratio))

    def upper(self, kind, scheme, ratio: str) -> float:
        return self.get(kind, scheme, ratio).upper


SQUARE8_UPPER = 2.0 / math.sqrt(2.0 + SQRT2)
HEX12_UPPER = 2.0 / math.sqrt(2.0 + SQRT3)
SQUARE_SVP_LOWER = SQRT2 * math.sqrt(SQRT2 - 1.0) / ((SQRT2 - 1.0) ** 1.5 - SQRT2 + 2.0)
HEX_SVP_LOWER = 2.0 * math.sqrt(4.0 * SQRT3 - 6.0) / ((2.0 - SQRT3) * (math.sqrt(4.0 * SQRT3 - 6.0) + 6.0))
SQUARE_A_STAR = math.sqrt((3.0 - 2.0 * SQRT2) / (2.0 * SQRT2 - 2.0))
HEX_A_STAR = 1.0 - math.sqrt(3.0 * (7.0 - 4.0 * SQRT3) / (4.0 * SQRT3 - 6.0))


def bound_table() -> BoundTable:
    s2, s8 = "sqrt(2)", "2/sqrt(2+sqrt(2))"
    h3, h12 = "3/2", "2/sqrt(2+sqrt(3))"
    sq_low = "sqrt(2)*sqrt(sqrt(2)-1)/((sqrt(2)-1)^(3/2)-sqrt(2)+2)"
    hx_low = "2*sqrt(4*sqrt(3)-6)/((2-sqrt(3))*(sqrt(4*sqrt(3)-6)+6))"
    sq, hx = MeshKind.SQUARE, MeshKind.HEX
    rows = []
    for ratio in ("sgp_sp", "sgp_svp"):
        rows.append(Bound(sq, "Square4", ratio, SQRT2, SQRT2, s2, s2))
        rows.append(Bound(sq, "Square8", ratio, SQUARE8_UPPER, SQUARE8_UPPER, s8, s8))
        rows.append(Bound(hx, "Hex3", ratio, 1.5, 1.5, h3, h3))
        rows.append(Bound(hx, "Hex12", ratio, HEX12_UPPER, HEX12_UPPER, h12, h12))
    rows.append(Bound(sq, "any", "svp_sp", SQUARE_SVP_LOWER, SQUARE8_UPPER, sq_low, s8))
    rows.append(Bound(hx, "any", "svp_sp", HEX_SVP_LOWER, HEX12_UPPER, hx_low, h12))
    return BoundTable(tuple(rows))


# -- scenario generation ----------------------------------------------------------------


def default_schemes(kind) -> tuple[NeighborScheme, ...]:
    return HEX_SCHEMES if MeshKind(kind) is MeshKind.HEX else SQUARE_SCHEMES


def finite_components(mesh: Mesh, weights: Sequence[float]) -> np.ndarray:
    """Component label per corner; corners sharing a finite cell are joined."""
    parent = list(range(mesh.n_corners))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ci, cyc in enumerate(mesh.cell_corners):
        if weights[ci] != INF:
            r = find(cyc[0])
            for c in cyc[1:]:
                parent[find(c)] = r
    labels = np.array([find(c) for c in range(mesh.n_corners)])
    usable = np.array([any(weights[c] != INF for c in cells) for cells in mesh.corner_cells])
    labels[~usable] = -1
    return labels


def random_scenario(kind, width: int, height: int, weight_dist: str = "loguniform",
                    inf_fraction: float = 0.1, seed: int = 0, schemes=None,
                    oracle: SteinerConfig | None = None) -> Scenario:
    """Random weights, a fixed share of obstacle cells and a connected s-t pair."""
    if not 0 <= inf_fraction < 1:
        raise ValueError("inf_fraction must lie in [0, 1)")
    spec = MeshSpec(MeshKind(kind), width, height)
    mesh = cached_mesh(spec)
    rng = np.random.default_rng(seed)
    n = mesh.n_cells
    if weight_dist == "loguniform":
        vals = np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
    elif weight_dist == "uniform":
        vals = rng.uniform(0.1, 10.0, n)
    elif weight_dist == "unit":
        vals = np.ones(n)
    else:
        raise ValueError(f"unknown weight distribution {weight_dist!r}")
    n_inf = int(round(inf_fraction * n))
    if n_inf:
        vals[rng.choice(n, n_inf, replace=False)] = INF
    labels = finite_components(mesh, vals)
    usable = np.nonzero(labels >= 0)[0]
    for _ in range(100):
        if usable.size < 2:
            break
        s, t = (int(x) for x in rng.choice(usable, 2, replace=False))
        if labels[s] == labels[t]:
            return Scenario(f"random-{spec.kind.value}-{width}x{height}-s{seed}", spec, tuple(vals), s, t,
                            tuple(schemes or default_schemes(kind)), oracle or SteinerConfig(), seed, "random")
    raise ValueError(f"seed {seed}: no finitely connected source/target pair after 100 draws")


def _grid_weights(mesh: Mesh, finite: dict[int, float]) -> tuple[float, ...]:
    vals = [INF] * mesh.n_cells
    for ci, v in finite.items():
        vals[ci] = v
    return tuple(vals)


def adversarial_square_svp(a: float, n: int = 3, m: int = 60) -> Scenario:
    """Two-cell instance where the vertex path must round a cheap edge.

    A unit-weight cell sits on top of a cheap cell whose weight equals the
    critical ratio a/sqrt(1+a^2); every other cell is an obstacle.  The shortest
    path rides the shared edge for length 1-a and then heads to the opposite
    corner, while corner paths pay either the diagonal or the full edge.
    ``n`` is the side of the surrounding mesh.
    """
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    if n < 2:
        raise ValueError("mesh must be at least 2x2")
    spec = MeshSpec(MeshKind.SQUARE, n, n)
    mesh = cached_mesh(spec)
    col, row = (n - 1) // 2, max(1, (n - 1) // 2)
    top = mesh.cell_of((col, row))
    bottom = mesh.cell_of((col, row - 1))
    cheap = a / math.sqrt(1.0 + a * a)
    weights = _grid_weights(mesh, {top: 1.0, bottom: cheap})
    s = mesh.corner_index[(col, row)]
    t = mesh.corner_index[(col + 1, row + 1)]
    return Scenario(f"adv-square-svp-a{a:.6g}-n{n}", spec, weights, s, t, SQUARE_SCHEMES,
                    SteinerConfig(m=m), None, "adversarial_square_svp")


def adversarial_hex_svp(a: float, n: int = 4, m: int = 60) -> Scenario:
    """Hex analogue: ride distance a along the cheap edge, then cut to the opposite corner."""
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    if n < 3:
        raise ValueError("mesh must be at least 3x3")
    spec = MeshSpec(MeshKind.HEX, n, n)
    mesh = cached_mesh(spec)
    row = (n - 1) // 2
    col = (n - 1) // 2
    q, r = col - row // 2, row
    dq, dr = HEX_NEIGHBOURS[5]  # neighbour across the top / upper-right edge
    cell = mesh.cell_of((q, r))
    cheap_cell = mesh.cell_of((q + dq, r + dr))
    if cheap_cell is None:
        raise ValueError("mesh too small for the hex family")
    d = math.sqrt((1.0 - a) ** 2 + 3.0)
    cheap = (1.0 - a) / d
    common = set(mesh.cell_corners[cell]) & set(mesh.cell_corners[cheap_cell])
    cyc = mesh.cell_corners[cell]
    # s is the shared corner that the cheap edge leaves from in clockwise order
    ks = [cyc.index(c) for c in common]
    k0 = ks[0] if (ks[0] + 1) % 6 == ks[1] else ks[1]
    s = cyc[k0]
    t = cyc[(k0 + 3) % 6]
    weights = _grid_weights(mesh, {cell: 1.0, cheap_cell: cheap})
    return Scenario(f"adv-hex-svp-a{a:.6g}-n{n}", spec, weights, s, t, HEX_SCHEMES,
                    SteinerConfig(m=m), None, "adversarial_hex_svp")


def _corridor(mesh: Mesh, p0, p1, radius: float) -> tuple[float, ...]:
    """Unit weight on cells whose centre is within ``radius`` of the segment, inf elsewhere."""
    a = np.array(p0, dtype=float)
    b = np.array(p1, dtype=float)
    ab = b - a
    vals = []
    for cyc in mesh.cell_corners:
        c = mesh.corner_xy[list(cyc)].mean(axis=0)
        t = np.clip(np.dot(c - a, ab) / np.dot(ab, ab), 0.0, 1.0)
        vals.append(1.0 if np.linalg.norm(c - (a + t * ab)) <= radius else INF)
    return tuple(vals)


def adversarial_nash_corridor(kind, scheme, length: float = 40.0, heading: float | None = None) -> Scenario:
    """Free corridor along the worst heading of the scheme, obstacles elsewhere."""
    kind = MeshKind(kind)
    scheme = NeighborScheme(scheme)
    if scheme not in (NeighborScheme.SQUARE8, NeighborScheme.HEX12):
        raise ValueError("corridors are defined for Square8 and Hex12")
    if (scheme is NeighborScheme.HEX12) != (kind is MeshKind.HEX):
        raise ValueError("scheme does not fit the mesh kind")
    if heading is None:
        heading = 22.5 if scheme is NeighborScheme.SQUARE8 else 15.0
    th = math.radians(heading)
    dx, dy = length * math.cos(th), length * math.sin(th)
    margin = 3
    if kind is MeshKind.SQUARE:
        ix, iy = int(round(dx)), int(round(dy))
        spec = MeshSpec(kind, ix + 2 * margin, iy + 2 * margin)
        mesh = cached_mesh(spec)
        s = mesh.corner_index[(margin, margin)]
        t = mesh.corner_index[(margin + ix, margin + iy)]
    else:
        width = int(math.ceil(dx / SQRT3)) + 2 * margin
        height = int(math.ceil(dy / 1.5)) + 2 * margin
        spec = MeshSpec(kind, width, height)
        mesh = cached_mesh(spec)
        xy = mesh.corner_xy
        origin = np.array([margin * SQRT3, margin * 1.5])
        s = int(np.argmin(np.linalg.norm(xy - origin, axis=1)))
        target = xy[s] + np.array([dx, dy])
        t = int(np.argmin(np.linalg.norm(xy - target, axis=1)))
    weights = _corridor(mesh, mesh.corner_xy[s], mesh.corner_xy[t], 1.75)
    return Scenario(f"nash-{scheme.value}-L{length:g}-h{heading:g}", spec, weights, s, t, (scheme,),
                    SteinerConfig(), None, "nash_corridor")


def _triple_layout(ell: int):
    """Square cells of a P_1^l triple, in path order, with s and t."""
    cells = [(0, -1), (0, 0)] + [(1 + i, 0) for i in range(ell)] + [(ell, 1), (ell + 1, 1)]
    return cells, (0, 0), (ell + 1, 2)


def triple_scenario(scheme, k: int, ell: int, inner_weights, tol: float = 1e-6,
                    m: int = 24, max_steps: int = 40) -> Scenario:
    """P_1^l triple on a square mesh with outer weights found by bisection.

    S1 lies below S2 and shares the edge at s; S_{l+4} lies right of S_{l+3}
    and shares the edge at t.  Each outer cell gets its own factor times the
    smallest inner weight.  A factor is raised while the oracle path rides its
    whole edge and lowered while it does not ride it at all, until the path
    enters the triple from s and leaves it into t along those edges.  The result
    is accepted only if the polygons between the path and its crossing path are
    P_1^1, P_1^l, P_1^1; otherwise ValueError.
    """
    scheme = NeighborScheme(scheme)
    if scheme not in SQUARE_SCHEMES:
        raise ValueError("triples are built for square schemes")
    if k != 1:
        raise ValueError("square triples carry a P_1^l polygon (k = 1)")
    if ell < 1:
        raise ValueError("ell must be at least 1")
    inner = np.broadcast_to(np.asarray(inner_weights, dtype=float), (ell + 2,)).copy()
    if not (np.isfinite(inner).all() and (inner > 0).all()):
        raise ValueError("inner weights must be finite and positive")
    layout, s_xy, t_xy = _triple_layout(ell)
    shift = 1
    spec = MeshSpec(MeshKind.SQUARE, ell + 4, 4)
    mesh = cached_mesh(spec)

    def corner(x, y):
        return mesh.corner_index[(x + shift, y + shift)]

    ids = [mesh.cell_of((x + shift, y + shift)) for x, y in layout]
    s, t = corner(*s_xy), corner(*t_xy)
    s_far, t_far = corner(s_xy[0] + 1, s_xy[1]), corner(t_xy[0], t_xy[1] - 1)
    s_edge, t_edge = mesh.edge_between(s, s_far), mesh.edge_between(t, t_far)
    base = float(inner.min())

    def build(fs, ft):
        finite = {ci: float(wv) for ci, wv in zip(ids[1:-1], inner)}
        finite[ids[0]] = fs * base
        finite[ids[-1]] = ft * base
        return Scenario(f"triple-{scheme.value}-k{k}-l{ell}", spec, _grid_weights(mesh, finite), s, t,
                        (scheme,), SteinerConfig(m=m), None, "triple")

    def state(sp, sigs, edge, end_pt, far):
        # -1 rides the whole edge, 0 rides part of it, 1 does not ride it
        if sigs[end_pt] != ("E", edge):
            return 1
        simple = _simplify(sp)
        nxt = simple[1] if end_pt == 0 else simple[-2]
        return -1 if nxt == mesh.corner_point(far) else 0

    want = sorted([(1, 1), (1, 1), (ell, 1)])
    top = float(inner.max()) / base  # above this the outer cells are never ridden
    bounds = {"s": [0.0, top], "t": [0.0, top]}
    for _ in range(max_steps):
        fs, ft = (0.5 * sum(bounds[e]) for e in ("s", "t"))
        sc = build(fs, ft)
        sp, _ = approx_shortest_path(mesh, sc.weight_field, s, t, sc.oracle)
        sigs = boundary_crossings(mesh, sp).signatures
        states = {"s": state(sp, sigs, s_edge, 0, s_far), "t": state(sp, sigs, t_edge, -1, t_far)}
        full = any(v < 0 for v in states.values())
        log.debug("triple factors %.6g %.6g states %s", fs, ft, states)
        if not full and polygon_multiset(sc, sp, scheme) == want:
            return replace(sc, id=f"{sc.id}-f{fs:.6g}-{ft:.6g}")
        # equal states move only the s side so symmetric layouts can split
        keys = ("s",) if states["s"] == states["t"] else ("s", "t")
        for key in keys:
            st = states[key]
            lo, hi = bounds[key]
            if st < 0:
                bounds[key] = [0.5 * (lo + hi), hi]
            elif st > 0 and not full:
                bounds[key] = [lo, 0.5 * (lo + hi)]
        if max(b[1] - b[0] for b in bounds.values()) < tol:
            break
    raise ValueError(f"no outer weights give a P_1^{ell} triple for these inner weights")


def polygon_multiset(sc: Scenario, sp, scheme) -> list[tuple[int, int]]:
    """Non-degenerate polygon types between ``sp`` and its crossing path."""
    mesh, w = sc.mesh, sc.weight_field
    xp = crossing_path(mesh, sp, scheme)
    rep = per_polygon_ratios(mesh, w, sp, xp, scheme)
    return sorted((r.ell, r.k) for r in rep.records if r.k != 0)


def single_cell_ring(omega: float = 1.0) -> Scenario:
    """One finite square cell inside a ring of obstacles, s and t at opposite corners."""
    spec = MeshSpec(MeshKind.SQUARE, 3, 3)
    mesh = cached_mesh(spec)
    weights = _grid_weights(mesh, {mesh.cell_of((1, 1)): omega})
    s = mesh.corner_index[(1, 1)]
    t = mesh.corner_index[(2, 2)]
    return Scenario(f"ring-square-w{omega:g}", spec, weights, s, t, SQUARE_SCHEMES, SteinerConfig(), None,
                    "single_cell_ring")


def center_vertex_demo(big: float = 10.0) -> tuple[Scenario, tuple[Point, ...]]:
    """2x2 demo where a cell-centre graph path enters a cell the shortest path avoids.

    Returned for rendering only; the scenario is excluded from verdicts.
    """
    spec = MeshSpec(MeshKind.SQUARE, 2, 2)
    mesh = cached_mesh(spec)
    weights = (1.0, big, big, 1.0)
    s = mesh.corner_index[(0, 0)]
    t = mesh.corner_index[(2, 2)]
    h = Fraction(1, 2)
    centre_path = ((Fraction(0), Fraction(0)), (h, h), (3 * h, h), (3 * h, 3 * h), (Fraction(2), Fraction(2)))
    sc = Scenario(f"demo-center-vertex-W{big:g}", spec, weights, s, t, SQUARE_SCHEMES, SteinerConfig(), None,
                  "demo_center_vertex", scored=False)
    return sc, centre_path


# -- batch evaluation ------------------------------------------------------------------


@dataclass(frozen=True)
class RatioRecord:
    scenario_id: str
    scheme: str
    cost_sp: float
    cost_svp: float
    cost_sgp: float
    cost_x: float
    ratio_sgp_sp: float
    ratio_svp_sp: float
    ratio_sgp_svp: float
    max_polygon_ratio: float
    mediant_ok: bool
    histogram: tuple[tuple[tuple[int, int], int], ...]
    local_ok: bool
    bound: float
    verdict: str
    note: str = ""


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return 1.0 if num == 0 else INF
    if den == INF:
        return math.nan
    return num / den


LOCAL_BOUNDS = {
    (NeighborScheme.SQUARE4, (1, 1)): SQRT2,
    (NeighborScheme.HEX3, (1, 1)): 2.0 / SQRT3,
    (NeighborScheme.HEX3, (1, 2)): 1.5,
}


@dataclass
class Evaluation:
    """Everything computed for one scenario (paths included, for rendering)."""

    scenario: Scenario
    sp: tuple = ()
    sp_cost: float = INF
    svp: tuple = ()
    svp_cost: float = INF
    sgp: dict = field(default_factory=dict)
    crossing: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)


def evaluate(sc: Scenario) -> Evaluation:
    mesh, w = sc.mesh, sc.weight_field
    ev = Evaluation(sc)
    ev.svp, ev.svp_cost = shortest_vertex_path(mesh, w, sc.source, sc.target)
    cands = [ev.svp] if ev.svp else []
    for scheme in sc.schemes:
        path, cost = shortest_grid_path(build_graph(mesh, w, scheme), sc.source, sc.target)
        ev.sgp[scheme] = (path, cost)
        if path:
            cands.append(path)
    ev.sp, ev.sp_cost = approx_shortest_path(mesh, w, sc.source, sc.target, sc.oracle, cands)
    if ev.sp_cost == INF:
        return ev
    for scheme in sc.schemes:
        xp = crossing_path(mesh, ev.sp, scheme)
        ev.crossing[scheme] = xp
        ev.reports[scheme] = per_polygon_ratios(mesh, w, ev.sp, xp, scheme)
    return ev


def _records(ev: Evaluation, table: BoundTable, eps_acc: float) -> list[RatioRecord]:
    sc = ev.scenario
    out = []
    kind = sc.spec.kind
    svp_bound = table.upper(kind, sc.schemes[0] if sc.schemes else "Square4", "svp_sp")
    for scheme in sc.schemes:
        sgp_cost = ev.sgp[scheme][1]
        bound = table.upper(kind, scheme, "sgp_sp")
        if ev.sp_cost == INF:
            out.append(RatioRecord(sc.id, scheme.value, INF, ev.svp_cost, sgp_cost, INF, math.nan, math.nan,
                                   math.nan, math.nan, True, (), True, bound, "ERROR", "unreachable"))
            continue
        rep = ev.reports[scheme]
        hist = Counter((r.ell, r.k) for r in rep.records)
        local_ok = all(r.ratio <= LOCAL_BOUNDS[(scheme, (r.ell, r.k))] + 1e-9
                       for r in rep.records if (scheme, (r.ell, r.k)) in LOCAL_BOUNDS)
        r1 = _ratio(sgp_cost, ev.sp_cost)
        r2 = _ratio(ev.svp_cost, ev.sp_cost)
        r3 = _ratio(sgp_cost, ev.svp_cost)
        limit = 1.0 + eps_acc
        ok = (r1 <= bound * limit and r3 <= table.upper(kind, scheme, "sgp_svp") * limit
              and r2 <= svp_bound * limit)
        verdict = ("PASS" if ok else "FAIL") if sc.scored else "SKIP"
        out.append(RatioRecord(sc.id, scheme.value, ev.sp_cost, ev.svp_cost, sgp_cost, rep.x_cost, r1, r2, r3,
                               rep.max_ratio, rep.mediant_ok, tuple(sorted(hist.items())), local_ok, bound,
                               verdict))
    return out


def measure(sc: Scenario, table: BoundTable | None = None, eps_acc: float = EPS_ACC) -> list[RatioRecord]:
    table = table or bound_table()
    try:
        return _records(evaluate(sc), table, eps_acc)
    except Exception as exc:  # recorded, the batch goes on
        log.warning("scenario %s failed: %s", sc.id, exc)
        return [RatioRecord(sc.id, s.value, math.nan, math.nan, math.nan, math.nan, math.nan, math.nan, math.nan,
                            math.nan, False, (), False, math.nan, "ERROR", f"{type(exc).__name__}: {exc}")
                for s in sc.schemes]


def _measure_job(args):
    sc, table, eps = args
    return measure(sc, table, eps)


@dataclass(frozen=True)
class BatchResult:
    records: tuple[RatioRecord, ...]

    @property
    def verdicts(self) -> dict[tuple[str, str], str]:
        return {(r.scenario_id, r.scheme): r.verdict for r in self.records}

    @property
    def all_pass(self) -> bool:
        return all(r.verdict in ("PASS", "SKIP") for r in self.records)


def run_batch(scenarios: Iterable[Scenario], table: BoundTable | None = None, jobs: int = 1,
              eps_acc: float = EPS_ACC) -> BatchResult:
    """Evaluate scenarios (optionally in worker processes); output is sorted by scenario id."""
    table = table or bound_table()
    scs = sorted(scenarios, key=lambda s: s.id)
    args = [(s, table, eps_acc) for s in scs]
    if jobs > 1 and len(scs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_measure_job, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        chunks = [_measure_job(a) for a in args]
    return BatchResult(tuple(r for chunk in chunks for r in chunk))
