import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest

from _oracles import flood_components
from wrpmesh.experiments import (
    HEX_A_STAR,
    HEX12_UPPER,
    SQUARE8_UPPER,
    SQUARE_A_STAR,
    SQUARE_SVP_LOWER,
    HEX_SVP_LOWER,
    Scenario,
    adversarial_hex_svp,
    adversarial_nash_corridor,
    adversarial_square_svp,
    bound_table,
    center_vertex_demo,
    evaluate,
    measure,
    polygon_multiset,
    random_scenario,
    run_batch,
    triple_scenario,
)
from wrpmesh.graphs import build_graph, shortest_grid_path, shortest_vertex_path
from wrpmesh.io import write_report
from wrpmesh.mesh import INF, MeshKind
from wrpmesh.oracle import approx_shortest_path

mpmath.mp.dps = 40
S2, S3 = mpmath.sqrt(2), mpmath.sqrt(3)
CLOSED_FORMS = {
    "sq_svp_low": S2 * mpmath.sqrt(S2 - 1) / ((S2 - 1) ** mpmath.mpf(1.5) - S2 + 2),
    "hx_svp_low": 2 * mpmath.sqrt(4 * S3 - 6) / ((2 - S3) * (mpmath.sqrt(4 * S3 - 6) + 6)),
    "sq8": 2 / mpmath.sqrt(2 + S2),
    "hx12": 2 / mpmath.sqrt(2 + S3),
}


def _svp_ratio(sc):
    ev = evaluate(sc)
    return ev.svp_cost / ev.sp_cost


def _sgp_svp_ratio(sc):
    ev = evaluate(sc)
    return ev.sgp[sc.schemes[0]][1] / ev.svp_cost


# -- bound table -------------------------------------------------------------------


def test_bound_decimals():
    t = bound_table()
    assert f"{t.upper('Square', 'Square4', 'sgp_sp'):.12f}" == "1.414213562373"
    assert f"{t.upper('Square', 'Square8', 'sgp_sp'):.12f}" == "1.082392200292"
    assert t.upper("Hex", "Hex3", "sgp_sp") == 1.5
    assert f"{t.upper('Hex', 'Hex12', 'sgp_sp'):.12f}" == "1.035276180410"


def test_bounds_match_high_precision_closed_forms():
    assert SQUARE8_UPPER == pytest.approx(float(CLOSED_FORMS["sq8"]), abs=1e-12)
    assert HEX12_UPPER == pytest.approx(float(CLOSED_FORMS["hx12"]), abs=1e-12)
    assert SQUARE_SVP_LOWER == pytest.approx(float(CLOSED_FORMS["sq_svp_low"]), abs=1e-12)
    assert HEX_SVP_LOWER == pytest.approx(float(CLOSED_FORMS["hx_svp_low"]), abs=1e-12)
    t = bound_table()
    assert t.get("Square", "Square8", "svp_sp").lower == SQUARE_SVP_LOWER
    assert t.get("Hex", "Hex3", "svp_sp").upper == HEX12_UPPER
    for b in t.bounds:
        assert b.lower <= b.upper
        if b.ratio != "svp_sp":
            assert t.upper(b.kind, b.scheme, "sgp_svp") == b.upper


def test_optimal_parameters():
    a2 = mpmath.sqrt((3 - 2 * S2) / (2 * S2 - 2))
    a3 = 1 - mpmath.sqrt(3 * (7 - 4 * S3) / (4 * S3 - 6))
    assert SQUARE_A_STAR == pytest.approx(float(a2), abs=1e-14)
    assert HEX_A_STAR == pytest.approx(float(a3), abs=1e-14)


# -- lower-bound families --------------------------------------------------------------


@pytest.mark.parametrize("builder,a_star,low,floor", [
    (adversarial_square_svp, SQUARE_A_STAR, SQUARE_SVP_LOWER, 1.065),
    (adversarial_hex_svp, HEX_A_STAR, HEX_SVP_LOWER, 1.030),
])
def test_vertex_path_family_at_optimum(builder, a_star, low, floor):
    r = _svp_ratio(builder(a_star))
    assert r >= floor
    assert r >= low - 0.005
    assert r <= SQUARE8_UPPER * 1.02


@pytest.mark.parametrize("builder", [adversarial_square_svp, adversarial_hex_svp])
def test_vertex_path_family_degenerates(builder):
    assert _svp_ratio(builder(0.01)) == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("builder,a_star", [
    (adversarial_square_svp, SQUARE_A_STAR),
    (adversarial_hex_svp, HEX_A_STAR),
])
def test_sweep_argmax_is_nearest_grid_point(builder, a_star):
    grid = [round(0.05 * i, 2) for i in range(1, 20)]
    ratios = [_svp_ratio(builder(a)) for a in grid]
    best = grid[int(np.argmax(ratios))]
    assert best == min(grid, key=lambda a: abs(a - a_star))
    assert max(ratios) <= _svp_ratio(builder(a_star)) + 1e-9


def test_family_rejects_bad_parameter():
    for a in (0.0, 1.0, -0.2, math.nan):
        with pytest.raises(ValueError):
            adversarial_square_svp(a)
        with pytest.raises(ValueError):
            adversarial_hex_svp(a)


@pytest.mark.parametrize("kind,scheme,floor", [("Square", "Square8", 1.075), ("Hex", "Hex12", 1.030)])
def test_nash_corridor(kind, scheme, floor):
    r = _sgp_svp_ratio(adversarial_nash_corridor(kind, scheme, 40))
    assert floor <= r <= (SQUARE8_UPPER if kind == "Square" else HEX12_UPPER) * (1 + 1e-9)


@pytest.mark.parametrize("kind,scheme", [("Square", "Square8"), ("Hex", "Hex12")])
def test_nash_axis_heading(kind, scheme):
    r = _sgp_svp_ratio(adversarial_nash_corridor(kind, scheme, 12, heading=0.0))
    assert r == pytest.approx(1.0, abs=1e-9)


def test_nash_scheme_checks():
    with pytest.raises(ValueError):
        adversarial_nash_corridor("Square", "Square4")
    with pytest.raises(ValueError):
        adversarial_nash_corridor("Hex", "Square8")


# -- triples ---------------------------------------------------------------------


def _triple_sp(sc):
    return approx_shortest_path(sc.mesh, sc.weight_field, sc.source, sc.target, sc.oracle)


def test_uniform_unit_triple():
    sc = triple_scenario("Square8", 1, 1, 1.0)
    sp, sp_cost = _triple_sp(sc)
    assert polygon_multiset(sc, sp, "Square8") == [(1, 1)] * 3
    _, sgp = shortest_grid_path(build_graph(sc.mesh, sc.weight_field, "Square8"), sc.source, sc.target)
    assert sgp / sp_cost <= SQUARE8_UPPER * 1.02


def test_weighted_triple_one_cell():
    sc = triple_scenario("Square8", 1, 1, [2.0, 1.0, 4.0])
    sp, sp_cost = _triple_sp(sc)
    assert polygon_multiset(sc, sp, "Square8") == [(1, 1)] * 3
    _, sgp = shortest_grid_path(build_graph(sc.mesh, sc.weight_field, "Square8"), sc.source, sc.target)
    assert sgp / sp_cost <= SQUARE8_UPPER * 1.02


def test_long_triple_contains_a_long_polygon():
    sc = triple_scenario("Square8", 1, 3, [2.0, 1.0, 1.0, 1.0, 4.0])
    sp, _ = _triple_sp(sc)
    types = polygon_multiset(sc, sp, "Square8")
    assert types.count((3, 1)) == 1
    assert types.count((1, 1)) == 2


def test_triple_search_failure_is_reported():
    with pytest.raises(ValueError):
        triple_scenario("Square8", 1, 2, 1.0)


def test_triple_argument_checks():
    for args in (("Hex12", 1, 1, 1.0), ("Square8", 2, 1, 1.0), ("Square8", 1, 0, 1.0),
                 ("Square8", 1, 1, [1.0, INF, 1.0])):
        with pytest.raises(ValueError):
            triple_scenario(*args)


# -- random scenarios ------------------------------------------------------------


def test_random_scenario_is_reproducible():
    a = random_scenario("Hex", 6, 5, seed=9)
    b = random_scenario("Hex", 6, 5, seed=9)
    assert a == b
    assert random_scenario("Hex", 6, 5, seed=10) != a


def test_random_obstacle_count():
    sc = random_scenario("Square", 10, 10, inf_fraction=0.25, seed=4)
    assert sum(v == INF for v in sc.weights) == 25
    sc0 = random_scenario("Square", 10, 10, inf_fraction=0.0, seed=4)
    assert all(math.isfinite(v) for v in sc0.weights)
    ws = np.array(sc0.weights)
    assert ws.min() >= 0.1 and ws.max() <= 10.0


def test_random_distribution_choice():
    assert set(random_scenario("Square", 4, 4, "unit", 0.0).weights) == {1.0}
    with pytest.raises(ValueError):
        random_scenario("Square", 4, 4, "gaussian")
    with pytest.raises(ValueError):
        random_scenario("Square", 4, 4, inf_fraction=1.0)


@pytest.mark.parametrize("kind", ["Square", "Hex"])
def test_connectivity_matches_flood_fill(kind):
    for seed in range(10):
        sc = random_scenario(kind, 10, 10, inf_fraction=0.5, seed=seed)
        mesh = sc.mesh
        labels = flood_components(mesh.cell_corners, sc.weights, mesh.n_corners)
        assert labels[sc.source] >= 0 and labels[sc.source] == labels[sc.target]
        _, cost = shortest_grid_path(build_graph(mesh, sc.weight_field, sc.schemes[0]), sc.source, sc.target)
        assert math.isfinite(cost)
        # any other pair: finite grid cost exactly when flood fill connects them
        rng = np.random.default_rng(seed)
        g = build_graph(mesh, sc.weight_field, sc.schemes[0])
        for u, v in rng.integers(0, mesh.n_corners, size=(5, 2)):
            if u == v:
                continue
            _, c = shortest_grid_path(g, int(u), int(v))
            same = labels[u] >= 0 and labels[u] == labels[v]
            assert math.isfinite(c) == same


def test_adding_obstacles_never_lowers_costs():
    for seed in range(10):
        sc = random_scenario("Square", 6, 6, seed=seed)
        mesh, w = sc.mesh, sc.weight_field
        rng = np.random.default_rng(seed)
        cells = [c for c in rng.choice(mesh.n_cells, 4, replace=False) if math.isfinite(w[int(c)])]
        heavier = w.replace({int(c): INF for c in cells})
        _, v0 = shortest_vertex_path(mesh, w, sc.source, sc.target)
        _, v1 = shortest_vertex_path(mesh, heavier, sc.source, sc.target)
        assert v1 >= v0
        for scheme in sc.schemes:
            _, g0 = shortest_grid_path(build_graph(mesh, w, scheme), sc.source, sc.target)
            _, g1 = shortest_grid_path(build_graph(mesh, heavier, scheme), sc.source, sc.target)
            assert g1 >= g0


def test_scenario_validation():
    sc = random_scenario("Square", 3, 3, seed=1)
    with pytest.raises(ValueError):
        replace(sc, target=sc.source)
    with pytest.raises(ValueError):
        replace(sc, weights=sc.weights[:-1])
    with pytest.raises(ValueError):
        replace(sc, schemes=("Hex3",))


# -- batches -------------------------------------------------------------------------


def test_empty_batch():
    res = run_batch([])
    assert res.records == () and res.all_pass
    assert write_report(res.records).count("\r\n") == 1


def test_demo_is_excluded_from_verdicts():
    sc, centre = center_vertex_demo()
    recs = measure(sc)
    assert {r.verdict for r in recs} == {"SKIP"}
    # the centre path enters a heavy cell that the shortest path avoids
    from wrpmesh.crossing import _interior_cells

    ev = evaluate(sc)
    heavy = {c for c, v in enumerate(sc.weights) if v > 1}
    assert heavy & set(_interior_cells(sc.mesh, centre))
    assert not heavy & set(_interior_cells(sc.mesh, ev.sp))
    assert run_batch([sc]).all_pass


def test_batch_verdicts_and_ratios():
    scs = [random_scenario(k, 5, 5, seed=s) for k in ("Square", "Hex") for s in range(4)]
    res = run_batch(scs)
    assert [r.scenario_id for r in res.records] == sorted(r.scenario_id for r in res.records)
    assert len(res.records) == 16
    for r in res.records:
        assert r.verdict == "PASS"
        assert r.ratio_sgp_sp >= 1 - 1e-9 and r.ratio_svp_sp >= 1 - 1e-9 and r.ratio_sgp_svp >= 1 - 1e-9
        assert r.mediant_ok and r.local_ok


def test_unreachable_scenario_is_an_error_record():
    sc = random_scenario("Square", 3, 1, "unit", 0.0, seed=0)
    mesh = sc.mesh
    blocked = Scenario("blocked", sc.spec, (1.0, INF, 1.0), mesh.corner_index[(0, 0)], mesh.corner_index[(3, 0)],
                       sc.schemes)
    res = run_batch([blocked])
    assert {r.verdict for r in res.records} == {"ERROR"}
    assert not res.all_pass


def test_parallel_batch_matches_serial():
    scs = [random_scenario(k, 4, 4, seed=s) for k in ("Square", "Hex") for s in range(3)]
    assert write_report(run_batch(scs, jobs=1).records) == write_report(run_batch(scs, jobs=2).records)
