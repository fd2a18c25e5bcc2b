import math
from dataclasses import replace
from fractions import Fraction as F

import pytest

from _oracles import golden_section
from wrpmesh import WeightField, build_mesh
from wrpmesh.experiments import (
    SQUARE_A_STAR,
    HEX_A_STAR,
    adversarial_hex_svp,
    adversarial_square_svp,
    evaluate,
    random_scenario,
    single_cell_ring,
)
from wrpmesh.graphs import build_graph, shortest_grid_path, shortest_vertex_path
from wrpmesh.mesh import MeshKind, MeshSpec, path_weighted_length
from wrpmesh.oracle import (
    SteinerConfig,
    approx_shortest_path,
    refine_fixed_sequence,
    snell_residual,
    steiner_path,
)

SQ = MeshKind.SQUARE

# frozen from m=60 runs of the vertex-path families at their optimal parameter
SQUARE_FAMILY_RATIO = 1.067815
HEX_FAMILY_RATIO = 1.032698


def test_free_space_is_euclidean():
    m = build_mesh(MeshSpec(SQ, 4, 3))
    w = WeightField.uniform(m, 2.0)
    _, cost = approx_shortest_path(m, w, m.corner_index[(0, 0)], m.corner_index[(4, 3)])
    assert cost == pytest.approx(10.0, rel=1e-12)


def test_ring_cost():
    sc = single_cell_ring(1.5)
    _, cost = approx_shortest_path(sc.mesh, sc.weight_field, sc.source, sc.target)
    assert cost == pytest.approx(math.sqrt(2) * 1.5, rel=1e-12)


@pytest.mark.parametrize("w1,w2", [(1.0, 3.0), (2.0, 1.2), (1.0, 1.5)])
def test_two_cell_refraction(w1, w2):
    m = build_mesh(MeshSpec(SQ, 2, 1))
    w = WeightField(m, [w1, w2])
    s, t = m.corner_index[(0, 0)], m.corner_index[(2, 1)]
    sp, cost = approx_shortest_path(m, w, s, t)

    def f(a, b):
        # cross the shared edge at height a, ride it to b, then cross cell two
        return w1 * math.hypot(1, a) + min(w1, w2) * abs(b - a) + w2 * math.hypot(1, 1 - b)

    _, ref = golden_section(lambda a: golden_section(lambda b: f(a, b), 0.0, 1.0)[1], 0.0, 1.0)
    assert cost == pytest.approx(ref, rel=1e-8)
    assert snell_residual(m, w, sp) < 1e-6


def test_refinement_never_increases_cost():
    for seed in range(15):
        sc = random_scenario("Square" if seed % 2 else "Hex", 5, 5, seed=seed)
        path, raw = steiner_path(sc.mesh, sc.weight_field, sc.source, sc.target, 3)
        if not path:
            continue
        _, refined = refine_fixed_sequence(sc.mesh, sc.weight_field, path)
        assert refined <= raw * (1 + 1e-12)


def test_edge_riding_path_is_kept():
    m = build_mesh(MeshSpec(SQ, 2, 2))
    w = WeightField(m, [10.0, 10.0, 10.0, 10.0]).replace({0: 1.0, 1: 1.0})
    path = [(0, 0), (2, 0)]
    out, cost = refine_fixed_sequence(m, w, path)
    assert cost == 2.0
    assert out == ((F(0), F(0)), (F(2), F(0)))


def test_straight_path_unchanged():
    m = build_mesh(MeshSpec(SQ, 3, 3))
    w = WeightField.uniform(m)
    path = [(F(0), F(0)), (F(3), F(2))]
    _, cost = refine_fixed_sequence(m, w, path)
    assert cost == pytest.approx(math.hypot(3, 2), rel=1e-12)


def test_snell_residual_examples():
    m = build_mesh(MeshSpec(SQ, 2, 1))
    uniform = WeightField.uniform(m)
    assert snell_residual(m, uniform, [(0, 0), (2, 1)]) == pytest.approx(0.0, abs=1e-15)
    w = WeightField(m, [1.0, 2.0])
    # straight line has equal sines 1/sqrt(5), weighted difference (2 - 1)/sqrt(5)
    assert snell_residual(m, w, [(0, 0), (2, 1)]) == pytest.approx(1 / math.sqrt(5), rel=1e-12)


def test_more_steiner_points_never_hurt():
    for seed in range(12):
        sc = random_scenario("Hex" if seed % 2 else "Square", 6, 6, seed=100 + seed)
        costs = [approx_shortest_path(sc.mesh, sc.weight_field, sc.source, sc.target, SteinerConfig(m=m))[1]
                 for m in (4, 8, 16)]
        assert costs[2] <= costs[1] <= costs[0]


@pytest.mark.parametrize("kind", ["Square", "Hex"])
def test_sandwich(kind):
    for seed in range(15):
        ev = evaluate(random_scenario(kind, 6, 6, seed=seed))
        if ev.sp_cost == math.inf:
            continue
        assert ev.sp_cost <= ev.svp_cost * (1 + 1e-12)
        for scheme, (_, cost) in ev.sgp.items():
            assert ev.svp_cost <= cost * (1 + 1e-12)
        assert path_weighted_length(ev.scenario.mesh, ev.scenario.weight_field, ev.sp) == pytest.approx(ev.sp_cost)


def test_candidates_bound_the_estimate():
    sc = random_scenario("Square", 6, 6, seed=7)
    m, w = sc.mesh, sc.weight_field
    svp, svp_cost = shortest_vertex_path(m, w, sc.source, sc.target)
    _, without = approx_shortest_path(m, w, sc.source, sc.target, SteinerConfig(m=1, coarse_levels=False))
    _, with_c = approx_shortest_path(m, w, sc.source, sc.target, SteinerConfig(m=1, coarse_levels=False), [svp])
    assert with_c <= min(without, svp_cost)


@pytest.mark.parametrize("builder,a,frozen", [
    (adversarial_square_svp, SQUARE_A_STAR, SQUARE_FAMILY_RATIO),
    (adversarial_hex_svp, HEX_A_STAR, HEX_FAMILY_RATIO),
])
def test_family_ratio_stable_in_m(builder, a, frozen):
    sc = builder(a)
    sc = replace(sc, oracle=replace(sc.oracle, m=12))
    ev = evaluate(sc)
    assert ev.svp_cost / ev.sp_cost == pytest.approx(frozen, rel=5e-3)


def test_config_validation():
    for bad in (dict(m=-1), dict(m=True), dict(refine_tol=0.0), dict(max_iters=0)):
        with pytest.raises(ValueError):
            SteinerConfig(**bad)
    assert SteinerConfig(m=12).levels() == (12, 6, 3, 1)
    assert SteinerConfig(m=12, coarse_levels=False).levels() == (12,)
