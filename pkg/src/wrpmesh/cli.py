"""Command line entry point: ``wrp``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments as ex
from .crossing import crossing_path, per_polygon_ratios, shortcut_path_square
from .graphs import NeighborScheme, build_graph, shortest_grid_path, shortest_vertex_path
from .io import ScenarioError, format_value, parse_scenario, serialize_scenario, write_report
from .oracle import SteinerConfig, approx_shortest_path
from .svg import render_svg

log = logging.getLogger("wrpmesh")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _setup_logging():
    level = os.environ.get("WRP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _load(path: str) -> ex.Scenario:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_scenario(data)
    except ScenarioError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(path: str | None, data: bytes):
    if path is None or path == "-":
        sys.stdout.write(data.decode("utf-8"))
        return
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _schemes(sc: ex.Scenario, name: str | None):
    if name is None:
        return sc.schemes
    try:
        scheme = NeighborScheme(name)
    except ValueError:
        raise UsageError(f"unknown scheme {name!r}") from None
    if scheme not in ex.default_schemes(sc.spec.kind) and scheme is not NeighborScheme.CORNER_COMPLETE:
        raise UsageError(f"scheme {name} does not fit a {sc.spec.kind.value} mesh")
    return (scheme,)


# -- subcommands --------------------------------------------------------------------


def cmd_gen(args) -> int:
    fam = args.family
    oracle = SteinerConfig(m=args.m) if args.m is not None else None
    if fam == "random":
        sc = ex.random_scenario(args.kind, args.width, args.height, args.weights, args.inf_fraction, args.seed,
                                oracle=oracle)
    elif fam == "square-svp":
        sc = ex.adversarial_square_svp(args.a if args.a is not None else ex.SQUARE_A_STAR, args.width or 3)
    elif fam == "hex-svp":
        sc = ex.adversarial_hex_svp(args.a if args.a is not None else ex.HEX_A_STAR, args.width or 4)
    elif fam == "nash":
        scheme = args.scheme or ("Hex12" if args.kind == "Hex" else "Square8")
        sc = ex.adversarial_nash_corridor(args.kind, scheme, args.length)
    elif fam == "triple":
        inner = [float(v) for v in args.inner.split(",")] if args.inner else 1.0
        sc = ex.triple_scenario(args.scheme or "Square8", args.k, args.ell, inner)
    elif fam == "ring":
        sc = ex.single_cell_ring(args.omega)
    else:  # demo
        sc, _ = ex.center_vertex_demo(args.omega if args.omega != 1.0 else 10.0)
    if oracle is not None and fam != "random":
        sc = replace(sc, oracle=oracle)
    _write(args.out, serialize_scenario(sc))
    return EXIT_OK


def cmd_solve(args) -> int:
    sc = _load(args.scenario)
    mesh, w = sc.mesh, sc.weight_field
    schemes = _schemes(sc, args.scheme)
    svp, svp_cost = shortest_vertex_path(mesh, w, sc.source, sc.target)
    out = {"scenario": sc.id, "svp": format_value(svp_cost), "sgp": {}}
    cands = [svp] if svp else []
    for scheme in schemes:
        path, cost = shortest_grid_path(build_graph(mesh, w, scheme), sc.source, sc.target)
        out["sgp"][scheme.value] = format_value(cost)
        if path:
            cands.append(path)
    sp, sp_cost = approx_shortest_path(mesh, w, sc.source, sc.target, sc.oracle, cands)
    out["sp"] = format_value(sp_cost)
    out["sp_path"] = [[float(x), float(y)] for x, y in sp]
    print(json.dumps(out, indent=1, sort_keys=True))
    return EXIT_OK


def cmd_cross(args) -> int:
    sc = _load(args.scenario)
    if args.scheme is None:
        raise UsageError("cross needs --scheme")
    scheme = _schemes(sc, args.scheme)[0]
    mesh, w = sc.mesh, sc.weight_field
    ev = ex.evaluate(replace(sc, schemes=(scheme,)))
    if not ev.sp:
        print(f"{sc.id}: target unreachable", file=sys.stderr)
        return EXIT_FAIL
    xp = crossing_path(mesh, ev.sp, scheme)
    rep = per_polygon_ratios(mesh, w, ev.sp, xp, scheme)
    print(f"scenario {sc.id} scheme {scheme.value}")
    print(f"cost_sp {format_value(rep.sp_cost)} cost_x {format_value(rep.x_cost)} "
          f"ratio {format_value(rep.whole_ratio)} max_polygon {format_value(rep.max_ratio)} mediant_ok {rep.mediant_ok}")
    for r in rep.records:
        print(f"polygon l={r.ell} k={r.k} sp={format_value(r.sp_cost)} x={format_value(r.x_cost)} "
              f"ratio={format_value(r.ratio)}{' flagged' if r.flagged else ''}")
    if args.svg:
        paths, labels = [ev.sp, xp], ["SP", "X"]
        sgp = ev.sgp[scheme][0]
        if sgp:
            paths.append(sgp)
            labels.append("SGP")
        _write(args.svg, render_svg(mesh, w, paths, labels, sc.id))
    return EXIT_OK


def _collect(args) -> list[ex.Scenario]:
    files = list(args.scenario or [])
    if args.dir:
        d = Path(args.dir)
        if not d.is_dir():
            raise UsageError(f"{args.dir} is not a directory")
        files += sorted(str(p) for p in d.glob("*.json"))
    if not files:
        raise UsageError("ratios needs --dir or --scenario")
    return [_load(f) for f in files]


def cmd_ratios(args) -> int:
    scs = _collect(args)
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    result = ex.run_batch(scs, jobs=args.jobs)
    text = write_report(result.records)
    if args.csv:
        _write(args.csv, text.encode("utf-8"))
    else:
        sys.stdout.write(text)
    return EXIT_OK if result.all_pass else EXIT_FAIL


def cmd_render(args) -> int:
    sc = _load(args.scenario)
    ev = ex.evaluate(sc)
    paths, labels = [], []
    if ev.sp:
        paths.append(ev.sp)
        labels.append("SP")
    if ev.svp:
        paths.append(ev.svp)
        labels.append("SVP")
    for scheme in sc.schemes:
        if ev.sgp[scheme][0]:
            paths.append(ev.sgp[scheme][0])
            labels.append("SGP")
        if scheme in ev.crossing:
            paths.append(ev.crossing[scheme])
            labels.append("X")
    if sc.family == "single_cell_ring" and NeighborScheme.SQUARE4 in ev.crossing:
        paths.append(shortcut_path_square(sc.mesh, ev.crossing[NeighborScheme.SQUARE4], sc.mesh.cell_of((1, 1))))
        labels.append("shortcut")
    _write(args.svg, render_svg(sc.mesh, sc.weight_field, paths, labels, sc.id))
    return EXIT_OK


def cmd_bounds(args) -> int:
    for b in ex.bound_table().bounds:
        print(f"{b.kind.value:6s} {b.scheme:8s} {b.ratio:8s} lower {b.lower:.12f} ({b.lower_form}) "
              f"upper {b.upper:.12f} ({b.upper_form})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wrp", description="Weighted region paths on square and hexagonal meshes.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a scenario file")
    g.add_argument("family", choices=["random", "square-svp", "hex-svp", "nash", "triple", "ring", "demo"])
    g.add_argument("--kind", choices=["Square", "Hex"], default="Square")
    g.add_argument("--width", type=int, default=None)
    g.add_argument("--height", type=int, default=None)
    g.add_argument("--weights", choices=["loguniform", "uniform", "unit"], default="loguniform")
    g.add_argument("--inf-fraction", type=float, default=0.1)
    g.add_argument("--a", type=float, default=None, help="riding parameter of the vertex-path families")
    g.add_argument("--scheme", default=None)
    g.add_argument("--length", type=float, default=40.0)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--ell", type=int, default=1)
    g.add_argument("--inner", default=None, help="comma separated inner weights of a triple")
    g.add_argument("--omega", type=float, default=1.0)
    g.add_argument("--m", type=int, default=None, help="Steiner points per edge")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="shortest path costs for one scenario")
    s.add_argument("--scenario", required=True)
    s.add_argument("--scheme", default=None)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("cross", help="crossing path and polygon ratios")
    c.add_argument("--scenario", required=True)
    c.add_argument("--scheme", default=None)
    c.add_argument("--svg", default=None)
    c.set_defaults(func=cmd_cross)

    r = sub.add_parser("ratios", help="batch ratio report")
    r.add_argument("--dir", default=None)
    r.add_argument("--scenario", action="append")
    r.add_argument("--csv", default=None)
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_ratios)

    v = sub.add_parser("render", help="draw a scenario and its paths")
    v.add_argument("--scenario", required=True)
    v.add_argument("--svg", required=True)
    v.set_defaults(func=cmd_render)

    b = sub.add_parser("bounds", help="print the bound table")
    b.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.family == "random":
        args.width = args.width or 12
        args.height = args.height or args.width
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wrp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"wrp: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
