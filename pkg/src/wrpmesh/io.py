"""Scenario JSON files and CSV ratio reports."""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable

from .experiments import RatioRecord, Scenario, cached_mesh
from .graphs import NeighborScheme
from .mesh import INF, MeshKind, MeshSpec
from .oracle import SteinerConfig

FORMAT_VERSION = 1
REPORT_COLUMNS = ("scenario_id", "scheme", "cost_sp", "cost_svp", "cost_sgp", "ratio_sgp_sp", "ratio_svp_sp",
                  "ratio_sgp_svp", "max_polygon_ratio", "bound", "verdict")

_TOP_FIELDS = {"version", "id", "family", "mesh", "weights", "source", "target", "schemes", "oracle", "seed",
               "scored"}
_REQUIRED = {"version", "mesh", "weights", "source", "target"}


class ScenarioError(ValueError):
    """Schema violation in a scenario file; the message names the field or line."""


def _fail(where: str, msg: str):
    raise ScenarioError(f"{where}: {msg}")


def _number(v, where: str) -> float:
    if v == "inf":
        return INF
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(where, f"expected a number or \"inf\", got {v!r}")
    v = float(v)
    if math.isnan(v) or v <= 0 or v == INF:
        _fail(where, f"weight must be positive and finite (or \"inf\"), got {v!r}")
    return v


def _int(v, where: str, lo: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(where, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        _fail(where, f"must be at least {lo}, got {v}")
    return v


def _keys(obj, allowed: set, required: set, where: str):
    if not isinstance(obj, dict):
        _fail(where, "expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        _fail(where, f"unknown field(s) {', '.join(unknown)}")
    missing = sorted(required - set(obj))
    if missing:
        _fail(where, f"missing field(s) {', '.join(missing)}")


def parse_scenario(data: bytes | str) -> Scenario:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    _keys(doc, _TOP_FIELDS, _REQUIRED, "document")
    if doc["version"] != FORMAT_VERSION:
        _fail("version", f"unsupported version {doc['version']!r}")
    mesh_doc = doc["mesh"]
    _keys(mesh_doc, {"kind", "width", "height"}, {"kind", "width", "height"}, "mesh")
    try:
        kind = MeshKind(mesh_doc["kind"])
    except ValueError:
        _fail("mesh.kind", f"unknown mesh kind {mesh_doc['kind']!r}")
    spec = MeshSpec(kind, _int(mesh_doc["width"], "mesh.width", 1), _int(mesh_doc["height"], "mesh.height", 1))
    mesh = cached_mesh(spec)
    weights = doc["weights"]
    if not isinstance(weights, list) or len(weights) != mesh.n_cells:
        _fail("weights", f"expected a list of {mesh.n_cells} entries")
    weights = tuple(_number(v, f"weights[{i}]") for i, v in enumerate(weights))

    def corner(name):
        v = doc[name]
        if not (isinstance(v, list) and len(v) == 2):
            _fail(name, "expected [x, y] lattice coordinates")
        xy = (_int(v[0], f"{name}[0]"), _int(v[1], f"{name}[1]"))
        if xy not in mesh.corner_index:
            _fail(name, f"{list(xy)} is not a corner of the mesh")
        return mesh.corner_index[xy]

    source, target = corner("source"), corner("target")
    schemes = doc.get("schemes")
    if schemes is None:
        schemes = ["Hex3", "Hex12"] if kind is MeshKind.HEX else ["Square4", "Square8"]
    if not isinstance(schemes, list) or not schemes:
        _fail("schemes", "expected a non-empty list")
    parsed = []
    for i, s in enumerate(schemes):
        try:
            parsed.append(NeighborScheme(s))
        except ValueError:
            _fail(f"schemes[{i}]", f"unknown scheme {s!r}")
    oracle_doc = doc.get("oracle", {})
    _keys(oracle_doc, {"m", "refine"}, set(), "oracle")
    m = _int(oracle_doc.get("m", SteinerConfig.m), "oracle.m", 0)
    refine = oracle_doc.get("refine", True)
    if not isinstance(refine, bool):
        _fail("oracle.refine", "expected true or false")
    seed = doc.get("seed")
    if seed is not None:
        seed = _int(seed, "seed")
    scored = doc.get("scored", True)
    if not isinstance(scored, bool):
        _fail("scored", "expected true or false")
    sid = doc.get("id", "scenario")
    family = doc.get("family", "custom")
    for name, v in (("id", sid), ("family", family)):
        if not isinstance(v, str) or not v:
            _fail(name, "expected a non-empty string")
    try:
        return Scenario(sid, spec, weights, source, target, tuple(parsed), SteinerConfig(m=m, refine=refine),
                        seed, family, scored)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def scenario_document(sc: Scenario) -> dict:
    mesh = sc.mesh
    return {
        "version": FORMAT_VERSION,
        "id": sc.id,
        "family": sc.family,
        "mesh": {"kind": sc.spec.kind.value, "width": sc.spec.width, "height": sc.spec.height},
        "weights": ["inf" if v == INF else v for v in sc.weights],
        "source": [int(v) for v in mesh.corner_lattice[sc.source]],
        "target": [int(v) for v in mesh.corner_lattice[sc.target]],
        "schemes": [s.value for s in sc.schemes],
        "oracle": {"m": sc.oracle.m, "refine": sc.oracle.refine},
        "seed": sc.seed,
        "scored": sc.scored,
    }


def serialize_scenario(sc: Scenario) -> bytes:
    """Canonical form: sorted keys, shortest round-trip floats, trailing newline."""
    text = json.dumps(scenario_document(sc), sort_keys=True, indent=1, allow_nan=False)
    return (text + "\n").encode("utf-8")


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".12g")


def report_rows(records: Iterable[RatioRecord]) -> list[list[str]]:
    rows = []
    for r in records:
        rows.append([r.scenario_id, r.scheme] + [format_value(getattr(r, c)) for c in REPORT_COLUMNS[2:-1]]
                    + [r.verdict])
    return rows


def write_report(records: Iterable[RatioRecord], out=None) -> str:
    """Write the CSV report to ``out`` (a text stream) and return it as a string."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(REPORT_COLUMNS)
    writer.writerows(report_rows(records))
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text
