import csv
import io
import json
import math

import pytest

from wrpmesh.cli import main
from wrpmesh.experiments import (
    adversarial_nash_corridor,
    center_vertex_demo,
    random_scenario,
    run_batch,
    single_cell_ring,
)
from wrpmesh.io import (
    REPORT_COLUMNS,
    ScenarioError,
    format_value,
    parse_scenario,
    serialize_scenario,
    write_report,
)
from wrpmesh.mesh import INF
from wrpmesh.svg import render_svg

MINIMAL = b'{"version": 1, "mesh": {"kind": "Square", "width": 1, "height": 1}, "weights": [2.5],' \
          b' "source": [0, 0], "target": [1, 1]}'


def _doc(**changes):
    doc = json.loads(MINIMAL)
    doc.update(changes)
    return json.dumps(doc)


def test_minimal_file():
    sc = parse_scenario(MINIMAL)
    assert sc.weights == (2.5,)
    assert sc.mesh.corners[sc.source] == (0, 0) and sc.mesh.corners[sc.target] == (1, 1)
    assert [s.value for s in sc.schemes] == ["Square4", "Square8"]
    assert sc.oracle.m == 12 and sc.oracle.refine


def test_inf_token():
    sc = parse_scenario(_doc(mesh={"kind": "Square", "width": 2, "height": 1}, weights=[1, "inf"]))
    assert sc.weights[1] == INF


def test_round_trip_is_byte_stable():
    for seed in range(100):
        kind = "Hex" if seed % 2 else "Square"
        sc = random_scenario(kind, 3 + seed % 4, 2 + seed % 5, seed=seed)
        data = serialize_scenario(sc)
        back = parse_scenario(data)
        assert back == sc
        assert serialize_scenario(back) == data


def test_family_scenarios_round_trip():
    for sc in (single_cell_ring(2.0), center_vertex_demo()[0], adversarial_nash_corridor("Hex", "Hex12", 10)):
        assert parse_scenario(serialize_scenario(sc)) == sc


@pytest.mark.parametrize("changes,needle", [
    (dict(colour="red"), "colour"),
    (dict(version=2), "version"),
    (dict(weights=[1, 2]), "weights"),
    (dict(weights=[-1]), "weights[0]"),
    (dict(weights=["nan"]), "weights[0]"),
    (dict(source=[5, 5]), "source"),
    (dict(target=[0.5, 1]), "target[0]"),
    (dict(schemes=["Square9"]), "schemes[0]"),
    (dict(oracle={"m": -1}), "oracle.m"),
    (dict(oracle={"steps": 3}), "steps"),
    (dict(mesh={"kind": "Tri", "width": 1, "height": 1}), "mesh.kind"),
    (dict(mesh={"kind": "Square", "width": 0, "height": 1}), "mesh.width"),
    (dict(target=[0, 0]), "source equals target"),
])
def test_schema_errors_name_the_field(changes, needle):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(_doc(**changes))
    assert needle in str(exc.value)


def test_missing_field():
    doc = json.loads(MINIMAL)
    del doc["weights"]
    with pytest.raises(ScenarioError, match="missing field.*weights"):
        parse_scenario(json.dumps(doc))


def test_syntax_error_reports_line():
    with pytest.raises(ScenarioError, match="line 3"):
        parse_scenario('{\n "version": 1,\n "mesh": oops\n}')
    with pytest.raises(ScenarioError):
        parse_scenario(b"\xff\xfe")


# -- CSV -------------------------------------------------------------------------


def test_empty_report_is_header_only():
    text = write_report([])
    assert text == ",".join(REPORT_COLUMNS) + "\r\n"


def test_report_rows_follow_batch():
    scs = [random_scenario("Square", 4, 4, seed=1), single_cell_ring(3.0)]
    res = run_batch(scs)
    buf = io.StringIO()
    text = write_report(res.records, buf)
    assert buf.getvalue() == text
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(REPORT_COLUMNS)
    assert len(rows) == 1 + len(res.records)
    for row, rec in zip(rows[1:], res.records):
        assert row[0] == rec.scenario_id and row[1] == rec.scheme and row[-1] == rec.verdict
        assert float(row[2]) == pytest.approx(rec.cost_sp, rel=1e-11)


def test_one_record_one_row():
    res = run_batch([single_cell_ring()])
    assert write_report(res.records[:1]).count("\r\n") == 2


def test_value_formatting():
    assert format_value(INF) == "inf"
    assert format_value(math.nan) == "nan"
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(2.0) == "2"


# -- SVG -------------------------------------------------------------------------


def test_svg_is_deterministic():
    sc = random_scenario("Hex", 4, 3, seed=2)
    a = render_svg(sc.mesh, sc.weight_field, title="x")
    b = render_svg(sc.mesh, sc.weight_field, title="x")
    assert a == b
    assert a.startswith(b"<svg") and a.rstrip().endswith(b"</svg>")


def test_svg_without_paths_draws_only_the_mesh():
    sc = random_scenario("Square", 3, 3, seed=2)
    svg = render_svg(sc.mesh, sc.weight_field).decode()
    assert svg.count("<polygon") == sc.mesh.n_cells
    assert "<polyline" not in svg


def test_svg_ring_two_paths():
    sc = single_cell_ring(2.0)
    m = sc.mesh
    sp = [m.corner_point(sc.source), m.corner_point(sc.target)]
    xp = [sp[0], (sp[0][0] + 1, sp[0][1]), sp[1]]
    svg = render_svg(m, sc.weight_field, [sp, xp], ["SP", "X"]).decode()
    assert svg.count("<polyline") == 2
    assert "#000000" in svg  # obstacle cells


# -- CLI -------------------------------------------------------------------------


def test_cli_round(tmp_path, capsys):
    f = tmp_path / "ring.json"
    assert main(["gen", "ring", "--omega", "2", "--out", str(f)]) == 0
    assert main(["solve", "--scenario", str(f)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert float(out["sp"]) == pytest.approx(2 * math.sqrt(2))
    assert main(["cross", "--scenario", str(f), "--scheme", "Square4", "--svg", str(tmp_path / "x.svg")]) == 0
    assert "ratio 1.41421356237" in capsys.readouterr().out
    assert main(["render", "--scenario", str(f), "--svg", str(tmp_path / "r.svg")]) == 0
    assert (tmp_path / "r.svg").read_bytes().count(b"<polyline") >= 3
    assert main(["bounds"]) == 0
    assert "1.082392200292" in capsys.readouterr().out


def test_cli_ratios(tmp_path, capsys):
    d = tmp_path / "scs"
    d.mkdir()
    for seed in range(3):
        assert main(["gen", "random", "--width", "4", "--seed", str(seed), "--out", str(d / f"s{seed}.json")]) == 0
    assert main(["gen", "demo", "--out", str(d / "demo.json")]) == 0
    out = tmp_path / "r.csv"
    assert main(["ratios", "--dir", str(d), "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open(newline="")))
    assert len(rows) == 1 + 4 * 2
    assert {r[-1] for r in rows[1:]} == {"PASS", "SKIP"}


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["solve", "--scenario", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1}')
    assert main(["solve", "--scenario", str(bad)]) == 2
    assert "missing field" in capsys.readouterr().err
    assert main(["ratios"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    f = tmp_path / "ring.json"
    main(["gen", "ring", "--out", str(f)])
    assert main(["cross", "--scenario", str(f), "--scheme", "Hex3"]) == 2
    assert main(["cross", "--scenario", str(f)]) == 2


def test_cli_failing_batch_exits_one(tmp_path):
    doc = json.loads(MINIMAL)
    doc.update(mesh={"kind": "Square", "width": 3, "height": 1}, weights=[1, "inf", 1], target=[3, 0], id="cut")
    f = tmp_path / "cut.json"
    f.write_text(json.dumps(doc))
    assert main(["ratios", "--scenario", str(f)]) == 1
