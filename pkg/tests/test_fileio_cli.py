import json
import random
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pentalab import condensation as cd
from pentalab import fileio as fio
from pentalab.cli import main
from pentalab.dynamics import POINTS, TwistedPolygon, closed_polygon
from pentalab.projective import ProjMap

rationals = st.fractions(max_denominator=10 ** 6)


@given(rationals)
def test_rational_round_trip(q):
    assert fio.parse_rational(fio.fmt(q)) == q


def test_rational_parse_errors():
    for bad in ("1/0", "x", 1.5, None, True, [1]):
        with pytest.raises(fio.ParseError):
            fio.parse_rational(bad)


@given(st.lists(st.tuples(rationals, rationals, rationals).filter(lambda t: any(t)), min_size=3, max_size=7))
def test_polygon_round_trip(reps):
    T = ProjMap(((2, 1, 0), (0, 1, 0), (F(1, 3), 0, 1)))
    for mono in (ProjMap.identity(), T):
        P = TwistedPolygon(POINTS, 3, tuple(reps), mono)
        text = fio.dumps(fio.polygon_to_dict(P))
        assert fio.polygon_from_dict(json.loads(text)) == P


def test_polygon_parse_errors():
    good = fio.polygon_to_dict(closed_polygon([(0, 0, 1), (1, 0, 1), (0, 1, 1)]))
    for patch in ({"n": 2}, {"kind": "circles"}, {"parity": 2}, {"reps": [["1", "2"]] * 3},
                  {"monodromy": [["0"] * 3] * 3}):
        with pytest.raises(fio.ParseError):
            fio.polygon_from_dict({**good, **patch})
    with pytest.raises(fio.ParseError):
        fio.polygon_from_dict({"n": 3})


def test_matrix_formats():
    M = [[F(1, 2), 3], [4, F(-5, 7)]]
    doc = fio.matrix_to_json(M)
    assert fio.matrix_from_json(doc) == M
    assert fio.matrix_from_json(doc["matrix"]) == M
    with pytest.raises(fio.ParseError):
        fio.matrix_from_json([["1", "2"], ["3"]])


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main(list(argv) + ["-o", str(out)])
    return code, json.loads(out.read_text())


def random_polygon(n, seed):
    rng = random.Random(seed)
    return closed_polygon([(rng.randint(-30, 30), rng.randint(-30, 30), 1) for _ in range(n)])


def test_condense_example(tmp_path):
    path = write(tmp_path / "m.json", [["1", "2", "3"], ["4", "5", "6"], ["7", "8", "10"]])
    code, rep = run(tmp_path, "condense", path)
    assert code == 0 and rep["result"]["determinant"] == "-3"


def test_condense_zero_interior(tmp_path):
    eye = [[str(int(i == j)) for j in range(5)] for i in range(5)]
    path = write(tmp_path / "eye.json", {"matrix": eye})
    code, rep = run(tmp_path, "condense", path)
    assert code == 5 and "position" in rep
    code, rep = run(tmp_path, "condense", path, "--retry")
    assert code == 0 and rep["result"]["determinant"] == "1"


def test_invariants_closed_polygon(tmp_path):
    path = write(tmp_path / "p.json", fio.polygon_to_dict(random_polygon(7, 1)))
    code, rep = run(tmp_path, "invariants", path)
    assert code == 0
    assert rep["result"]["omega_formula"] == ["27", "27"] == rep["result"]["omega_geometric"]


def test_invariants_rectilinear_edges(tmp_path):
    E = cd.edge_polyline(cd.rectilinear_polygon(3, 7))
    path = write(tmp_path / "e.json", fio.polygon_to_dict(E))
    code, rep = run(tmp_path, "invariants", path)
    res = rep["result"]
    assert all(res[f][str(k)] == "0" for f in "OE" for k in range(1, 6))
    assert res["O"]["6"] == res["E"]["6"] == "2"
    assert res["O"]["12"] == res["E"]["12"] == "1"
    assert res["degenerate"]["geometric"]


def test_invariants_degenerate_input(tmp_path):
    pts = [(0, 0, 1), (1, 0, 1), (2, 0, 1), (0, 1, 1), (1, 1, 1)]
    path = write(tmp_path / "d.json", fio.polygon_to_dict(closed_polygon(pts)))
    code, rep = run(tmp_path, "invariants", path)
    assert code == 3 and "error" in rep


def test_bad_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "invariants", str(bad))[0] == 2
    assert run(tmp_path, "reconstruct", str(bad))[0] == 2
    assert run(tmp_path, "condense", str(tmp_path / "missing.json"))[0] == 2


def test_iterate_and_svg(tmp_path):
    path = write(tmp_path / "p.json", fio.polygon_to_dict(random_polygon(6, 3)))
    code, rep = run(tmp_path, "iterate", path, "--steps", "2", "--map", "alpha1",
                    "--svg", str(tmp_path / "svg"))
    steps = rep["result"]["steps"]
    assert code == 0 and rep["result"]["swap_each_step"]
    assert steps[2]["invariants"] == steps[0]["invariants"]
    files = sorted((tmp_path / "svg").iterdir())
    assert len(files) == 3
    for f in files:
        assert ET.parse(f).getroot().tag.endswith("svg")


def test_iterate_reports_pole(tmp_path):
    # x_2 x_3 = 1 is a pole of the second involution
    x = ["3", "2", "1/2", "5", "-1", "7"]
    path = write(tmp_path / "x.json", {"x": x})
    code, rep = run(tmp_path, "reconstruct", path)
    poly = tmp_path / "P.json"
    poly.write_text(json.dumps(rep["result"]["polypoint"]))
    code, rep = run(tmp_path, "iterate", str(poly), "--steps", "1", "--map", "alpha2")
    assert code == 4 and rep["step"] == 1 and rep["index"] == 2


def test_reconstruct_round_trip(tmp_path):
    path = write(tmp_path / "x.json", {"x": ["2", "3/2", "-1", "5", "1/3", "4", "7", "-2"]})
    code, rep = run(tmp_path, "reconstruct", path)
    assert code == 0 and rep["result"]["roundtrip"]
    assert "monodromy" in rep["result"]["polypoint"]


def test_numeric_commands(tmp_path):
    code, rep = run(tmp_path, "collapse", "--N", "3", "--seed", "2")
    assert code == 0 and rep["result"]["collapse_step"] == 4
    code, rep = run(tmp_path, "independence", "--n", "5")
    assert code == 0 and rep["result"]["rank"] == 6
    code, rep = run(tmp_path, "vanishing", "--n-max", "9")
    assert code == 0 and len(rep["result"]["rows"]) == 1 + 2 + 3


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("PENTALAB_SEED", "17")
    code, rep = run(tmp_path, "independence", "--n", "3")
    assert rep["config"]["seed"] == 17 and rep["result"]["seed"] == 17


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    assert "exit codes" in out and "PENTALAB_SEED" in out
