from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from fpmc.cli import exact, main, parse_config, parse_divisor, serialize_config
from fpmc.config import CurveConfiguration
from fpmc.errors import InputInvalid
from fpmc.fixtures import three_curve_config, fixture


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_three_curve_file():
    text = serialize_config(three_curve_config(3, 1))
    c = parse_config(text)
    assert c.gram == ((-3, 1, 0), (1, -1, 1), (0, 1, -1))


def test_parse_errors_name_paths():
    base = json.loads(serialize_config(three_curve_config(1, 0)))
    asym = dict(base, gram=[[-1, 2, 0], [1, -1, 1], [0, 1, -1]])
    with pytest.raises(InputInvalid, match=r"\[0\]\[1\].*\[1\]\[0\]"):
        parse_config(json.dumps(asym))
    with pytest.raises(InputInvalid, match="no curves"):
        parse_config(json.dumps(dict(base, curves=[], gram=[])))
    with pytest.raises(InputInvalid, match=r"\$\.gram"):
        parse_config(json.dumps(dict(base, gram=[[-1]])))
    with pytest.raises(InputInvalid, match=r"\$\.curves\[1\]\.genus"):
        bad = json.loads(json.dumps(base))
        bad["curves"][1]["genus"] = -1
        parse_config(json.dumps(bad))
    with pytest.raises(InputInvalid, match="invalid JSON"):
        parse_config("{")
    with pytest.raises(InputInvalid, match=r"\$\.gram\[0\]\[0\]"):
        parse_config(json.dumps(dict(base, gram=[[1.5, 1, 0], [1, -1, 1], [0, 1, -1]])))


@st.composite
def configs(draw):
    n = draw(st.integers(1, 5))
    G = [[0] * n for _ in range(n)]
    for i in range(n):
        G[i][i] = draw(st.integers(-5, 5))
        for j in range(i + 1, n):
            G[i][j] = G[j][i] = draw(st.integers(0, 2 ** 70))
    genera = tuple(draw(st.integers(0, 4)) for _ in range(n))
    amb = draw(st.one_of(st.none(), st.integers(1, 8)))
    return CurveConfiguration(tuple(f"c{i}" for i in range(n)), G, genera, ambient_rank=amb, label=draw(st.text(max_size=8)))


@given(configs())
def test_round_trip(c):
    assert parse_config(serialize_config(c)) == c
    assert serialize_config(parse_config(serialize_config(c))) == serialize_config(c)


@given(st.integers())
def test_exact_rendering_round_trips_integers(x):
    y = exact(x)
    assert int(y) == x
    assert isinstance(y, int) == (abs(x) < 2 ** 63)


def test_exact_rationals():
    from fractions import Fraction

    assert exact(Fraction(3, 4)) == "3/4" and exact(Fraction(4, 2)) == 2


def test_divisor_parsing():
    c = fixture("HD8t").payload
    D = parse_divisor("E2 + E4 + 2E6 + 2*E8 + 2 E9", c)
    assert D == c.divisor({"E2": 1, "E4": 1, "E6": 2, "E8": 2, "E9": 2})
    assert parse_divisor("[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, '1/2']".replace("'", '"'), c)[-1] == 0.5
    with pytest.raises(InputInvalid):
        parse_divisor("E2 E4", c)
    with pytest.raises(InputInvalid):
        parse_divisor("X1", c)


def test_certify_exit_codes(tmp_path, capsys):
    ok = write(tmp_path, "ok.json", serialize_config(three_curve_config(3, 0)))
    code, out, _ = run(capsys, "certify", ok)
    assert code == 0 and out.startswith("certified")
    bad = write(tmp_path, "bad.json", {
        "name": "refuted", "curves": [{"name": n, "genus": 0} for n in "ABC"],
        "gram": [[-1, 2, 0], [2, -1, 1], [0, 1, -1]]})
    code, out, _ = run(capsys, "--json", "certify", bad)
    rep = json.loads(out)
    assert code == 1 and rep["status"] == "refuted" and rep["payload"]["witness"] == [2, 1, -3]
    assert rep["input_digest"].startswith("sha256:")
    assert list(rep) == ["command", "input_digest", "status", "payload"]


def test_input_and_precondition_exit_codes(tmp_path, capsys):
    code, _, err = run(capsys, "certify", str(tmp_path / "missing.json"))
    assert code == 2 and "error" in err
    neg = write(tmp_path, "neg.json", {"curves": [{"name": "a", "genus": 0}, {"name": "b", "genus": 0}],
                                       "gram": [[-2, 1], [1, -2]]})
    code, _, _ = run(capsys, "certify", neg)
    assert code == 3
    code, _, _ = run(capsys, "classes", neg, "--delta", "1", "--pmax", "0")
    assert code == 3
    code, _, _ = run(capsys, "certify")
    assert code == 2


def test_ample_reider_command(tmp_path, capsys):
    f = write(tmp_path, "c.json", serialize_config(three_curve_config(1, 0)))
    code, out, _ = run(capsys, "--json", "ample", f, "--minimal", "--reider")
    rep = json.loads(out)["payload"]
    assert code == 0 and rep["a"] == [2, 3, 2] and rep["square"] == 7
    assert rep["reider"]["square"] == 63 and rep["reider"]["products"] == [3, 3, 3]


def test_graph_commands(tmp_path, capsys):
    code, out, _ = run(capsys, "fixtures", "HE8t", "--export")
    f = write(tmp_path, "he.json", out)
    code, out, _ = run(capsys, "--json", "case2b", f)
    rep = json.loads(out)
    assert code == 0 and rep["payload"]["fibers"][0]["index"] == 1
    code, out, _ = run(capsys, "--json", "roots", f)
    comps = json.loads(out)["payload"]["components"]
    assert comps[0]["type"] == "E8~" and sorted(comps[0]["marks"]) == [1, 2, 2, 3, 3, 4, 4, 5, 6]
    code, out, _ = run(capsys, "analyze", f)
    assert code == 0 and "(10, 2, 0)" in out


def test_blowup_and_fixture_commands(tmp_path, capsys):
    code, out, _ = run(capsys, "fixtures", "tower", "--param", "k=3", "--export")
    script = write(tmp_path, "tower.json", out)
    code, out, _ = run(capsys, "--json", "blowup", script)
    rep = json.loads(out)["payload"]
    assert code == 0 and rep["ambient_rank"] == 6 and rep["K_square"] == -4
    code, out, _ = run(capsys, "blowup", script, "--export")
    cfg = write(tmp_path, "tower_cfg.json", out)
    assert run(capsys, "certify", cfg)[0] == 0
    bad = write(tmp_path, "bad_script.json", {"seed": {"kind": "plane", "lines": ["A"]}, "steps": [[["A", 2]]]})
    code, _, err = run(capsys, "blowup", bad)
    assert code == 1 and "step 0" in err
    code, out, _ = run(capsys, "fixtures")
    assert code == 0 and "HA8t" in out
    code, _, _ = run(capsys, "fixtures", "unknown")
    assert code == 2


def test_mw_commands(capsys):
    code, out, _ = run(capsys, "--json", "mw", "--fibers", "A5~+A1~+A2~")
    assert code == 0 and json.loads(out)["payload"]["invariant_factors"] == [6]
    code, _, _ = run(capsys, "mw", "--fibers", "E7~")
    assert code == 2
    code, out, _ = run(capsys, "mw", "--verify-table")
    assert code == 1 and out.count("\n") == 14 and "12/13 rows reproduced" in out


def test_enumerate_and_classes(tmp_path, capsys):
    code, out, _ = run(capsys, "--json", "enumerate-gram", "--rho", "3", "--delta", "1", "--max-offdiag", "1", "--list")
    rep = json.loads(out)["payload"]
    assert rep["count"] == 2 and len(rep["matrices"]) == 2
    code, out, _ = run(capsys, "enumerate-gram", "--rho", "3", "--delta", "1", "--max-offdiag", "1", "--bounds", "--pmax", "0")
    assert code == 0 and "N_effective" in out
    plane2 = write(tmp_path, "p2.json", {
        "name": "plane blown up twice",
        "curves": [{"name": "e1", "genus": 0}, {"name": "e2", "genus": 0}, {"name": "l", "genus": 0}],
        "gram": [[-1, 0, 1], [0, -1, 1], [1, 1, -1]]})
    code, out, _ = run(capsys, "--json", "classes", plane2, "--delta", "1", "--pmax", "0")
    rep = json.loads(out)["payload"]
    assert code == 0 and sorted(rep["classes"]) == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]


def test_almost_command(tmp_path, capsys):
    ruled = write(tmp_path, "r.json", {"curves": [{"name": "C", "genus": 0}, {"name": "f", "genus": 0}],
                                       "gram": [[-1, 1], [1, 0]]})
    gens = write(tmp_path, "g.json", [[1, 0], "C + 2f"])
    assert run(capsys, "almost", ruled, "--r", "f")[0] == 0
    assert run(capsys, "almost", ruled, "--r", "f", "--gens", gens)[0] == 1
    assert run(capsys, "almost", ruled, "--r", "f", "--R", "0")[0] == 1
