import io
import json
import math

import pytest

from properlab.cli import run


def call(*argv):
    out, err = io.BytesIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue().decode(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--json")
    assert code == 0, err
    return json.loads(out)


def test_mu():
    rep = call_json("mu", "--matrix", "[[2,0],[0,0.5]]")
    assert rep["command"] == "mu"
    assert rep["verdict"]["mu"] == pytest.approx([math.log(2), -math.log(2)], abs=1e-9)
    assert set(rep) == {"command", "inputs", "verdict", "method", "warnings"}


def test_json_sorted_and_stable():
    a = call("proper", "--family", "A", "--rank", "2", "--a-L", "[[1,0,-1]]", "--json")[1]
    b = call("proper", "--family", "A", "--rank", "2", "--a-L", "[[1,0,-1]]", "--json")[1]
    assert a == b
    assert a.strip() == json.dumps(json.loads(a), sort_keys=True)


def test_proper_and_similar():
    rep = call_json("proper", "--family", "A", "--rank", "2", "--a-L", "[[1,0,-1]]", "--a-H", "[[1,-2,1]]")
    assert rep["verdict"]["proper"] is True
    rep = call_json("proper", "--family", "A", "--rank", "2", "--a-L", "[[1,0,-1]]", "--a-H", "[[1,0,-1]]")
    assert rep["verdict"]["proper"] is False
    rep = call_json("similar", "--family", "A", "--rank", "1", "--a-L", "[[1,-1]]", "--a-H", "[[1,-1]]")
    assert rep["verdict"]["similar"] is True


def test_calabi_markus_and_cocompact():
    assert call_json("calabi-markus", "--G", "SO(3,1)", "--H", "SO(2,1)")["verdict"]["infinite_discontinuous_group"] is False
    assert call_json("calabi-markus", "--G", "SO(2,2)", "--H", "SO(2,1)")["verdict"]["infinite_discontinuous_group"] is True
    rep = call_json("cocompact", "--G", "SO(2,2)", "--H", "SO(2,1)", "--L", "U(1,1)")
    assert "verdict" in rep


def test_sl2():
    rep = call_json("sl2", "--n", "5", "--m", "3", "--partition", "5")
    assert rep["verdict"]["proper"] is True
    assert rep["verdict"]["printed_formula"] is False
    assert rep["warnings"]
    rep = call_json("sl2-audit", "--n-max", "4")
    assert "verdict" in rep


def test_pv_tempered():
    rep = call_json("pv", "--family", "A", "--rank", "1")
    assert rep["verdict"]["value"] == "2"
    rep = call_json("tempered", "--family", "A", "--rank", "2", "--rep", "adjoint")
    assert rep["verdict"]["derived_chh"] == "tempered" and rep["verdict"]["p_V"] == "1"


def test_vol_sim_csv():
    code, out, _ = call("vol", "sim", "--u", "1,-1", "--exact", "--t-grid", "0:1:3", "--csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,estimate,stderr,exact"
    assert float(lines[1].split(",")[1]) == 4.0
    code, out, _ = call("vol", "sim", "--u", "1,-1", "--t-grid", "0:1:3", "--samples", "20000", "--csv")
    assert code == 0 and len(out.strip().splitlines()) == 4


def test_vol_sim_threads_identical():
    args = ("vol", "sim", "--u", "1,0,-1", "--t-grid", "0:1:3", "--samples", "50000", "--json")
    assert call(*args, "--threads", "1")[1] == call(*args, "--threads", "4")[1]


def test_vol_fit_q():
    rep = call_json("vol", "fit-q", "--group", "SL(2)", "--samples", "200000", "--shards", "4")
    assert abs(rep["verdict"]["q_hat"] - 2.0) < 0.2


def test_catalog():
    assert call_json("catalog", "spaceform", "--p", "3", "--q", "4")["verdict"]["cm_infinite"] is True
    rep = call_json("catalog", "tangential-table", "--p-max", "11")
    assert rep["verdict"]["mismatches"] == [2]
    code, out, _ = call("catalog", "tangential-table", "--p-max", "3")
    assert code == 0 and out.startswith("| p | computed |")


def test_selftest_subset():
    rep = call_json("selftest", "--only", "1,9")
    assert all(c["passed"] for c in rep["verdict"]["criteria"]) and rep["verdict"]["all_passed"]


def test_input_errors_exit_1():
    code, _, err = call("mu", "--matrix", "[[1,2],[3]]")
    assert code == 1 and "matrix" in err
    code, _, err = call("vol", "sim", "--u", "1,1")
    assert code == 1 and "u" in err
    code, _, err = call("calabi-markus", "--G", "SO(3)", "--H", "SO(2,1)")
    assert code == 1 and err.startswith("error: G")
    assert call("nonsense")[0] == 1
    assert call("mu", "--threads", "0", "--matrix", "[[1]]")[0] == 1


def test_resource_cap_exit_2():
    code, _, err = call("proper", "--family", "A", "--rank", "6", "--a-L", "[]", "--cap", "10")
    assert code == 2 and "limit" in err


def test_problem_files(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"version": "1", "ambient": {"family": "A", "rank": 2}, "a_L": [[1, 0, -1]], "a_H": [[1, -2, 1]]}))
    assert call_json("proper", "--file", str(f))["verdict"]["proper"] is True
    f.write_text(json.dumps({"ambient": {"family": "A", "rank": 2}, "a_L": [], "a_H": [], "extra": 1}))
    code, _, err = call("proper", "--file", str(f))
    assert code == 1 and "extra" in err
    f.write_text(json.dumps({"ambient": {"family": "A", "rank": 2, "bogus": 0}, "a_L": [], "a_H": []}))
    code, _, err = call("proper", "--file", str(f))
    assert code == 1 and "ambient.bogus" in err
    f.write_text(json.dumps({"ambient": {"family": "A", "rank": 2}, "a_L": [[1, 0]], "a_H": []}))
    code, _, err = call("proper", "--file", str(f))
    assert code == 1 and "a_L.basis[0]" in err
    code, _, err = call("proper", "--file", str(tmp_path / "missing.json"))
    assert code == 1


def test_report_roundtrip():
    rep = call_json("pv", "--family", "B", "--rank", "2", "--rep", "adjoint")
    assert json.loads(json.dumps(rep, sort_keys=True)) == rep


def test_mu_diag_e():
    e = math.e
    rep = call_json("mu", "--matrix", json.dumps([[e, 0], [0, 1 / e]]))
    assert [round(x, 9) for x in rep["verdict"]["mu"]] == [1.0, -1.0]
