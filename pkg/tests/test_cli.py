import json
import subprocess
import sys

import pytest

from diagcycle.cli import run
from diagcycle.data import canonical_json, load_fixture


def nf(label, level, degree, al):
    return {"label": label, "level": level, "weight": 2, "hecke_degree": degree, "atkin_lehner": al}


@pytest.fixture
def toy(tmp_path):
    obj = {
        "newforms": [
            nf("77.2.a.a", 77, 1, {"7": 1, "11": -1}),
            nf("77.2.a.b", 77, 1, {"7": -1, "11": 1}),
            nf("77.2.a.c", 77, 3, {"7": -1, "11": -1}),
            nf("77.2.a.d", 77, 1, {"7": 1, "11": 1}),
            nf("75.2.a.a", 75, 1, {"3": 1}),
            nf("75.2.a.b", 75, 2, {"3": -1}),
        ],
        "curves": [
            {"label": "77:c", "level": 77, "genus": 3, "newforms": ["77.2.a.c"]},
            {"label": "77:ad", "level": 77, "genus": 2, "newforms": ["77.2.a.a", "77.2.a.d"]},
            {"label": "75:ab", "level": 75, "genus": 3, "newforms": ["75.2.a.a", "75.2.a.b"]},
        ],
    }
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(obj))
    return str(path)


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_curve_exit_codes(capsys, toy):
    code, out, _ = call(capsys, "check-curve", "77:c", "--data", toy)
    assert code == 0 and "good: yes" in out and "modified diagonal cycle vanishes" in out
    code, out, _ = call(capsys, "check-curve", "77:ad", "--data", toy)
    assert code == 1 and "good: no" in out
    code, out, _ = call(capsys, "check-curve", "75:ab", "--data", toy)
    assert code == 2 and "good: unknown" in out and "local-type:75.2.a.a@5" in out


def test_text_and_json_agree(capsys, toy):
    for curve in ("77:c", "77:ad", "75:ab"):
        code_t, text, _ = call(capsys, "check-curve", curve, "--data", toy)
        code_j, js, _ = call(capsys, "check-curve", curve, "--data", toy, "--json")
        rep = json.loads(js)
        assert code_t == code_j
        assert f"good: {rep['good']}" in text
        assert set(rep) == {"curve", "good", "consequence", "triples", "citations"}
        for t in rep["triples"]:
            assert {"labels", "conclusion", "witness", "places"} <= set(t)


def test_check_triple(capsys, toy):
    code, out, _ = call(capsys, "check-triple", "77.2.a.a", "77.2.a.a", "77.2.a.a", "--data", toy)
    assert code == 0 and "witness: 11" in out
    code, out, _ = call(capsys, "check-triple", "77.2.a.a", "77.2.a.b", "77.2.a.c", "--data", toy)
    assert code == 1 and "FormExists" in out
    code, _, _ = call(capsys, "check-triple", "77.2.a.a", "77.2.a.b", "77.2.a.b", "--data", toy)
    assert code == 0


def test_trilinear(capsys):
    code, out, _ = call(capsys, "trilinear", "dihedral", "3", "V_1", "V_1", "V_1")
    assert (code, out.strip()) == (0, "multiplicity: 1")
    code, out, _ = call(capsys, "trilinear", "dihedral", "6", "V_1", "V_1", "V_1", "--json")
    assert json.loads(out)["multiplicity"] == 0
    code, _, err = call(capsys, "trilinear", "dihedral", "3", "V_9", "V_1", "V_1")
    assert code == 3 and err


def test_hasse(capsys):
    code, _, err = call(capsys, "hasse", "--ramified", "2")
    assert code == 4 and "data error" in err
    code, out, _ = call(capsys, "hasse", "--ramified", "2", "inf0", "--json")
    assert code == 0 and json.loads(out)["invariants"]["2"] == -1


def test_root_number(capsys):
    code, out, _ = call(capsys, "root-number", "2=1", "3=1")
    assert code == 0 and "global sign: -1" in out and "forced to vanish" in out
    code, out, _ = call(capsys, "root-number", "7=-1", "--json")
    assert json.loads(out)["global_sign"] == 1
    code, _, err = call(capsys, "root-number", "7=x")
    assert code == 3


def test_find_quadratic(capsys):
    code, out, _ = call(capsys, "find-quadratic", "7")
    assert (code, out.strip()) == (0, "Q(sqrt 2)")


def test_construct_and_verify(capsys, toy, tmp_path):
    cert = tmp_path / "c.json"
    code, out, _ = call(capsys, "construct", "77.2.a.a", "77.2.a.b", "77.2.a.b", "--prime", "7",
                        "--data", toy, "--out", str(cert))
    assert code == 0 and "verifies" in out
    code, out, _ = call(capsys, "verify", str(cert))
    assert (code, out.strip()) == (0, "valid")
    obj = json.loads(cert.read_text())
    obj["epsilons"][0] = -obj["epsilons"][0]
    cert.write_text(json.dumps(obj))
    code, out, _ = call(capsys, "verify", str(cert))
    assert code == 1 and "invalid" in out
    cert.write_text("[]")
    code, _, err = call(capsys, "verify", str(cert))
    assert code == 4


def test_usage_and_data_errors(capsys, toy, tmp_path):
    assert call(capsys)[0] == 3
    assert call(capsys, "no-such-command")[0] == 3
    assert call(capsys, "check-curve", "nope", "--data", toy)[0] == 4
    bad = tmp_path / "bad.json"
    bad.write_text('{"curves": [{"label": "x"}]}')
    code, out, err = call(capsys, "check-curve", "x", "--data", str(bad))
    assert code == 4 and not out and "missing field 'level'" in err


def test_fetch_offline(capsys, tmp_path, monkeypatch):
    code, out, err = call(capsys, "fetch-lmfdb", "35", "--offline", "--cache-dir", str(tmp_path))
    assert code == 5 and not out and "cache" in err


def test_reproduce_tables_exit_and_json(capsys):
    code_t, text, _ = call(capsys, "reproduce-tables")
    code_j, js, _ = call(capsys, "reproduce-tables", "--json")
    s = json.loads(js)
    assert code_t == code_j == (0 if s["ok"] else 1)
    assert ("result: ok" in text) == s["ok"]
    assert set(s["curves"]) == set(load_fixture().curves)


def test_deterministic_output(capsys):
    a = call(capsys, "check-curve", "475.E", "--json")[1]
    b = call(capsys, "check-curve", "475.E", "--json")[1]
    assert a == b == canonical_json(json.loads(a))


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "diagcycle", "trilinear", "dihedral", "3", "V_1", "V_1", "V_1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "multiplicity: 1"
