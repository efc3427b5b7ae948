import json

import pytest

from nilops.cli import main
from nilops.constructions import exterior_algebra, rp_truncation
from nilops.parser import dumps_module


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    rp = tmp_path / "rp.json"
    rp.write_text(dumps_module(rp_truncation(6)))
    lam = tmp_path / "lam.json"
    lam.write_text(dumps_module(exterior_algebra(3)))
    return rp, lam


def test_normalize(capsys):
    assert run(capsys, "normalize", "Sq4 Sq4") == (0, "Sq7 Sq1 + Sq6 Sq2\n", "")


def test_normalize_json(capsys):
    code, out, _ = run(capsys, "normalize", "Sq2 Sq2", "--format", "json")
    assert code == 0 and json.loads(out)["normal_form"] == "Sq3 Sq1"


def test_conjugate_and_multiply(capsys):
    assert run(capsys, "conjugate", "Sq3")[1] == "Sq2 Sq1\n"
    assert run(capsys, "multiply", "Sq1", "Sq2")[1] == "Sq3\n"


def test_membership(capsys):
    code, out, _ = run(capsys, "membership", "--n", "1", "--target", "Sq2 Sq2")
    assert code == 0 and out == "(Sq1, Sq1)\n"


def test_basis(capsys):
    code, out, _ = run(capsys, "basis", "--degree", "6", "--format", "json")
    assert json.loads(out)["basis"] == ["Sq6", "Sq5 Sq1", "Sq4 Sq2"]
    code, out, _ = run(capsys, "basis", "--degree", "3", "--subalgebra", "1")
    assert out.splitlines()[1:] == ["Sq3", "Sq2 Sq1"]


def test_act(capsys, files):
    rp, _ = files
    assert run(capsys, "act", "--module", str(rp), "--op", "Sq2", "--element", "3:0")[1] == "u^5\n"


def test_filtration_table(capsys, files):
    rp, _ = files
    code, out, _ = run(capsys, "filtration", "--module", str(rp), "--smax", "3", "--dmax", "6", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["c_max"] == 16
    for row in doc["rows"]:
        assert row["M_s"] == (1 if row["degree"] >= max(row["s"], 1) else 0)
    code, out, _ = run(capsys, "filtration", "--module", str(rp), "--smax", "1", "--dmax", "6", "--cmax", "5")
    assert out.startswith("# filtration") and "c_max=5" in out.splitlines()[0]


def test_tor(capsys, files):
    _, lam = files
    code, out, _ = run(capsys, "tor", "--algebra", str(lam), "--smax", "2", "--tmax", "6", "--format", "json")
    assert code == 0 and set(json.loads(out)["entries"]) == {"(0,0)", "(-1,3)", "(-2,6)"}


def test_usage_errors(capsys, files):
    rp, _ = files
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys)[0] == 1
    assert run(capsys, "normalize", "Sq1", "--bogus")[0] == 1
    assert run(capsys, "tor", "--algebra", str(rp), "--smax", "1", "--tmax", "2")[0] == 1
    assert run(capsys, "act", "--module", "/nonexistent.json", "--op", "Sq1", "--element", "1:0")[0] == 1
    assert run(capsys, "laws", "--only", "nope")[0] == 1


def test_computation_errors(capsys, tmp_path):
    code, _, err = run(capsys, "normalize", "Sq0")
    assert code == 2 and "byte 2" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"top_degree": 1, "dims": [0, 1], "ops": {"Sq1": [[[]]]}, "x": 1}')
    assert run(capsys, "filtration", "--module", str(bad), "--smax", "1", "--dmax", "1")[0] == 2


def test_laws_exit_codes(capsys):
    code, out, _ = run(capsys, "laws", "--only", "adem_display_5", "--only", "lemma_5_7")
    assert code == 0
    assert "refuted (expected)" in out


def test_laws_json_deterministic(capsys):
    a = run(capsys, "laws", "--only", "prop_2_4", "--seed", "3", "--format", "json")[1]
    b = run(capsys, "laws", "--only", "prop_2_4", "--seed", "3", "--format", "json")[1]
    assert a == b and json.loads(a)["seed"] == 3
