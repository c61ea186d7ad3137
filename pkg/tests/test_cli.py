from __future__ import annotations

import json
from fractions import Fraction

import pytest

from herm2 import cli
from herm2.cli import LatticeFile, main
from herm2.oracle import CountProfile

H0 = {"case": 1, "residue_degree": 1, "param": 1, "precision": 16, "gram": [[0, 1], [1, 0]]}


@pytest.fixture
def write(tmp_path):
    def _write(obj, name="lattice.json"):
        p = tmp_path / name
        p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(p)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_density_h0(write, capsys):
    code, out, _ = run(capsys, "density", write(H0))
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert doc["report"]["beta_L"]["numerator"] == "3"
    assert out == json.dumps(doc, sort_keys=True, indent=2) + "\n"


def test_density_verify_matches(write, capsys):
    code, out, _ = run(capsys, "density", write(H0), "--verify", "--max-depth", "4")
    assert code == 0
    v = json.loads(out)["verification"]
    assert v["match"] is True and v["oracle"] == "3" and v["calibration_constant"] == "1"


def test_density_verify_mismatch_exit_3(write, capsys, monkeypatch):
    def fake(L, d_max, min_depth=None, budget=None):
        return CountProfile(L.n, L.ring.f, depths=[1, 2], normalized=[Fraction(5), Fraction(5)],
                            stabilized_at=2, stabilized_value=Fraction(5))
    monkeypatch.setattr(cli, "normalized_density", fake)
    code, out, err = run(capsys, "density", write(H0), "--verify")
    assert code == 3
    assert "mismatch" in err
    assert json.loads(out)["verification"]["match"] is False


def test_non_hermitian_names_entry(write, capsys):
    bad = dict(H0, gram=[[0, {"a0": 1, "a1": 1}], [1, 0]])
    code, _, err = run(capsys, "density", write(bad))
    assert code == 1
    assert "(0,1)" in err


@pytest.mark.parametrize("text", ["not json", "[]", json.dumps({"case": 1}),
                                  json.dumps(dict(H0, jordan_blocks=[])),
                                  json.dumps(dict(H0, case=3)),
                                  json.dumps(dict(H0, param=2))])
def test_parse_errors_exit_1(write, capsys, text):
    code, _, err = run(capsys, "jordan", write(text))
    assert code == 1 and err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "jordan", str(tmp_path / "nope.json"))
    assert code == 1


def test_jordan_diag_one_two(write, capsys):
    f = dict(H0, gram=[[1, 0], [0, 2]])
    code, out, _ = run(capsys, "jordan", write(f))
    assert code == 0
    doc = json.loads(out)
    assert [b["i"] for b in doc["blocks"]] == [0, 2]
    assert len(doc["witness"]) == 2


def test_jordan_blocks_shortcut(write, capsys):
    f = {"case": 2, "residue_degree": 1, "param": 1, "precision": 16,
         "jordan_blocks": [{"i": 1, "gram": [[0, {"a1": 1}], [{"a1": -1}, 0]]}, {"i": 2, "gram": [[2]]}]}
    code, out, _ = run(capsys, "density", write(f))
    assert code == 0
    assert json.loads(out)["report"]["beta_L"]["numerator"] == "96"


def test_jordan_blocks_wrong_scale(write, capsys):
    f = {"case": 2, "residue_degree": 1, "param": 1, "precision": 16, "jordan_blocks": [{"i": 1, "gram": [[2]]}]}
    code, _, err = run(capsys, "jordan", write(f))
    assert code == 1 and "declared" in err


def test_oracle_max_depth_zero_is_usage_error(write, capsys):
    code, _, err = run(capsys, "oracle", write(H0), "--max-depth", "0")
    assert code == 1 and "max-depth" in err


def test_oracle_profile_and_emit(write, capsys, tmp_path):
    target = tmp_path / "profile.json"
    code, out, _ = run(capsys, "oracle", write(H0), "--max-depth", "4", "--emit-profile", str(target))
    assert code == 0
    prof = json.loads(out)["profile"]
    assert prof["stabilized_value"] == "3"
    assert json.loads(target.read_text())["profile"] == prof


def test_oracle_budget_is_math_error(write, capsys):
    code, _, err = run(capsys, "oracle", write(H0), "--budget", "5")
    assert code == 2 and "stage oracle" in err


def test_budget_env_override(write, capsys, monkeypatch):
    monkeypatch.setenv("HERM2_BUDGET", "5")
    code, _, _ = run(capsys, "oracle", write(H0))
    assert code == 2


def test_degenerate_gram_is_input_error(write, capsys):
    code, _, err = run(capsys, "density", write(dict(H0, gram=[[1, 1], [1, 1]])))
    assert code == 1 and "determinant" in err


def test_precision_override_and_text(write, capsys, tmp_path):
    out_file = tmp_path / "report.txt"
    code, out, _ = run(capsys, "density", write(H0), "--precision-override", "24", "--text", "--out", str(out_file))
    assert code == 0 and out == ""
    text = out_file.read_text()
    assert "schema: 1" in text and "numerator: \"3\"" in text


def test_round_trip_of_lattice_file(write):
    lf = LatticeFile.from_json(H0)
    assert LatticeFile.from_json(json.loads(json.dumps(lf.to_json()))) == lf
    L = lf.lattice()
    again = LatticeFile.from_json(dict(H0, gram=[[x.to_json() for x in row] for row in L.gram])).lattice()
    assert again.gram == L.gram


def test_big_integers_are_decimal_strings():
    doc = json.loads(cli.dump_json({"x": 2 ** 80, "y": Fraction(3, 2 ** 70), "z": 7}))
    assert doc == {"x": str(2 ** 80), "y": f"3/{2 ** 70}", "z": 7}


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    assert out.count("PASS") == 6


def test_selftest_reports_failing_property(capsys, monkeypatch):
    from herm2 import checks

    monkeypatch.setattr(checks, "selftest_checks",
                        lambda: [("n_identity", lambda: checks.CheckResult("n_identity", False, "forced"))])
    code, out, _ = run(capsys, "selftest")
    assert code == 3 and "n_identity" in out


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "herm2", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "density" in res.stdout
