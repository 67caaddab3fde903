import json
import subprocess
import sys

import pytest

from fibdesign.cli import run


def run_json(capsys, *argv):
    code = run([*argv, "--json"])
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


def test_fib(capsys):
    rep = run_json(capsys, "fib", "35", "--mod", "8")
    assert rep["results"]["fib"] == 9227465
    assert rep["results"]["fib_mod"] == 1
    assert rep["results"]["pisano_period"] == 12
    assert rep["schema"] == 1 and len(rep["run_hash"]) == 64


def test_params(capsys):
    rep = run_json(capsys, "params", "5")
    assert rep["results"]["symmetric"] == {"v": 25, "k": 9, "lambda": 3, "n": 6}
    assert rep["results"]["residual"] == {"v": 16, "b": 24, "r": 9, "k": 6, "lambda": 3}
    assert rep["results"]["brc"]["witness"] == [1, 1, 3]


def test_params_text(capsys):
    assert run(["params", "7"]) == 0
    out = capsys.readouterr().out
    assert "(169, 64, 24)" in out and "(105, 168, 64, 40, 24)" in out


def test_brc(capsys):
    assert run_json(capsys, "brc", "43", "7", "1")["results"]["status"] == "FailOdd"
    assert run(["brc", "10", "4", "1"]) == 1


def test_gate(capsys):
    rep = run_json(capsys, "gate", "13")
    assert rep["results"]["status"] == "RuledOut"
    assert rep["results"]["certificate"]["gate"] == "squarefree_shortcut"
    assert rep["results"]["certificate_verified"] is True


def test_gate_with_table(tmp_path, capsys):
    from fibdesign.fib_core import fib

    table = tmp_path / "f.txt"
    table.write_text(f"877: 1753 * C{fib(877) // 1753}\n")
    rep = run_json(capsys, "gate", "877", "--table", str(table))
    w = rep["results"]["certificate"]["witnesses"]
    assert (w["p"], w["q"], w["q_exponent"], w["order"]) == (1753, 5, 3, 584)


def test_gate_bad_table_is_parse_error(tmp_path, capsys):
    table = tmp_path / "f.txt"
    table.write_text("10: 5 * 13\n")
    assert run(["gate", "13", "--table", str(table)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_scan(capsys):
    rep = run_json(capsys, "scan", "--max", "41")
    rows = rep["results"]["verdicts"]
    assert [r["m"] for r in rows] == list(range(3, 42, 2))
    assert rep["results"]["summary"]["inconclusive"] == []


def test_brouwer(capsys):
    rep = run_json(capsys, "brouwer", "8", "3")
    assert rep["results"]["family_brc"]["status"] == "PassOdd"
    assert run_json(capsys, "brouwer", "2", "3")["results"]["brc"]["status"] == "FailOdd"


def test_hadamard_and_design_verify(tmp_path, capsys):
    out = tmp_path / "nested" / "h"
    rep = run_json(capsys, "hadamard", "--h", "4", "--auto", "order4", "--out", str(out))
    assert rep["results"]["design"] == {"v": 31, "k": 15, "lambda": 7, "validated": True}
    assert rep["results"]["bound"]["f"] == 7 and rep["results"]["bound"]["equality"]
    assert rep["results"]["equality_case"]["passed"]
    rep = run_json(capsys, "design", "verify", str(out) + ".design", "--auto", str(out) + ".auto")
    assert rep["results"]["automorphism_valid"] and rep["results"]["order"] == 4


def test_hadamard_embedded(capsys):
    rep = run_json(capsys, "hadamard", "--d", "4", "--h", "1", "--auto", "order3")
    assert rep["results"]["design"]["v"] == 15 and rep["results"]["order"] == 3


def test_design_verify_errors(tmp_path, capsys):
    bad = tmp_path / "bad.design"
    bad.write_text("7 3 1\n0 1 2\n")
    assert run(["design", "verify", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert run(["design", "verify", str(tmp_path / "missing")]) == 1


def test_variety_lines(capsys):
    rep = run_json(capsys, "variety", "lines", "16", "24", "9", "6", "3")
    rows = rep["results"]["lines"]
    assert rep["results"]["count_with_multiplicity"] == 4
    assert [r["subtag"] for r in rows if r["metis_relation_holds"]] == ["F1"]


def test_variety_fractions(capsys):
    rep = run_json(capsys, "variety", "lines", "7", "7", "3", "3", "1")
    assert rep["results"]["count_with_multiplicity"] == 4
    assert run(["variety", "lines", "7", "7", "3", "3", "2"]) == 1


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        run(["nope"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["variety", "lines", "1", "2", "3", "4", "x"])
    assert exc.value.code == 2


def test_domain_error_exit(capsys):
    assert run(["params", "4"]) == 1
    assert "error" in capsys.readouterr().err


def test_json_reruns_byte_identical():
    cmd = [sys.executable, "-m", "fibdesign", "scan", "--max", "61", "--json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
