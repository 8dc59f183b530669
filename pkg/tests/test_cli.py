import json
import subprocess
import sys

import mpmath
import pytest

from frobenius_g2.cli import main
from frobenius_g2.mp_series import from_decimal_pair


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_eval_a2_golden(tmp_path, capsys):
    path = write(tmp_path, "a2.json", {"n": 2, "t": [0, -3], "ux": [1, 2], "uxx": [3, -1]})
    code, out = run_json(capsys, ["eval", "--input", path])
    assert code == 0
    u = [from_decimal_pair(x) for x in out["u"]]
    assert abs(u[0] - 2) < 1e-70 and abs(u[1] + 2) < 1e-70
    total = out["G2_total"]
    assert abs(from_decimal_pair(total["value"])) <= 1e-30 * mpmath.mpf(total["termscale"])
    for key in ("z", "hsq", "C", "H", "Gi", "Gij", "Pij", "Qi"):
        assert key in out


def test_eval_a1(tmp_path, capsys):
    path = write(tmp_path, "a1.json", {"n": 1, "t": [5]})
    code, out = run_json(capsys, ["eval", "--input", path])
    assert code == 0
    assert abs(from_decimal_pair(out["u"][0]) - 5) < 1e-70
    assert from_decimal_pair(out["G2_total"]["value"]) == 0


def test_eval_caustic(tmp_path, capsys):
    path = write(tmp_path, "c.json", {"n": 2, "t": [0, 0]})
    assert main(["eval", "--input", path]) == 1
    assert "caustic" in capsys.readouterr().err


def test_eval_zero_jet(tmp_path):
    path = write(tmp_path, "z.json", {"n": 2, "t": [0, -3], "ux": [1, 0], "uxx": [0, 0]})
    assert main(["eval", "--input", path]) == 1


def test_eval_sampled_point_and_output(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert main(["eval", "--n", "3", "--seed", "4", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["n"] == 3


def test_usage_errors(tmp_path, capsys):
    assert main(["verify", "--precision-bits", "32"]) == 2
    assert main(["eval"]) == 2
    assert main(["eval", "--input", str(tmp_path / "missing.json")]) == 2
    bad = write(tmp_path, "bad.json", {"n": 2, "t": [1]})
    assert main(["eval", "--input", bad]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["verify", "--only", "no.such.check"]) == 2


def test_residues_golden(tmp_path, capsys):
    path = write(tmp_path, "a2.json", {"n": 2, "t": [0, -3]})
    code, out = run_json(capsys, ["residues", "--input", path])
    assert code == 0 and out["passed"]
    row = next(r for r in out["rows"] if r["formula"] == "R1" and r["args"] == [1, 2])
    assert abs(from_decimal_pair(row["closed"]) + 0.25) < 1e-70
    assert abs(from_decimal_pair(row["oracle"]) + 0.25) < 1e-70


def test_residues_n1(tmp_path, capsys):
    path = write(tmp_path, "a1.json", {"n": 1, "t": [5]})
    code, out = run_json(capsys, ["residues", "--input", path])
    assert code == 0
    assert all(abs(from_decimal_pair(r["closed"])) == 0 for r in out["rows"])


def test_residues_n8_seed7(capsys):
    code, out = run_json(capsys, ["residues", "--n", "8", "--seed", "7"])
    assert code == 0
    assert mpmath.mpf(out["max_rel_diff"]) <= 1e-40


def test_verify_n1(capsys):
    code, out = run_json(capsys, ["verify", "--n", "1", "--trials", "2"])
    assert code == 0
    assert out["summary"]["failed"] == 0
    assert all(e["n"] == 1 for e in out["entries"])


def test_verify_small_text(capsys):
    assert main(["verify", "--n", "2", "3", "--trials", "1", "--only", "g2.", "lemma31."]) == 0
    text = capsys.readouterr().out
    assert "g2.total.vanish" in text and "gating failures" in text


def test_verify_tol_override_can_fail(capsys):
    # an absurd threshold turns rounding noise into a reported failure
    assert main(["verify", "--n", "3", "--trials", "1", "--only", "appB.R1.p2", "--tol", "1e-300"]) == 1


def test_module_entry_point(tmp_path):
    path = write(tmp_path, "a1.json", {"n": 1, "t": [5]})
    proc = subprocess.run([sys.executable, "-m", "frobenius_g2", "eval", "--input", path, "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    json.loads(proc.stdout)


def test_no_arguments_means_default_verify(monkeypatch):
    from frobenius_g2 import cli

    seen = {}

    def fake(args):
        seen.update(vars(args))
        return 0

    monkeypatch.setitem(cli.COMMANDS, "verify", fake)
    assert cli.main([]) == 0
    assert seen["command"] == "verify" and seen["seed"] == 42
    assert seen["precision_bits"] == 256 and seen["n"] is None and seen["trials"] is None
