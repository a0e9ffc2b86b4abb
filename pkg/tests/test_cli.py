import json
import subprocess
import sys

import numpy as np
import pytest

from biharmonic_gs.cli import main, parse_scan_csv
from biharmonic_gs.profile import read_profile
from biharmonic_gs.results import ResultEnvelope, read_csv

S_RAD_5_4_0 = 26.7391924379793  # golden, default grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_time(text):
    d = json.loads(text)
    d.pop("timestamp")
    return json.dumps(d, sort_keys=True)


def test_solve_writes_envelope_and_profile(capsys, tmp_path):
    out = tmp_path / "gs.json"
    code, _, _ = run(capsys, "solve", "--n", "5", "--q", "4", "--lambda", "0", "--out", str(out))
    assert code == 0
    env = ResultEnvelope.read(out)
    assert env.payload["s_rad"] == pytest.approx(S_RAD_5_4_0, rel=1e-12)
    assert len(env.identity_reports) == 4 and env.verified
    prof = read_profile(env.payload["profile_csv"])
    assert prof.grid.points == 4097 and prof.values.max() > 0
    assert ResultEnvelope.from_dict(json.loads(out.read_text())).to_dict() == env.to_dict()


def test_solve_validation_messages(capsys):
    code, _, err = run(capsys, "solve", "--n", "4", "--q", "4", "--lambda", "0")
    assert code == 1 and "dimension must be at least 5" in err
    code, _, err = run(capsys, "solve", "--n", "5", "--q", "2", "--lambda", "0")
    assert code == 1 and "no minimizer" in err and "table --linear" in err
    code, _, err = run(capsys, "solve", "--n", "5", "--q", "4", "--lambda", "7")
    assert code == 1 and "lambda" in err


def test_solve_exit_two_on_failed_verification(capsys):
    # a very coarse grid converges for its own discrete problem but misses the identities
    code, out, _ = run(capsys, "solve", "--n", "5", "--q", "4", "--lambda", "0", "--points", "257")
    assert code == 2
    reports = json.loads(out)["identity_reports"]
    assert not all(r["pass"] for r in reports)


def test_solve_exit_one_on_solver_error(capsys):
    code, _, err = run(capsys, "solve", "--n", "5", "--q", "4", "--lambda", "0", "--half-width", "8", "--points", "513")
    assert code == 1 and "truncation boundary" in err


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 6, "q": 3.0, "lambda": -10.0, "half-width": 40}))
    code, out, _ = run(capsys, "solve", "--config", str(cfg), "--lambda", "0")
    assert code == 0
    d = json.loads(out)
    assert d["config"]["n"] == 6 and d["config"]["lambda"] == 0.0
    code, _, err = run(capsys, "solve", "--config", str(tmp_path / "missing.json"))
    assert code == 1 and "cannot read config" in err


def test_certify_verdict_and_determinism(capsys):
    argv = ("certify", "--n", "7", "--q", "4.5", "--lambda", "-500")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert json.loads(out1)["payload"]["certificate"]["verdict"] == "SymmetryBroken"
    assert strip_time(out1) == strip_time(out2)


def test_certify_verdict_is_not_an_exit_code(capsys):
    code, out, _ = run(capsys, "certify", "--n", "7", "--q", "4.5", "--lambda", "0")
    assert code == 0
    assert json.loads(out)["payload"]["certificate"]["verdict"] == "RadiallyStable"


def test_certify_missing_lambda(capsys):
    code, _, err = run(capsys, "certify", "--n", "7", "--q", "4.5")
    assert code == 1 and "--lambda" in err


def test_scan_json_and_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "scan", "--n", "7", "--q", "4.5", "--lambda-range", "-1000:-1", "--steps", "40")
    assert code == 0
    payload = json.loads(out)["payload"]
    assert len(payload["rows"]) == 40 and len(payload["brackets"]) >= 1
    path = tmp_path / "scan.csv"
    code, _, _ = run(
        capsys, "scan", "--n", "7", "--q", "4.5", "--lambda-range", "-1000:-1", "--steps", "40",
        "--format", "csv", "--out", str(path),
    )
    assert code == 0
    rows, brackets = parse_scan_csv(path.read_text())
    assert list(rows[0]) == ["lambda", "D", "s_rad", "verdict"]
    assert [r["D"] for r in rows] == [r["D"] for r in payload["rows"]]
    assert [[b["bracket_lo"], b["bracket_hi"]] for b in brackets] == payload["brackets"]


def test_scan_single_step_and_reversed(capsys):
    code, out, _ = run(capsys, "scan", "--n", "7", "--q", "4.5", "--lambda-range", "-10:-1", "--steps", "1", "--format", "csv")
    rows, brackets = parse_scan_csv(out)
    assert code == 0 and len(rows) == 1 and brackets == []
    code, _, err = run(capsys, "scan", "--n", "7", "--q", "4.5", "--lambda-range", "-1:-1000", "--steps", "4")
    assert code == 1 and "reversed" in err


def test_table_windows(capsys):
    code, out, _ = run(capsys, "table", "--windows", "--n-range", "5:12")
    rows = read_csv(out)
    assert code == 0
    assert [r["window_nonempty"] for r in rows] == [False, False] + [True] * 6
    assert rows[0]["window_lo"] is None and 4.30 < rows[2]["window_lo"] < 4.32


def test_table_linear(capsys):
    code, out, _ = run(capsys, "table", "--linear", "--n-range", "5:5", "--lambda-range", "-10:0", "--steps", "11")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 11
    assert np.allclose(np.diff([r["S2"] for r in rows]), -0.25, atol=1e-14)


def test_table_constants_only(capsys):
    code, out, _ = run(capsys, "table")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 8
    assert list(rows[0]) == ["n", "mu", "nu", "lambda_max", "omega_n", "q_crit", "q_n", "window_nonempty"]


def test_bubble_commands(capsys):
    code, out, _ = run(capsys, "bubble", "--n", "6", "--lambda", "-1", "--offsets", "0,2,4,8,16,32")
    rows = read_csv(out)
    assert code == 0 and [r["offset"] for r in rows] == [0, 2, 4, 8, 16, 32]
    assert np.all(np.diff([r["R"] for r in rows]) < 0) and all(r["gap"] > 0 for r in rows)
    code, out, _ = run(capsys, "bubble", "--n", "6", "--lambda", "1", "--offsets", "0")
    (row,) = read_csv(out)
    assert row["R"] < row["S_star"]
    code, out, _ = run(capsys, "bubble", "--n", "6", "--lambda", "0", "--offsets", "0,8")
    assert all(abs(r["gap"]) <= 1e-10 for r in read_csv(out))
    code, out, _ = run(capsys, "bubble", "--n", "6", "--lambda", "-1", "--offsets", "0", "--format", "json")
    env = json.loads(out)
    assert code == 0 and env["identity_reports"][0]["pass"]
    code, _, _ = run(capsys, "bubble", "--n", "6", "--lambda", "-1", "--offsets", "a,b")
    assert code == 1


def test_csv_round_trip_is_lossless(capsys):
    code, out, _ = run(capsys, "bubble", "--n", "5", "--lambda", "-1", "--offsets", "3", "--format", "json")
    payload = json.loads(out)["payload"]["rows"][0]
    _, out_csv, _ = run(capsys, "bubble", "--n", "5", "--lambda", "-1", "--offsets", "3")
    assert read_csv(out_csv)[0] == payload


def test_selfcheck(capsys, tmp_path):
    code, _, err = run(capsys, "selfcheck", "--out", str(tmp_path / "s.json"))
    assert code == 0 and "FAIL" not in err
    assert all(c["pass"] for c in ResultEnvelope.read(tmp_path / "s.json").payload["checks"])


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "solve", "--n", "five")[0] == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "biharmonic_gs", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
