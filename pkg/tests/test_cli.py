import csv
import io
import json
import math
import subprocess
import sys

import pytest

from infeasible_di.cli import main

CASE = ["--case-study"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_critical_json(capsys):
    code, out, _ = run(capsys, "critical", "--s0", "0", "--sf", "0", "--v0", "1", "--vf", "0")
    assert code == 0
    d = json.loads(out)
    assert d["a_c"] == pytest.approx(1 + math.sqrt(2), abs=1e-15)
    assert d["case"] == "a_i" and "t_c" in d


def test_critical_missing_flag(capsys):
    code, out, err = run(capsys, "critical", "--s0", "0", "--sf", "0", "--v0", "1")
    assert code == 2 and out == ""
    assert "usage" in err


def test_critical_case_b_has_no_tc(capsys):
    code, out, _ = run(capsys, "critical", "--s0", "0", "--sf", "1", "--v0", "0", "--vf", "2")
    d = json.loads(out)
    assert code == 0 and "t_c" not in d and d["case"] == "b"


def test_solve_table_row(capsys):
    code, out, _ = run(capsys, "solve", "--a", "2", *CASE)
    assert code == 0
    assert '"ts": 0.70115996903140' in out
    assert json.loads(out)["ts"] == pytest.approx(0.701159969031407, abs=1e-15)


def test_solve_feasible_refused(capsys):
    code, out, err = run(capsys, "solve", "--a", "5", *CASE)
    assert code == 3 and out == ""
    assert "feasible" in err


def test_solve_limit(capsys):
    code, out, _ = run(capsys, "solve", "--limit", *CASE)
    assert code == 0
    assert json.loads(out) == {"ts": 2 / 3, "c1": 6.0, "c2": -4.0}


def test_solve_numeric_failure(capsys):
    code, _, err = run(capsys, "solve", "--a", "2", "--ts0", "0.2", "--c10", "7", "--method", "gen", *CASE)
    assert code == 1
    assert "NoValidRoot" in err


def test_seed_table1(capsys):
    from conftest import REF_ROOTS

    code, out, _ = run(capsys, "solve", "--seed-table1", *CASE)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5
    for row, (a, c1, c2, ts) in zip(rows, REF_ROOTS):
        assert float(row["a"]) == a
        assert abs(float(row["c1"]) - c1) <= 1e-12
        assert abs(float(row["ts"]) - ts) <= 1e-12


def test_dr_json(capsys):
    code, out, _ = run(capsys, "dr", "--a", "1", "--n", "10000", "--gamma", "0.95", "--lambda", "0.5", "--eps", "1e-6", *CASE)
    d = json.loads(out)
    assert code == 0 and d["converged"]
    assert d["ts_estimate"] == pytest.approx(0.6844, abs=5e-4)


def test_dr_zero_iterations(capsys):
    code, out, _ = run(capsys, "dr", "--a", "1", "--max-iter", "0", *CASE)
    d = json.loads(out)
    assert code == 0 and d["iterations"] == 0 and d["converged"] is False


def test_dr_bad_gamma(capsys):
    code, _, _ = run(capsys, "dr", "--a", "1", "--gamma", "1.5", *CASE)
    assert code == 2


def test_dr_grid_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "dr", "--a", "1", "--n", "200", "--grid-csv", "u.csv", "--out-dir", str(tmp_path), *CASE)
    assert code == 0
    lines = (tmp_path / "u.csv").read_text().splitlines()
    assert lines[0] == "t,u" and len(lines) == 201


def test_table2_small(capsys):
    code, out, _ = run(capsys, "dr", "--table2", "--n-list", "500,1000", "--a-list", "1,2", *CASE)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [(r["N"], r["a"]) for r in rows] == [("500", "1"), ("500", "2"), ("1000", "1"), ("1000", "2")]
    assert all(float(r["ts_error"]) < 5e-3 for r in rows)


def test_sweep_gammas(capsys):
    code, out, _ = run(capsys, "sweep", "--a", "1", "--lambda", "0.5", "--gammas", "0.1:0.9:9", *CASE)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    its = [int(r["iterations"]) for r in rows]
    assert all(x >= y for x, y in zip(its, its[1:]))


def test_sweep_empty_list(capsys):
    code, _, _ = run(capsys, "sweep", "--a", "1", "--gammas", "", *CASE)
    assert code == 2


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "--a", "1", "--n", "300", "--gammas", "0.5,0.9", "--format", "json", *CASE)
    assert code == 0 and len(json.loads(out)) == 2


def test_portrait_files(capsys, tmp_path):
    argv = ["portrait", "--a", "1.5", "--method", "gen", "--res", "30x20", "--out-dir", str(tmp_path), *CASE]
    code, out, _ = run(capsys, *argv)
    d = json.loads(out)
    assert code == 0 and d["resolution"] == [30, 20]
    pgm = (tmp_path / "portrait_a1.5_generalized.pgm").read_bytes()
    assert pgm.startswith(b"P5\n30 20\n255\n")
    first = {p: (tmp_path / p).read_bytes() for p in ("portrait_a1.5_generalized.csv", "portrait_a1.5_generalized.pgm")}
    assert run(capsys, *argv)[0] == 0
    assert {p: (tmp_path / p).read_bytes() for p in first} == first


def test_env_output_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("INFEASIBLE_DI_OUTPUT_DIR", str(tmp_path / "env"))
    code, _, _ = run(capsys, "portrait", "--a", "1", "--res", "4x4", "--prefix", "p", *CASE)
    assert code == 0
    assert (tmp_path / "env" / "p.csv").exists()


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# shared settings\ncase-study = true\na = 2\nmax_iter = 40\n")
    code, out, _ = run(capsys, "solve", "--config", str(cfg))
    assert code == 0 and json.loads(out)["a"] == 2.0
    code, out, _ = run(capsys, "solve", "--config", str(cfg), "--a", "1")
    assert code == 0 and json.loads(out)["a"] == 1.0
    cfg.write_text("nonsense\n")
    assert run(capsys, "solve", "--config", str(cfg))[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "infeasible_di", "critical", "--case-study", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "a_c,t_c,case"
