from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from psiham import HamSeries, PsiSpec, series_eval
from psiham.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ml_prints_value_and_terms(capsys):
    code, out, _ = run(["ml", "--alpha", "1", "--z", "-2", "--tol", "1e-12"], capsys)
    value, terms = out.splitlines()
    assert code == 0 and value == "0.135335283237" and int(terms) > 0


def test_ml_domain_cap_exits_2(capsys):
    assert run(["ml", "--alpha", "0.5", "--z", "-100"], capsys)[0] == 2


def test_bad_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve", "--app", "pipe"])
    assert info.value.code == 2
    assert run(["solve", "--app", "tube", "--alpha", "0.5", "--P", "1"], capsys)[0] == 2
    assert run(["eval", "--app", "tube", "--alphas", "0.5", "--r", "1:0:3", "--t", "0:1:2"], capsys)[0] == 2


def test_resummation_outside_region_exits_3(capsys):
    code, _, err = run(["solve", "--app", "planar", "--alpha", "0.5", "--hbar", "0.5", "--resum"], capsys)
    assert code == 3 and "hbar" in err


def test_solve_adm_reduction(capsys):
    code, out, _ = run(["solve", "--app", "tube-pressure", "--alpha", "0.5", "--psi", "log", "--a", "1",
                        "--nu", "1", "--P", "1", "--hbar", "-1", "--orders", "3"], capsys)
    doc = json.loads(out)
    nonzero = [m for m, rows in enumerate(doc["series"]["fields"]["u"]) if rows]
    assert code == 0 and nonzero == [0, 1]


def test_solve_is_deterministic_and_round_trips(tmp_path, capsys):
    args = ["solve", "--app", "tube", "--alpha", "0.7", "--psi", "log", "--a", "1", "--hbar", "-0.7", "--orders", "4"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run(args + ["-o", str(first)], capsys)[0] == 0
    assert run(args + ["-o", str(second)], capsys)[0] == 0
    assert first.read_bytes() == second.read_bytes()
    from psiham import HamConfig, ham_series, make_problem

    live = ham_series(make_problem("tube", alpha=0.7, psi="log", a=1.0, nu=1.0), HamConfig(-0.7, orders=4))
    loaded = HamSeries.from_json(json.loads(first.read_text())["series"])
    log = PsiSpec.logarithm()
    for r, t in ((0.3, 1.5), (1.2, 2.7)):
        assert series_eval(loaded, log, 1.0, (r,), t) == series_eval(live, log, 1.0, (r,), t)


def test_eval_figure_two_shape(capsys):
    code, out, _ = run(["eval", "--app", "tube-pressure", "--psi", "log", "--a", "1", "--P", "1", "--nu", "1",
                        "--r", "0.1", "--t", "1:5:100", "--alphas", "1,0.8,0.5"], capsys)
    rows = list(csv.reader(out.splitlines()))
    assert code == 0 and rows[0] == ["t", "u(alpha=1)", "u(alpha=0.8)", "u(alpha=0.5)"]
    assert len(rows) == 101 and all(len(r) == 4 for r in rows)
    assert rows[1] == ["1", "0.99", "0.99", "0.99"]


def test_eval_planar_columns(capsys):
    code, out, _ = run(["eval", "--app", "planar", "--psi", "log", "--a", "1", "--rho0", "1", "--y", "0.2",
                        "--t", "2", "--x", "0:6.283:100", "--alphas", "1,0.7,0.4"], capsys)
    rows = list(csv.reader(out.splitlines()))
    assert rows[0][:3] == ["x", "u(alpha=1)", "v(alpha=1)"] and len(rows[0]) == 7 and len(rows) == 101
    for row in rows[1:]:
        assert float(row[1]) == -float(row[2])


def test_eval_singular_points_are_empty_cells(capsys):
    code, out, err = run(["eval", "--app", "tube", "--psi", "log", "--a", "1", "--r", "0:0.2:3", "--t", "1.5",
                          "--alphas", "0.5", "--terms", "4"], capsys)
    rows = list(csv.reader(out.splitlines()))
    assert code == 0 and rows[1] == ["0", ""] and "singular" in err


def test_eval_from_stored_series(tmp_path, capsys):
    path = tmp_path / "s.json"
    run(["solve", "--app", "tube", "--alpha", "0.5", "--psi", "log", "--resum", "--hbar", "-0.5",
         "--terms", "4", "-o", str(path)], capsys)
    _, from_series, _ = run(["eval", "--series", str(path), "--r", "0.5", "--t", "1:2:5"], capsys)
    _, exact, _ = run(["eval", "--app", "tube", "--psi", "log", "--alphas", "0.5", "--terms", "4",
                       "--r", "0.5", "--t", "1:2:5"], capsys)
    assert from_series == exact


def test_problem_json_input(tmp_path, capsys):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"app": "tube-pressure", "alpha": 0.5, "psi": "log", "a": 1.0, "nu": 1.0, "P": 1.0}))
    code, out, _ = run(["eval", "--problem", str(path), "--r", "0.1", "--t", "2"], capsys)
    assert code == 0 and out.splitlines()[0] == "r,t,u(alpha=0.5)"


def test_verify_exit_codes(tmp_path, capsys):
    base = ["verify", "--app", "tube-pressure", "--alpha", "0.5", "--psi", "log", "--a", "1", "--P", "1",
            "--r", "0.1:1:5", "--t", "1.05:2:5"]
    code, out, _ = run(base, capsys)
    assert code == 0 and json.loads(out)["within_budget"]
    assert run(base + ["--budget", "1e-12"], capsys)[0] == 1
    assert run(base[:-2] + ["--t", "1:2:5"], capsys)[0] == 2


def test_verify_honours_tolerance_env(tmp_path, capsys, monkeypatch):
    tol = tmp_path / "tol.json"
    from psiham.verify import load_tolerances

    doc = load_tolerances()
    doc["residual"]["tube-pressure"]["sup"] = 1e-12
    tol.write_text(json.dumps(doc))
    monkeypatch.setenv("PSI_HAM_TOLERANCES", str(tol))
    assert run(["verify", "--app", "tube-pressure", "--alpha", "0.5", "--psi", "log", "--P", "1",
                "--r", "0.1:1:3", "--t", "1.05:2:3"], capsys)[0] == 1


def test_figures_export(tmp_path, capsys):
    assert run(["figures", "--outdir", str(tmp_path), "--only", "fig2", "fig6"], capsys)[0] == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["fig2.csv", "fig6.csv"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "psiham", "ml", "--alpha", "0.5", "--z", "-1"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[0] == "0.427583576156"
