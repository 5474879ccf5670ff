import json
import math

import pytest

from sl2lyap.cli import main


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_finite_route_row(capsys):
    code, out, _ = run_cli(
        capsys,
        ["gle", "--family", "k-nplus", "--dist", "exp:1", "--rho", "1", "--ell", "1",
         "--method", "finite"],
    )
    assert code == 0
    header, row = out.strip().split("\n")
    cols = header.split(",")
    vals = dict(zip(cols, row.split(",")))
    assert vals["family"] == "k-nplus" and vals["method"] == "finite"
    assert abs(float(vals["Lambda"]) - 0.9624236501192073) < 1e-12


def test_closed_form_gamma_row(capsys):
    code, out, _ = run_cli(
        capsys,
        ["gamma", "--family", "nminus-nplus", "--dist", "exp:1", "--rho", "1",
         "--method", "closed-form"],
    )
    assert code == 0
    row = out.strip().split("\n")[1].split(",")
    header = out.strip().split("\n")[0].split(",")
    gamma = float(row[header.index("gamma")])
    assert abs(gamma - 0.8143077587637904) < 1e-12


def test_no_invariant_measure_exit_code(capsys):
    code, out, err = run_cli(
        capsys,
        ["gle", "--family", "nminus-a1", "--dist", "exp:1", "--rho", "2", "--ell", "1"],
    )
    assert code == 4
    assert "no invariant measure" in err
    row = out.strip().split("\n")[1]
    assert f"{math.log(2):.17g}" in row
    assert "no_invariant_measure" in row


def test_validation_exit_code(capsys):
    code, _, err = run_cli(
        capsys,
        ["gle", "--family", "k-nplus", "--dist", "exp:1", "--rho", "1", "--ell", "0.5",
         "--method", "finite"],
    )
    assert code == 2
    assert "invalid" in err


def test_bad_dist_exit_code(capsys):
    code, _, _ = run_cli(
        capsys, ["gamma", "--family", "k-nplus", "--dist", "exp:zzz", "--rho", "1"]
    )
    assert code == 2


def test_csv_deterministic(capsys):
    argv = ["mc", "--family", "k-nplus", "--dist", "exp:1", "--rho", "1", "--steps",
            "10000", "--replicas", "16", "--seed", "5", "--ell", "0"]
    _, out1, _ = run_cli(capsys, argv)
    _, out2, _ = run_cli(capsys, argv)
    assert out1 == out2
    assert out1.count("\n") == 4  # header + gamma + sigma2 + gle rows


def test_json_round_trip(capsys):
    code, out, _ = run_cli(
        capsys,
        ["gamma", "--family", "nminus-k", "--dist", "exp:0.2", "--rho", "1",
         "--format", "json"],
    )
    assert code == 0
    obj = json.loads(out.strip())
    assert set(obj) == {
        "model", "family", "p", "rho", "ell", "lambda1", "lambda2", "gamma",
        "sigma2", "Lambda", "method", "stderr", "diagnostics",
    }
    assert obj["method"] == "perturbative"
    assert abs(obj["gamma"] - 0.4048960877195516) < 1e-9


def test_sweep_single_point_matches_point_run(capsys):
    argv_sweep = ["sweep", "--family", "nminus-nplus", "--dist", "exp:1", "--rho", "1",
                  "--axis", "inv_rho", "--range", "1:1", "--points", "1"]
    code, out_sweep, _ = run_cli(capsys, argv_sweep)
    assert code == 0
    argv_pt = ["sigma2", "--family", "nminus-nplus", "--dist", "exp:1", "--rho", "1",
               "--method", "perturbative"]
    _, out_pt, _ = run_cli(capsys, argv_pt)
    header = out_sweep.strip().split("\n")[0].split(",")
    row_sweep = dict(zip(header, out_sweep.strip().split("\n")[1].split(",")))
    row_pt = dict(zip(header, out_pt.strip().split("\n")[1].split(",")))
    for col in ("gamma", "sigma2", "lambda1", "lambda2"):
        assert row_sweep[col] == row_pt[col]


def test_sweep_grid_and_threads(capsys):
    argv = ["sweep", "--family", "nminus-k", "--dist", "exp:0.2", "--rho", "1",
            "--axis", "inv_rho", "--range", "0.5:2.5", "--points", "5", "--threads", "2"]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 6
    header = lines[0].split(",")
    rhos = [float(dict(zip(header, ln.split(",")))["rho"]) for ln in lines[1:]]
    assert rhos == [1.0 / v for v in [0.5, 1.0, 1.5, 2.0, 2.5]]
