import csv
import json

import pytest

from quasiground import acceptance, cli, shooting
from quasiground.dual_transform import ConvergenceError
from quasiground.report import Check, Report
from quasiground.shooting import free_boundary_alpha_1d


def test_free_boundary_prints_alpha(capsys, tmp_path):
    code = cli.run(["free-boundary", "--N", "1", "--p", "9", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == cli.EXIT_OK
    # closed form (9/2)^{2/7}/sqrt(2) = 1.0867187215...
    assert "alpha = 1.08671872" in out
    assert "R = 2.07849" in out
    rec = json.loads((tmp_path / "free_boundary.json").read_text())
    assert rec["alpha"] == pytest.approx(free_boundary_alpha_1d(9.0), rel=1e-8)
    assert (tmp_path / "free_boundary.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["branch", "--N", "1", "--p", "7"],
        ["branch", "--N", "1", "--p", "9", "--bogus", "3"],
        ["branch", "--N", "1"],
        ["frobnicate"],
        ["semilinear", "--N", "3", "--p", "6"],
        ["minimize", "--N", "1", "--p", "9"],
        ["branch", "--N", "1", "--p", "9", "--lambda-min", "10", "--lambda-max", "1"],
    ],
)
def test_invalid_input_exit_1(argv, capsys):
    assert cli.run(argv) == cli.EXIT_INPUT


def test_help_exit_0(capsys):
    assert cli.run(["--help"]) == cli.EXIT_OK
    assert "branch" in capsys.readouterr().out


@pytest.mark.slow
def test_branch_smoke(tmp_path, capsys):
    argv = ["branch", "--N", "1", "--p", "9", "--lambda-min", "0.01", "--lambda-max", "1000",
            "--points", "25", "--out", str(tmp_path)]
    assert cli.run(argv) == cli.EXIT_OK
    with (tmp_path / "branch.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["lambda", "a", "M"] and len(rows) == 26
    rep = json.loads((tmp_path / "branch_report.json").read_text())
    assert rep["passed"]
    out = capsys.readouterr().out
    assert "[PASS] M strictly decreasing in a" in out


def test_byte_identical_csvs_across_job_counts(tmp_path):
    base = ["branch", "--N", "2", "--p", "8", "--lambda-min", "0.1", "--lambda-max", "100", "--points", "8"]
    # three decades are too short for the lambda*a trend check; only the tables matter here
    one = cli.run(base + ["--out", str(tmp_path / "a")])
    two = cli.run(base + ["--out", str(tmp_path / "b"), "--jobs", "2"])
    assert one == two and one in (cli.EXIT_OK, cli.EXIT_CHECK)
    assert (tmp_path / "a" / "branch.csv").read_bytes() == (tmp_path / "b" / "branch.csv").read_bytes()


def test_config_merged_under_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# semilinear run\nN = 1\np = 7.5\n")
    # p = 7.5 from the file is rejected ...
    assert cli.run(["semilinear", "--config", str(cfg)]) == cli.EXIT_INPUT
    # ... and the explicit flag wins over it
    assert cli.run(["semilinear", "--config", str(cfg), "--p", "9"]) == cli.EXIT_OK
    assert "W(0) = 1.2396" in capsys.readouterr().out


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("N = 1\nflux = 3\n")
    assert cli.run(["semilinear", "--config", str(cfg), "--p", "9"]) == cli.EXIT_INPUT
    cfg.write_text("N 1\n")
    assert cli.run(["semilinear", "--config", str(cfg), "--p", "9"]) == cli.EXIT_INPUT


def test_read_config(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("lambda-min = 0.5  # comment\n\ngrid_growth=1.01\n")
    assert cli.read_config(cfg) == {"lambda_min": "0.5", "grid_growth": "1.01"}


def test_semilinear_and_minimize_outputs(tmp_path):
    assert cli.run(["semilinear", "--N", "1", "--p", "9", "--out", str(tmp_path)]) == cli.EXIT_OK
    assert json.loads((tmp_path / "semilinear.json").read_text())["outcome"] == "decay"
    argv = ["minimize", "--N", "1", "--p", "9", "--a", "3.0", "--max-evals", "200", "--out", str(tmp_path)]
    assert cli.run(argv) == cli.EXIT_OK
    init = tmp_path / "minimize.csv"
    argv = ["minimize", "--N", "1", "--p", "9", "--a", "3.0", "--max-evals", "200", "--init", str(init)]
    assert cli.run(argv) == cli.EXIT_OK


def test_verify_passing_criterion(capsys):
    assert cli.run(["verify", "--criteria", "9"]) == cli.EXIT_OK
    assert "criterion 9: PASS" in capsys.readouterr().out


def test_verify_failure_maps_to_exit_3(monkeypatch, capsys):
    def failing():
        rep = Report("always fails")
        rep.add(Check("impossible", 1.0, 0.0, 0.0, False))
        return rep

    monkeypatch.setitem(acceptance.CRITERIA, 9, failing)
    assert cli.run(["verify", "--criteria", "9"]) == cli.EXIT_CHECK
    assert "FAIL" in capsys.readouterr().out


def test_numerical_failure_exit_2(monkeypatch):
    def boom(*args, **kwargs):
        raise ConvergenceError("no bracket")

    monkeypatch.setattr(shooting, "shoot_semilinear", boom)
    assert cli.run(["semilinear", "--N", "1", "--p", "9"]) == cli.EXIT_NUMERIC
