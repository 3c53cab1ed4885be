import csv
import io
import json
import math
import os

import numpy as np
import pytest

from mellin_saddle.cli import main, parse_at, parse_contour, parse_grid
from mellin_saddle.errors import SpecError
from mellin_saddle.surface import Tolerances

GAMMA = '{"kind":"gamma_shift","params":{"c":0}}'
GAMMA1 = '{"kind":"gamma_shift","params":{"c":1.0}}'


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_grid_log_spaced():
    pts = parse_grid("r=1..10,n=10,psi=0")
    assert len(pts) == 10
    assert pts[0].log_r == pytest.approx(0.0)
    assert pts[-1].log_r == pytest.approx(math.log(10.0))
    # log-spaced: equal steps in log r
    steps = np.diff([p.log_r for p in pts])
    assert np.allclose(steps, steps[0])


def test_parse_grid_psi_sweep():
    pts = parse_grid("r=2..2,n=1,psi=0..3.0:4")
    assert len(pts) == 4
    assert [p.psi for p in pts] == pytest.approx([0.0, 1.0, 2.0, 3.0])


def test_parse_grid_errors():
    with pytest.raises(SpecError):
        parse_grid("n=10")
    with pytest.raises(SpecError):
        parse_grid("r=0..10,n=5")


def test_parse_at_and_contour():
    z = parse_at("r=10,psi=0.5")
    assert z.log_r == pytest.approx(math.log(10.0))
    assert z.psi == 0.5
    tols = Tolerances()
    c = parse_contour("lalpha:2.0,vertex=3.5", tols)
    assert c.kind == "l_alpha" and c.alpha == 2.0 and c.vertex == 3.5
    v = parse_contour("vertical:1.5", tols)
    assert v.kind == "vertical" and v.c == 1.5
    with pytest.raises(SpecError):
        parse_contour("spiral:1", tols)


def test_eval_K_csv_grid(capsys):
    code, out, err = run_cli(capsys, "eval-K", "--spec", GAMMA,
                             "--grid", "r=1..10,n=10,psi=0")
    assert code == 0
    # fixed, documented column order
    assert out.splitlines()[0] == ("log_r,psi,value_re,value_im,log_scale,"
                                   "abs_error,region,rho_z,theta_z")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 10
    for row in rows:
        r = math.exp(float(row["log_r"]))
        got = float(row["value_re"]) * math.exp(float(row["log_scale"]))
        assert got == pytest.approx(math.exp(-r), rel=1e-7)


def test_saddle_json(capsys):
    code, out, err = run_cli(capsys, "saddle", "--spec", GAMMA,
                             "--at", "r=10,psi=0")
    assert code == 0
    doc = json.loads(out)
    assert doc["residual"] < 1e-10
    assert 10.0 < doc["rho_z"] < 11.0
    assert doc["region"] == "inside"


def test_verify_moments_exit_zero(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, out, err = run_cli(capsys, "verify", "moments", "--spec", GAMMA,
                             "--n-max", "3", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["passed"] is True
    assert doc["summary"]["fail"] == 0


def test_spec_error_exit_2(capsys):
    code, out, err = run_cli(capsys, "eval-K", "--spec", '{"kind":"nope"}',
                             "--at", "r=1")
    assert code == 2
    assert "spec error" in err and "nope" in err


def test_numerical_error_exit_3(capsys):
    # vertical route on a sheet where it cannot decay
    code, out, err = run_cli(capsys, "eval-K", "--spec", GAMMA,
                             "--at", "r=5,psi=3.0", "--contour", "vertical:2.0")
    assert code == 3
    assert "numerical failure" in err


def test_json_format_round_trip(capsys):
    code, out, err = run_cli(capsys, "eval-E", "--spec", GAMMA,
                             "--at", "r=1,psi=0", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["value_re"] == pytest.approx(math.e, rel=1e-10)


def test_byte_identical_runs(capsys):
    args = ("eval-K", "--spec", GAMMA, "--grid", "r=1..5,n=5,psi=0")
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


def test_spec_from_file(capsys, tmp_path):
    p = tmp_path / "w.json"
    p.write_text(GAMMA1)
    code, out, err = run_cli(capsys, "eval-E", "--spec", str(p),
                             "--at", "r=1,psi=0", "--format", "json")
    assert code == 0
    # E(1) for Gamma(s+1): sum 1/(n+1)! = e - 1
    assert json.loads(out)[0]["value_re"] == pytest.approx(math.e - 1.0,
                                                           rel=1e-10)


def test_boundary_verb(capsys):
    code, out, err = run_cli(capsys, "boundary", "--spec",
                             '{"kind":"iterated_log","params":{"a":1,"b":1,"k":1,"c":2.718281828459045}}',
                             "--at", "r=148.4131591,psi=0", "--alpha", "1.5707963267948966")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    psi = float(rows[0]["psi_boundary"])
    assert psi == pytest.approx(0.0105839, rel=1e-3)


def test_table_verb(capsys):
    code, out, err = run_cli(capsys, "table", "--spec", GAMMA, "--which", "K",
                             "--grid", "r=20..40,n=3,psi=0")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3
    for row in rows:
        assert float(row["ratio_abs_dev"]) < 0.01


def test_asym_verbs(capsys):
    code, out, err = run_cli(capsys, "asym-K", "--spec", GAMMA,
                             "--at", "r=50,psi=0", "--format", "json")
    assert code == 0
    row = json.loads(out)[0]
    got = row["value_re"] * math.exp(row["log_scale"])
    assert got == pytest.approx(math.exp(-50.0), rel=0.01)

    code, out, err = run_cli(capsys, "asym-E", "--spec", GAMMA,
                             "--at", "r=40,psi=2.35619449", "--format", "json")
    assert code == 0
    row = json.loads(out)[0]
    assert row["region"] == "outside"
    assert row["value_re"] == 0.0


def test_audit_verb(capsys):
    code, out, err = run_cli(capsys, "audit", "--spec", GAMMA1)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True


def test_max_nodes_env(capsys, monkeypatch):
    monkeypatch.setenv("MELLIN_MAX_NODES", "3000")
    code, out, err = run_cli(capsys, "eval-K", "--spec", GAMMA,
                             "--at", "r=5,psi=0", "--format", "json")
    assert code == 0   # still converges well within 3000 nodes
    monkeypatch.delenv("MELLIN_MAX_NODES")
