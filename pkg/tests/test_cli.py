import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from besselfrac.basis import compute_zeros
from besselfrac.cli import ConfigError, RunConfig, main, run
from besselfrac.files import fmt, read_coeffs_json
from besselfrac.inverse import amplification_profile
from besselfrac.specfun import FracOrder


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _report(d):
    with open(d / "report.json") as fh:
        return json.load(fh)


def _snapshot(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


@pytest.fixture
def forward_run(tmp_path):
    out = tmp_path / "fwd"
    assert main(["forward", "--func", "poly43", "--alpha", "0.5", "--T", "1", "--K", "40", "--out-dir", str(out)]) == 0
    return out


def test_forward_outputs(forward_run):
    assert sorted(p.name for p in forward_run.iterdir()) == ["coeffs.json", "report.json", "values.csv"]
    rows = _rows(forward_run / "values.csv")
    assert list(rows[0]) == ["x", "value"] and len(rows) == 101
    coeffs = json.loads((forward_run / "coeffs.json").read_text())
    assert [c["k"] for c in coeffs] == list(range(1, 41))
    assert set(coeffs[0]) == {"k", "lambda_k", "coeff"}
    rep = _report(forward_run)
    for key in ("amplification", "residual", "tolerances", "K", "Q", "config"):
        assert key in rep
    assert rep["K"] == 40 and rep["Q"] == 160
    assert rep["residual"] <= 1e-9


def test_roundtrip_initial(forward_run, tmp_path):
    out = tmp_path / "inv"
    code = main(
        ["invert-initial", "--in-f", str(forward_run / "coeffs.json"), "--in-g", "poly43",
         "--alpha", "0.5", "--T", "1", "--K", "40", "--out-dir", str(out)]
    )
    assert code == 0
    rep = _report(out)
    assert rep["residual"] <= 1e-8
    assert rep["l2_error_relative"] <= 1e-6


def test_roundtrip_through_csv(tmp_path):
    fwd = tmp_path / "fwd"
    main(["forward", "--func", "poly43", "--K", "40", "--grid", "401", "--out-dir", str(fwd)])
    out = tmp_path / "inv"
    assert main(["invert-initial", "--in-f", str(fwd / "values.csv"), "--K", "40", "--out-dir", str(out)]) == 0
    assert _report(out)["residual"] <= 1e-8


def test_roundtrip_source(tmp_path):
    fwd = tmp_path / "fwd"
    main(["forward-source", "--func", "poly43", "--in-h", "poly44", "--alpha", "0.4", "--K", "40", "--out-dir", str(fwd)])
    out = tmp_path / "src"
    code = main(
        ["invert-source", "--in-g", "poly43", "--in-f", str(fwd / "coeffs.json"), "--in-h", "poly44",
         "--alpha", "0.4", "--K", "40", "--out-dir", str(out)]
    )
    assert code == 0
    rep = _report(out)
    assert rep["l2_error_relative"] <= 1e-8
    assert rep["residual"] <= 1e-8


def test_diagnostics_rows(tmp_path):
    out = tmp_path / "diag"
    assert main(["diagnostics", "--alpha", "0.5", "--T", "1", "--K", "20", "--out-dir", str(out)]) == 0
    rows = _rows(out / "amplification.csv")
    basis = compute_zeros(20)
    frac = FracOrder(0.5, 1.0)
    amp_i = amplification_profile(frac, basis, "initial")
    amp_s = amplification_profile(frac, basis, "source")
    assert len(rows) == 20
    for k, row in enumerate(rows):
        assert int(row["k"]) == k + 1
        assert abs(float(row["initial"]) - amp_i[k]) <= 1e-12 * amp_i[k]
        assert abs(float(row["source"]) - amp_s[k]) <= 1e-12 * amp_s[k]
    assert _report(out)["decay_exponent"] <= -3.0


def test_malformed_csv_exit_3(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n0,1\n1,0\n")
    out = tmp_path / "out"
    assert main(["invert-initial", "--in-f", str(bad), "--K", "10", "--out-dir", str(out)]) == 3
    assert not out.exists()
    bad.write_text("x,value\n0,1\n0.5,oops\n")
    assert main(["invert-initial", "--in-f", str(bad), "--K", "10", "--out-dir", str(out)]) == 3
    assert main(["invert-initial", "--in-f", str(tmp_path / "missing.csv"), "--K", "10", "--out-dir", str(out)]) == 3
    (tmp_path / "bad.json").write_text("{not json")
    assert main(["invert-initial", "--in-f", str(tmp_path / "bad.json"), "--K", "10", "--out-dir", str(out)]) == 3
    assert not out.exists()


def test_exit_messages_name_the_field(tmp_path, capsys):
    assert main(["forward", "--alpha", "1.5", "--out-dir", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err.strip()
    assert err.count("\n") == 0 and "alpha" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["forward", "--alpha", "1.5"],
        ["forward", "--alpha", "0"],
        ["forward", "--T", "-1"],
        ["forward", "--K", "0"],
        ["forward", "--K", "40", "--quad-order", "100"],
        ["forward", "--grid", "1"],
        ["forward", "--noise", "-0.1"],
        ["forward", "--times", "0.5,2"],
        ["forward", "--func", "mode:0"],
        ["forward", "--func", "nosuch"],
        ["invert-source", "--in-g", "poly43"],
        ["sweep", "--K-list", "20,10"],
        [],
    ],
)
def test_config_errors_exit_2(tmp_path, argv):
    out = tmp_path / "o"
    assert main(argv + ["--out-dir", str(out)]) == 2
    assert not out.exists()


def test_ill_posed_exit_4(tmp_path, capsys):
    x = np.linspace(0, 1, 201)
    huge = tmp_path / "huge.csv"
    huge.write_text("x,value\n" + "".join(f"{fmt(a)},{fmt(1e306)}\n" for a in x))
    out = tmp_path / "o"
    assert main(["invert-initial", "--in-f", str(huge), "--K", "40", "--out-dir", str(out)]) == 4
    assert "mode" in capsys.readouterr().err
    assert not out.exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["forward", "--func", "poly43", "--noise", "1e-3", "--seed", "7", "--times", "0,0.5,1"],
        ["forward-source", "--func", "poly43", "--K", "30"],
        ["invert-initial", "--func", "poly44", "--noise", "1e-4", "--seed", "3", "--cutoff", "1e3"],
        ["diagnostics", "--K", "20"],
        ["sweep", "--func", "poly43", "--K-list", "5,10,20"],
    ],
)
def test_bitwise_rerun_from_config(tmp_path, argv):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(argv + ["--out-dir", str(a)]) == 0
    assert main(["--config", str(a / "report.json"), "--out-dir", str(b)]) == 0
    assert _snapshot(a) == _snapshot(b)


def test_rerun_of_file_inputs_from_other_cwd(forward_run, tmp_path, monkeypatch):
    a = tmp_path / "a"
    monkeypatch.chdir(forward_run)
    assert main(["invert-initial", "--in-f", "coeffs.json", "--K", "40", "--out-dir", str(a)]) == 0
    monkeypatch.chdir(tmp_path)
    b = tmp_path / "b"
    assert main(["--config", str(a / "report.json"), "--out-dir", str(b)]) == 0
    assert _snapshot(a) == _snapshot(b)


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"config": {"problem": "forward", "bogus": 1}}))
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 2
    assert main(["--config", str(tmp_path / "none.json"), "--out-dir", str(tmp_path / "o")]) == 3


def _sweep(tmp_path, func, extra=()):
    out = tmp_path / func.replace(":", "_")
    assert main(["sweep", "--func", func, "--K-list", "10,20,40,80", "--out-dir", str(out), *extra]) == 0
    return _rows(out / "sweep.csv")


def test_sweep_decreasing(tmp_path):
    rows = _sweep(tmp_path, "poly43")
    assert [(int(r["K_from"]), int(r["K_to"])) for r in rows] == [(10, 20), (20, 40), (40, 80)]
    for col in ("delta_u", "delta_g"):
        vals = [float(r[col]) for r in rows]
        assert all(b < a for a, b in zip(vals, vals[1:])), col


def test_sweep_single_mode_is_exact(tmp_path):
    rows = _sweep(tmp_path, "mode:5")
    for r in rows:
        assert float(r["delta_u"]) == 0.0
        assert float(r["delta_g"]) == 0.0
        assert float(r["delta_uxx"]) == 0.0


def test_sweep_weak_hypothesis(tmp_path):
    rows = _sweep(tmp_path, "poly21")
    vals = [float(r["delta_u"]) for r in rows]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_sweep_source_problem(tmp_path):
    rows = _sweep(tmp_path, "poly44", ("--in-g", "poly43"))
    assert "delta_h" in rows[0]


def test_writes_only_inside_out_dir(tmp_path, monkeypatch):
    work = tmp_path / "work"
    work.mkdir()
    monkeypatch.chdir(work)
    assert main(["forward", "--func", "poly43", "--K", "10", "--out-dir", "o"]) == 0
    assert sorted(os.listdir(work)) == ["o"]
    assert not any(n.endswith(".tmp") for n in os.listdir(work / "o"))


def test_spacetime_values(tmp_path):
    out = tmp_path / "o"
    assert main(["forward", "--func", "poly43", "--K", "20", "--grid", "11", "--times", "0,0.5,1", "--out-dir", str(out)]) == 0
    rows = _rows(out / "values.csv")
    assert list(rows[0]) == ["x", "t", "value"]
    assert len(rows) == 33
    assert sorted({float(r["t"]) for r in rows}) == [0.0, 0.5, 1.0]


def test_coefficient_file_roundtrips_exactly(forward_run):
    basis = compute_zeros(40)
    f = read_coeffs_json(forward_run / "coeffs.json", basis)
    data = json.loads((forward_run / "coeffs.json").read_text())
    assert [float(d["coeff"]) for d in data] == f.coeffs.tolist()


def test_runconfig_validation():
    with pytest.raises(ConfigError):
        RunConfig(problem="forward", alpha=1.0)
    cfg = RunConfig(problem="diagnostics", K=5)
    assert cfg.quad_order == 64
    assert RunConfig.from_echo(cfg.echo(), "elsewhere") == cfg
    assert set(run(cfg)) == {"amplification.csv", "coeffs.json", "report.json"}


def test_console_entry_point(tmp_path):
    out = tmp_path / "o"
    proc = subprocess.run(
        [sys.executable, "-m", "besselfrac.cli", "diagnostics", "--K", "5", "--out-dir", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "amplification.csv").exists()
