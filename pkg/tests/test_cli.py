import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from gtdlab import cli
from gtdlab.errors import ConvergenceError, ParameterError
from oracles import euler_table


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(out):
    """Parse CSV output into (meta, columns, array)."""
    meta, body = {}, []
    for line in out.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            meta[k.strip()] = v.strip()
        else:
            body.append(line)
    rows = list(csv.reader(body))
    cols, data = rows[0], rows[1:]
    return meta, cols, data


def numeric(data):
    return np.array([[float(c) for c in r] for r in data])


def test_gtf_sin_classical(capsys):
    code, out, err = run(capsys, "gtf", "sin", "--v", "2", "--w", "2", "--grid", "0:1.5:4")
    assert code == 0 and err == ""
    meta, cols, data = table(out)
    assert cols == ["x", "value", "pythagorean_residual"]
    a = numeric(data)
    assert np.allclose(a[:, 1], np.sin(a[:, 0]), rtol=0, atol=1e-12)
    assert "gtdlab" in meta["tool"] and float(meta["quad_tol"]) == 1e-10


def test_gtf_cos_residual_column(capsys):
    code, out, _ = run(capsys, "gtf", "cos", "--v", "3", "--w", "4", "--grid", "0:1:11")
    a = numeric(table(out)[2])
    assert code == 0 and a.shape == (11, 3)
    assert np.all(a[:, 2] < 1e-9)


def test_gtf_arcsin_warns_infinite_period(capsys):
    code, out, err = run(capsys, "gtf", "arcsin", "--v", "0.5", "--w", "2", "--x", "0.999")
    assert code == 0
    assert "warning" in err and "inf" in err
    assert np.isfinite(numeric(table(out)[2])[0, 1])


def test_numbers_are_17_significant_digits(capsys):
    _, out, _ = run(capsys, "gtf", "sin", "--v", "2", "--w", "2", "--x", "1")
    val = table(out)[2][0][1]
    mant = val.split("e")[0].replace("-", "").replace(".", "")
    assert len(mant) == 17
    # 17 digits round-trip the double exactly
    from gtdlab import gtf
    s, _ = gtf.sincos_vw(gtf.TrigParams(2, 2), np.array([1.0]))
    assert float(val) == s[0] and abs(s[0] - np.sin(1.0)) < 1e-15


def test_transform_cauchy_half(capsys):
    code, out, _ = run(capsys, "transform", "--alpha", "0.5", "--density", "stretched-gaussian:2,0",
                       "--grid", "-6:6:121")
    assert code == 0
    meta, cols, data = table(out)
    assert cols == ["y", "pdf"]
    a = numeric(data)
    k = np.sqrt(np.pi)  # hyperbolic secant law up to the scale k
    assert np.max(np.abs(a[:, 1] - k / (np.pi * np.cosh(k * a[:, 0])))) < 1e-8


def test_transform_numeric_matches_auto(capsys):
    base = ("transform", "--alpha", "0.5", "--density", "cauchy", "--grid", "-4:4:33")
    _, auto, _ = run(capsys, *base)
    _, num, _ = run(capsys, *base, "--method", "numeric")
    assert np.allclose(numeric(table(auto)[2]), numeric(table(num)[2]), rtol=0, atol=1e-6)


def test_deterministic_bytes(capsys):
    argv = ("transform", "--alpha", "2", "--density", "logistic", "--method", "numeric",
            "--grid", "-3:3:25")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_density_table_and_json(capsys):
    code, out, _ = run(capsys, "density", "gtd:2,1.5,2", "--grid", "-1:1:5", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["columns"] == ["x", "pdf"] and len(obj["rows"]) == 5
    assert obj["meta"]["command"] == "density"


def test_density_default_grid_uses_grid_nodes(capsys):
    _, out, _ = run(capsys, "density", "logistic", "--grid-nodes", "100")
    assert len(table(out)[2]) == 100


def test_density_from_csv_file(capsys, tmp_path):
    _, out, _ = run(capsys, "density", "stretched-gaussian:2,1", "--grid", "-9:9:2001")
    p = tmp_path / "g.csv"
    p.write_text(out)
    code, out2, _ = run(capsys, "density", str(p), "--grid", "-1:1:3")
    a = numeric(table(out2)[2])
    assert code == 0
    assert np.allclose(a[:, 1], np.exp(-a[:, 0] ** 2) / np.sqrt(np.pi), rtol=1e-6)


def test_functional_record(capsys):
    code, out, _ = run(capsys, "functional", "shannon", "--density", "stretched-gaussian:2,1")
    obj = json.loads(out)
    assert code == 0 and obj["finite"] is True
    assert obj["value"] == pytest.approx(0.5 * (1 + np.log(np.pi)), rel=1e-10)


def test_functional_infinite_is_reported(capsys):
    code, out, err = run(capsys, "functional", "moment", "--density", "cauchy", "--p", "2")
    obj = json.loads(out)
    assert code == 0 and obj["finite"] is False and obj["value"] == "inf"
    assert "infinite" in err


def test_functional_missing_parameter(capsys):
    code, out, err = run(capsys, "functional", "renyi", "--density", "cauchy")
    assert code == 2 and out == "" and "--lambda" in err


def test_ineq_saturated_row(capsys):
    code, out, _ = run(capsys, "ineq", "cumulative-cr", "--p", "2", "--beta", "1.5",
                       "--lambda", "2", "--density", "gtd:2,1.5,2")
    _, cols, data = table(out)
    assert code == 0 and len(data) == 1
    row = dict(zip(cols, data[0]))
    assert row["saturated"] == "true" and row["kind"] == "cumulative-cr"


def test_ineq_sweep_order_independent_of_jobs(capsys):
    argv = ("ineq", "cumulative-em", "--p", "2", "--lambda", "2", "--beta", "1.5",
            "--sweep", "beta=1.2:2:3", "--density", "logistic")
    _, serial, _ = run(capsys, *argv)
    _, par, _ = run(capsys, *argv, "--jobs", "2")
    assert serial == par
    _, cols, data = table(serial)
    betas = [float(dict(zip(cols, r))["beta"]) for r in data]
    assert betas == [1.2, 1.6, 2.0]


def test_moments_cauchy_table(capsys):
    code, out, _ = run(capsys, "moments", "cauchy", "--orders", "1..8")
    obj = json.loads(out)
    assert code == 0 and obj["orders"] == list(range(1, 9))
    vals = obj["values"]
    assert vals[0::2] == [0.0] * 4
    for i in range(1, 5):
        assert vals[2 * i - 1] == pytest.approx((np.pi / 4) ** i * euler_table()[i], rel=1e-14)
        assert obj["quadrature"][2 * i - 1] == pytest.approx(vals[2 * i - 1], rel=1e-6)
    assert len(obj["carleman_partial_sums"]) == 4


def test_reconstruct_gamma_two(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"gamma": 2.0, "orders": [1], "values": [1.0]}))
    code, out, _ = run(capsys, "reconstruct", "--moments", str(p), "--support", "positive",
                       "--grid", "0:1.5:7")
    a = numeric(table(out)[2])
    assert code == 0
    assert np.allclose(a[:, 1], 1 - a[:, 0] / 2, atol=1e-8)


def test_reconstruct_infeasible_exit_4(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"gamma": 1.0, "orders": [1, 2], "values": [0.0, -1.0]}))
    code, out, err = run(capsys, "reconstruct", "--moments", str(p))
    assert code == 4 and out == "" and "infeasible" in err


@pytest.mark.parametrize("argv", [
    ("gtf", "sin", "--v", "2", "--w", "2", "--grid", "0:1"),
    ("gtf", "sin", "--v", "2", "--w", "2"),
    ("density", "nosuchfamily:1"),
    ("transform", "--alpha", "-0.5", "--density", "raised-cosine"),
    ("gtf", "sin", "--v", "2", "--w", "2", "--x", "1", "--quad-tol", "1e-20"),
    ("gtf", "sin", "--v", "2", "--w", "2", "--x", "1", "--grid-nodes", "10"),
    ("reconstruct", "--moments", "/nonexistent/m.json"),
])
def test_parameter_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("gtdlab: error")


def test_numeric_failure_exit_3(capsys, monkeypatch):
    def boom(*a, **k):
        raise ConvergenceError("no convergence")
    monkeypatch.setattr(cli, "differential_escort", boom)
    code, out, err = run(capsys, "transform", "--alpha", "0.5", "--density", "cauchy")
    assert code == 3 and out == "" and "numerical failure" in err


def test_quad_tol_env_and_flag(capsys, monkeypatch):
    argv = ("gtf", "sin", "--v", "2", "--w", "2", "--x", "1")
    monkeypatch.setenv(cli.ENV_QUAD_TOL, "1e-7")
    meta = table(run(capsys, *argv)[1])[0]
    assert float(meta["quad_tol"]) == 1e-7
    meta = table(run(capsys, *argv, "--quad-tol", "1e-12")[1])[0]
    assert float(meta["quad_tol"]) == 1e-12  # the flag wins
    monkeypatch.setenv(cli.ENV_QUAD_TOL, "tight")
    assert run(capsys, *argv)[0] == 2


def test_parse_grid():
    assert np.array_equal(cli.parse_grid("-2:2:5"), [-2, -1, 0, 1, 2])
    assert np.array_equal(cli.parse_grid("3:3:1"), [3.0])
    with pytest.raises(ParameterError):
        cli.parse_grid("2:1:5")
    with pytest.raises(ParameterError):
        cli.parse_grid("a:b:c")


def test_parse_orders():
    assert cli.parse_orders("1..4") == [1, 2, 3, 4]
    assert cli.parse_orders("2,4") == [2, 4]
    with pytest.raises(ParameterError):
        cli.parse_orders("0..3")


def test_run_config_bounds():
    with pytest.raises(ParameterError):
        cli.RunConfig(quad_tol=1e-3)
    with pytest.raises(ParameterError):
        cli.RunConfig(grid_nodes=63)
    assert cli.RunConfig().quad_tol == 1e-10


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "gtdlab", "gtf", "cos", "--v", "2", "--w", "2",
                        "--x", "0"], capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
    assert r.stdout.strip().splitlines()[-1].startswith("0.0000000000000000e+00,1.0000000000000000e+00")
