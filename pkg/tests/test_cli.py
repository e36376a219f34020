import json
import math
import shutil
import subprocess

import numpy as np
import pytest

from hypercube_lsi import cli, hyper, serialize


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def payload(text):
    return serialize.loads(text)


def test_curves_b1_csv(capsys):
    code, out, _ = run(capsys, "curves", "b1", "--points", "100", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# config: ") and lines[1] == "x,y"
    rows = lines[2:]
    assert len(rows) == 100 and rows[0] == "0,0"


def test_curves_hc_ode(capsys):
    code, out, _ = run(capsys, "curves", "hc-ode", "--p0", "2", "--rho0", "0.15", "--t", "0:2:0.01")
    d = payload(out)
    assert code == 0 and d["result"]["ys"][0] == 2 and len(d["result"]["xs"]) == 201
    assert d["config"]["rho0"] == 0.15


def test_curves_bonami(capsys):
    code, out, _ = run(capsys, "curves", "bonami", "--p0", "2")
    d = payload(out)["result"]
    assert np.allclose(d["ys"], hyper.bonami(2, np.asarray(d["xs"])), rtol=1e-15)


@pytest.mark.parametrize("kind,extra", [("C", []), ("bp", ["--p", "3"]), ("mgl", ["--rho0", "0.3"]),
                                        ("hc-closed", ["--rho0", "0.2"]), ("hc-firm", ["--rho0", "0.2"])])
def test_curves_other_kinds(capsys, kind, extra):
    code, out, _ = run(capsys, "curves", kind, "--points", "20", "--t", "0:1:0.25", *extra)
    assert code == 0 and payload(out)["result"]["name"] == kind


def test_deterministic_bytes(capsys, tmp_path):
    args = ["verify", "lsi", "--n", "4", "--p", "2", "--trials", "30", "--seed", "7"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    out = tmp_path / "o.json"
    run(capsys, *args, "--out", str(out))
    assert out.read_text() == a


def test_verify_lsi(capsys):
    code, out, _ = run(capsys, "verify", "lsi", "--n", "6", "--p", "2", "--trials", "1000", "--seed", "7")
    assert code == 0 and payload(out)["result"]["pass"] is True


@pytest.mark.parametrize("suite,extra", [
    ("mgl", ["--n", "8", "--trials", "10"]),
    ("hc", ["--n", "6", "--trials", "5"]),
    ("uncertainty", ["--n", "6", "--trials", "3"]),
    ("coding", ["--k", "5", "--n", "10", "--trials", "5"]),
])
def test_verify_suites(capsys, suite, extra):
    code, out, _ = run(capsys, "verify", suite, *extra)
    assert code == 0, out
    assert payload(out)["config"]["backend"] in ("cython", "python")


def test_verify_mgl_from_file(capsys, tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"n": 3, "values": [1, 2, 3, 4, 5, 6, 7, 8]}))
    code, out, _ = run(capsys, "verify", "mgl", "--in", str(p))
    assert code == 0 and payload(out)["result"]["trials"] == 1


def test_verification_failure_exit_code(capsys):
    # a curve with rho0 above the function's own value is rejected as a usage error,
    # while a wrong-direction claim yields exit 1
    code, _, _ = run(capsys, "verify", "hc", "--n", "6", "--trials", "2", "--rate", "0.5", "--rho0", "0.3")
    assert code == 2


def test_failure_path_returns_one(capsys, monkeypatch):
    monkeypatch.setattr(cli.curves, "verify_plsi", lambda f, p: -1.0)
    code, out, _ = run(capsys, "verify", "lsi", "--n", "3", "--trials", "2")
    assert code == 1 and payload(out)["result"]["pass"] is False


@pytest.mark.parametrize("argv", [
    ["verify", "lsi", "--n", "0"],
    ["verify", "lsi", "--n", "abc"],
    ["curves", "bp"],
    ["curves", "b1", "--points", "1"],
    ["curves", "hc-ode", "--p0", "2", "--rho0", "0.1", "--t", "1:0:0.1"],
    ["angle", "--n", "4", "--S", "", "--Sigma", "ball: 1"],
    ["nonsense"],
])
def test_usage_errors(capsys, argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == 2


def test_angle_linear_reports_both(capsys):
    code, out, _ = run(capsys, "angle", "--n", "4", "--S", "linear:\n1100\n0011", "--Sigma", "linear:\n1010")
    d = payload(out)["result"]
    assert code == 0 and d["difference"] < 1e-10
    assert d["svd"]["cos_angle"] == pytest.approx(d["linear_formula"]["cos_angle"])


def test_angle_balls(capsys, tmp_path):
    spec = tmp_path / "s.txt"
    spec.write_text("ball: 5\n")
    code, out, _ = run(capsys, "angle", "--n", "8", "--S", "@" + str(spec), "--Sigma", "ball: 3")
    assert code == 0 and payload(out)["result"]["svd"]["cos_angle"] == pytest.approx(1, abs=1e-9)


def test_code_command(capsys, tmp_path):
    ident = tmp_path / "id.txt"
    ident.write_text("1000\n0100\n0010\n0001\n")
    code, out, _ = run(capsys, "code", "--in", str(ident))
    assert code == 0 and payload(out)["result"]["d_r"]["1"] == 1
    defic = tmp_path / "d.txt"
    defic.write_text("1100\n0110\n1010\n")
    code, out, err = run(capsys, "code", "--in", str(defic), "--rprime", "0.2", "--slack", "0.1")
    assert code == 0 and "warning" in err and payload(out)["result"]["k"] == 2
    big = tmp_path / "big.txt"
    big.write_text("".join("".join("1" if j == i else "0" for j in range(26)) + "\n" for i in range(25)))
    assert run(capsys, "code", "--in", str(big))[0] == 2


def test_code_csv(capsys, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("110\n011\n")
    code, out, _ = run(capsys, "code", "--in", str(g), "--format", "csv")
    assert code == 0 and out.splitlines()[1] == "message_weight,codeword_weight"


def test_grid_parser():
    assert np.allclose(cli.parse_grid("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1])
    assert len(cli.parse_grid("0:2:0.01")) == 201
    with pytest.raises(cli.UsageError):
        cli.parse_grid("0:1")


@pytest.mark.skipif(shutil.which("hypercube-lsi") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["hypercube-lsi", "curves", "C", "--points", "3", "--format", "csv"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert math.isclose(float(res.stdout.splitlines()[-1].split(",")[1]), 2 / math.log(2), rel_tol=1e-15)
