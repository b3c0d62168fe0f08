import json

import pytest

from nctheta.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_nf(capsys):
    assert run(capsys, "nf", "z2*z1") == (0, "rho * z1*z2\n", "")
    assert run(capsys, "nf", "z2*z1", "--swapped")[1] == "rho^(-1) * z1*z2\n"
    assert run(capsys, "nf", "U2*U1", "--algebra", "torus")[1] == "rho * U1*U2\n"
    assert run(capsys, "nf", "u*(1+y)", "--algebra", "ball")[1] == "1\n"
    assert run(capsys, "nf", "x^2 + z1*z1' + z2*z2'", "--algebra", "s4")[1] == "1\n"
    assert run(capsys, "nf", "z3*z1", "--m", "3")[1] == "rho * z1*z3\n"


def test_nf_parse_error(capsys):
    code, out, err = run(capsys, "nf", "z1 + * z2")
    assert code == 2 and out == ""
    assert "^" in err


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "verify", "nope")[0] == 2
    assert run(capsys, "numeric", "rieffel")[0] == 2
    assert run(capsys, "numeric", "rieffel", "--p", "1", "--q", "3", "--theta-float", "0.3")[0] == 2
    assert run(capsys, "numeric", "winding", "--p", "1", "--q", "3", "--loop", "Y")[0] == 2
    assert run(capsys, "numeric", "rieffel", "--p", "1", "--q", "1")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_verify_writes_report(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "verify", "instanton", "--out", str(out))
    assert code == 0 and "instanton: PASS" in text
    data = json.loads(out.read_text())
    assert data["command"] == "verify" and data["params"] == {"suite": "instanton"}
    assert set(data) == {"command", "params", "checks", "elapsed_ms"}
    assert all(set(c) == {"name", "pass", "residual"} and c["pass"] for c in data["checks"])


def test_verify_retractions_params(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run(capsys, "verify", "retractions", "--p", "2", "--q", "5", "--out", str(out))[0] == 0
    assert json.loads(out.read_text())["params"] == {"suite": "retractions", "p": 2, "q": 5}


def test_numeric_rieffel_artifact(capsys, tmp_path):
    art = tmp_path / "p.json"
    assert run(capsys, "numeric", "rieffel", "--p", "3", "--q", "8", "--artifact", str(art))[0] == 0
    data = json.loads(art.read_text())
    assert data["dim"] == 8 and abs(data["trace"] - 3 / 8) < 1e-9


def test_numeric_rieffel_irrational(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run(capsys, "numeric", "rieffel", "--theta-float", "0.6180339887", "--q-max", "13",
               "--out", str(out))[0] == 0
    assert json.loads(out.read_text())["params"]["convergent"] == [8, 13]


def test_numeric_winding(capsys, tmp_path):
    out = tmp_path / "w.json"
    code, _, _ = run(capsys, "numeric", "winding", "--p", "3", "--q", "8", "--loop", "X^-2",
                     "--grid", "512", "--check-drift", "--out", str(out))
    assert code == 0
    params = json.loads(out.read_text())["params"]
    assert params["s"] == -2 and abs(params["value"] + 0.75) < 4e-3


def test_numeric_winding_branch_failure(capsys):
    code, _, err = run(capsys, "numeric", "winding", "--p", "3", "--q", "8", "--loop", "X^5", "--grid", "3")
    assert code == 1 and "check failed" in err


def test_numeric_tolerance_override_fails(capsys):
    code, text, _ = run(capsys, "numeric", "rieffel", "--p", "3", "--q", "8", "--tol", "-1")
    assert code == 1 and "FAIL" in text


def test_numeric_clutch(capsys, tmp_path):
    art = tmp_path / "c.json"
    code, _, _ = run(capsys, "numeric", "clutch", "--p", "3", "--q", "8", "--n", "2", "--s", "1",
                     "--cone-grid", "16", "--artifact", str(art))
    assert code == 0
    assert json.loads(art.read_text())["invariants"] == [2, 1]


def test_numeric_clutch_rational(capsys, tmp_path):
    out = tmp_path / "c.json"
    assert run(capsys, "numeric", "clutch", "--p", "3", "--q", "8", "--n", "1", "--s", "1",
               "--cone-grid", "8", "--theta-kind", "rational", "--out", str(out))[0] == 0
    assert json.loads(out.read_text())["params"]["invariants"] == [1, 0]


def test_numeric_spectrum(capsys, tmp_path):
    art = tmp_path / "s.json"
    code, _, _ = run(capsys, "numeric", "spectrum-c", "--p", "2", "--q", "5", "--grid", "24",
                     "--tol", "0.2", "--artifact", str(art))
    data = json.loads(art.read_text())
    assert code == 0 and len(data["re"]) == 24 * 24 * 5


@pytest.mark.parametrize("s", [-3, 0, 4])
def test_numeric_chern(capsys, tmp_path, s):
    out = tmp_path / "k.json"
    assert run(capsys, "numeric", "chern", "--s", str(s), "--out", str(out))[0] == 0
    params = json.loads(out.read_text())["params"]
    assert params["winding"] == s and params["chern_number"] == -s
