import json
import subprocess
import sys

import pytest

from bczmap import cli, dynamics as dyn


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_farey(capsys):
    code, out, _ = run(capsys, "farey", "3", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["A_n"] == 4 and doc["fractions"] == ["0/1", "1/3", "1/2", "2/3", "1/1"]
    code, out, _ = run(capsys, "farey", "2", "--csv")
    assert out.splitlines() == ["index,p,q", "0,0,1", "1,1,2", "2,1,1"]


def test_orbit(capsys):
    code, out, _ = run(capsys, "orbit", "1", "3", "3", "4", "--json")
    steps = json.loads(out)["steps"]
    assert [(s["a"], s["b"]) for s in steps] == [("1/3", "1"), ("1", "2/3"), ("2/3", "1"), ("1", "1/3")]
    assert [s["k_hat"] for s in steps] == ["7/2", "2", "2", "7/2"]


def test_theta_and_iota(capsys):
    _, out, _ = run(capsys, "theta", "3", "--series", "--json")
    doc = json.loads(out)
    assert doc["abs_sum"] == "7/2" and doc["series"] == ["1/2", "-1/2", "-3/2", "-1"]
    _, out, _ = run(capsys, "iota", "3", "--json")
    assert json.loads(out)["abs_sum"] == "3/2"
    _, out, _ = run(capsys, "theta", "3")
    assert "sum|theta|=7/2" in out


def test_excursion_and_energy(capsys):
    code, out, _ = run(capsys, "excursion", "1/3", "1/3", "--verify-interior", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["length"] == 4 and doc["zeta_s"] == "-1" and doc["monotone"] is True
    assert doc["x"] == ["1/3", "1", "2/3", "1", "1/3"]
    _, out, _ = run(capsys, "energy", "1/2", "1/2", "--json")
    assert json.loads(out)["energy"] == "3/2"
    _, out, _ = run(capsys, "energy", "1/3", "1/3", "--function", "g-lambda=1/2", "--json")
    assert json.loads(out)["energy"] == "7/2"


def test_sweep_outputs(tmp_path, capsys):
    target = tmp_path / "t.csv"
    code, _, _ = run(capsys, "sweep", "--mode", "theta_sum", "--grid", "3,5", "--out", str(target))
    assert code == 0
    assert target.read_text().splitlines() == ["n,A_n,value_num,value_den,value_float",
                                               "3,4,7,2,3.5", "5,10,27,2,13.5"]  # n=5 row from oracles.theta_brute
    code, out, _ = run(capsys, "sweep", "--mode", "iota_sum", "--grid", "3", "--json")
    doc = json.loads(out)
    assert doc["rows"][0]["value_num"] == 3 and doc["rows"][0]["value_den"] == 2


def test_equidist(capsys):
    code, out, _ = run(capsys, "equidist", "--p", "1", "--q", "1", "--f", "0,1/2,1/2,1,1",
                       "--n", "64", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["exact"] == "1/4" and doc["rows"][0]["error"] < 0.05


@pytest.mark.parametrize("argv", [
    ["excursion", "0", "1"],
    ["farey", "0"],
    ["orbit", "1", "1", "2", "3"],
    ["equidist", "--p", "2", "--q", "4", "--f", "0,1,0,1,1"],
    ["sweep", "--mode", "theta_sum", "--grid", "5,3"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["excursion", "abc", "1"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["frobnicate"])
    assert e.value.code == 2


def test_invariant_violation_exit_1(monkeypatch, capsys):
    real = dyn.itinerary
    monkeypatch.setattr(dyn, "itinerary", lambda x, y, d: real(x, y, d) + 1)
    code, out, err = run(capsys, "verify", "--n-max", "5")
    assert code == 1 and "FAIL" in out
    assert json.loads(err)["failures"]


def test_verify_subprocess():
    proc = subprocess.run([sys.executable, "-m", "bczmap", "verify", "--n-max", "10", "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]
