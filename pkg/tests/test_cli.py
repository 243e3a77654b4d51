import csv
import io
import json
import subprocess
import sys

import pytest

from qpv.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compat_passes(capsys):
    code, out, _ = run(capsys, "compat", "--trials", "2", "--seed", "1", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert all(r["passed"] == 2 for r in rep["rows"])
    assert len(rep["rows"]) == 15


def test_compat_corrupt_fails(capsys):
    code, out, _ = run(capsys, "compat", "--trials", "1", "--corrupt", "--format", "csv")
    assert code == 1
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["failed"] == "1"


@pytest.mark.parametrize("argv", [["compat", "--trials", "0"], ["special", "--digits", "8"], ["orbit", "--steps", "-1"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_env_digits(monkeypatch):
    monkeypatch.setenv("QPV_DIGITS", "7")
    with pytest.raises(SystemExit) as exc:
        main(["eval", "theta", "1", "1/2"])
    assert exc.value.code == 2


def test_orbit_zero_steps(capsys):
    code, out, _ = run(capsys, "orbit", "--steps", "0", "--seed", "4", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "n,y,z,w,a1,a2,kappa1,kappa2"
    assert len(lines) == 2


def test_orbit_trivial_word(capsys):
    code, out, _ = run(capsys, "orbit", "--steps", "1", "--seed", "2", "--word", "T0 T1 T2 T3 T4", "--format", "csv")
    r0, r1 = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert (r0["y"], r0["z"]) == (r1["y"], r1["z"])


def test_orbit_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.csv"
        assert main(["orbit", "--steps", "3", "--seed", "9", "--format", "csv", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_orbit_from_state_file(capsys, tmp_path):
    state = {"q": "1/3", "a": ["1", "2", "5"], "kappa": ["1", "2"], "lambda": ["3", "-20/3"], "y": "7", "z": "1/2", "w": "1"}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(state))
    code, out, _ = run(capsys, "orbit", "--params", str(path), "--steps", "2", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["rows"][0]["y"] == "7"
    assert rep["rows"][1]["a1"] == "1/3"


def test_orbit_degenerate(capsys, tmp_path):
    # z = (y-a1)(y-a2)/(y-a3) makes the first step degenerate
    state = {"q": "1/3", "a": ["1", "2", "5"], "kappa": ["1", "2"], "lambda": ["3", "-20/3"], "y": "7", "z": "15", "w": "1"}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(state))
    code, out, err = run(capsys, "orbit", "--params", str(path), "--steps", "3", "--format", "csv")
    assert code == 1 and "step 1" in err
    assert len(out.strip().splitlines()) == 2


def test_malformed_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"a": [1, 2')
    code, _, err = run(capsys, "special", "--params", str(path))
    assert code == 2 and "invalid JSON" in err
    path.write_text('{"a": [1, 2], "q": "1/2"}')
    code, _, err = run(capsys, "special", "--params", str(path))
    assert code == 2


def test_special_report(capsys):
    code, out, _ = run(capsys, "special", "--n-max", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert list(rows[0])[:3] == ["n", "Delta", "Sigma"]
    for r in rows:
        assert float(r["qpv_residual_y"]) < 1e-40 and float(r["qpv_residual_z"]) < 1e-40


def test_freud_report(capsys):
    code, out, _ = run(capsys, "freud", "--n-max", "3", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and len(rep["rows"]) == 3


def test_lattice_report(capsys):
    code, out, _ = run(capsys, "lattice", "--trials", "2", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["trivial_element_passed"] == 2 and rep["factorization_passed"] == 2
    assert [r["tag"] for r in rep["rows"]] == ["T0", "T1", "T2", "T3", "T4"]


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "qpoch", "1/2", "1/2", "2", "--format", "csv")
    assert code == 0 and out.splitlines()[1].endswith(",0.375")
    code, _, _ = run(capsys, "eval", "qpoch", "1/2")
    assert code == 2
    code, _, _ = run(capsys, "eval", "phi21", "1/2", "1/3", "1/5", "3", "1/2")
    assert code == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qpv.cli", "eval", "theta", "-1", "1/3"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.0" in proc.stdout
