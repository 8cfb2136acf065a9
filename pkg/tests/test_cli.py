import json
import subprocess
import sys

import pytest

from ainfty.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_build_k4(capsys):
    code, data = run(["build", "--n", "4"], capsys)
    assert code == 0
    assert len(data["vertices"]) == 5
    assert data["b"] == ["0", "1/2", "1/2", "2"]
    assert len(data["facets"]) == 5 and data["facets"][0] == {"k": 1, "r": 2, "s": 3}


def test_build_complex_k5(tmp_path, capsys):
    out = tmp_path / "k5.json"
    code = main(["build", "--n", "5", "--complex", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["complex_check"]["pass"] and not data["complex_check"]["violations"]
    assert len(data["complex"]["cells"]) == 1 + 45 + 158 + 186 + 72


@pytest.mark.parametrize("argv", [
    ["build", "--n", "0"],
    ["build", "--n", "4", "--format", "xml"],
    ["verify", "--suite", "nope"],
    ["verify", "--n", "1"],
    ["verify", "--samples", "0"],
    ["verify", "--tol-point", "-1"],
    ["dump-phi", "--n", "1"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_max_n_cap(monkeypatch, capsys):
    assert main(["build", "--n", "5", "--complex", "--max-n", "4"]) == 2
    monkeypatch.setenv("AINFTY_MAX_N", "3")
    assert main(["build", "--n", "4", "--complex"]) == 2
    assert main(["verify", "--suite", "assoc", "--n", "4"]) == 2


def test_verify_ainfty(capsys):
    code, data = run(["verify", "--suite", "ainfty", "--n", "4", "--d", "2"], capsys)
    assert code == 0 and data["pass"]
    conds = {r["condition"] for r in data["results"]}
    assert {"0", "1", "2'", "2", "ridge", "flatness"} <= conds


def test_verify_stable(capsys):
    code, data = run(["verify", "--suite", "stable", "--n", "3"], capsys)
    assert code == 0 and data["pass"]
    assert any(r["condition"] == "plateau" for r in data["results"])


@pytest.mark.parametrize("suite", ["cubic", "assoc"])
def test_verify_combinatorial_suites(suite, capsys):
    code, data = run(["verify", "--suite", suite, "--n", "4"], capsys)
    assert code == 0 and data["pass"]


def test_tolerance_below_rounding_floor_fails(capsys):
    code = main(["verify", "--suite", "ainfty", "--n", "4", "--tol-point", "1e-20"])
    captured = capsys.readouterr()
    assert code == 1
    assert not json.loads(captured.out)["pass"]
    assert "FAIL" in captured.err


def test_determinism(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify", "--suite", "all", "--n", "4", "--seed", "3", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_dump_phi(capsys):
    code, data = run(["dump-phi", "--n", "3", "--den", "4"], capsys)
    assert code == 0
    rows = {tuple(r["t"]): r for r in data["rows"]}
    b3 = rows[("0", "1/2", "3/2")]
    assert b3["phi"] == ["1/3", "1/3", "1/3"]
    assert rows[("0", "1", "1")]["phi"] == ["1/4", "1/4", "1/2"]
    assert rows[("0", "0", "2")]["phi"] == ["1/2", "1/4", "1/4"]
    code, data = run(["dump-phi", "--n", "2"], capsys)
    assert code == 0 and len(data["rows"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ainfty", "build", "--n", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert len(json.loads(proc.stdout)["vertices"]) == 2
