from __future__ import annotations

import json
import subprocess
import sys

import pytest

from stochvote import cli
from stochvote.certificates import load_profile


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_demo_worked_example(capsys, tmp_path):
    code, out, _ = run(capsys, "demo", "worked-example")
    report = json.loads(out)
    assert code == 0 and report["ok"]
    assert report["outcomes"]["urd"] == "x:1/4, y:1/2, z:1/4"
    code, _, _ = run(capsys, "demo", "worked-example", "--out", str(tmp_path))
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "worked_example.json" in names and "borda_refutation.json" in names
    for f in tmp_path.iterdir():
        code, out, _ = run(capsys, "verify-certificate", str(f))
        if f.name != "worked_example.json":
            assert code == 0, f.name


def test_axioms_exit_codes(capsys):
    code, out, _ = run(capsys, "axioms", "check", "urd", "--n", "2", "--tau-max", "3")
    assert code == 0
    assert json.loads(out)["results"]["iia"]["status"] == "pass"
    code, out, _ = run(capsys, "axioms", "check", "borda", "--n", "2", "--tau-max", "3",
                       "--axioms", "iia")
    assert code == 1
    assert list(json.loads(out)["results"]) == ["iia"]


def test_axiom_report_replays(capsys, tmp_path):
    path = tmp_path / "report.json"
    assert run(capsys, "axioms", "check", "dictator:1", "--n", "3", "--tau-max", "3",
               "--out", str(path))[0] == 1
    code, out, _ = run(capsys, "verify-certificate", str(path))
    assert code == 0 and json.loads(out)["ok"]


@pytest.mark.parametrize("argv", [
    ["axioms", "check", "nosuchrule", "--n", "2", "--tau-max", "2"],
    ["axioms", "check", "urd", "--n", "1", "--tau-max", "2"],
    ["selfeq", "refute", "plurality", "--profile", "/nonexistent", "--rival", "x"],
    ["selfeq", "refute", "plurality", "--profile", "running-example", "--rival", "y"],
    ["selfeq", "refute", "urd", "--profile", "running-example", "--rival", "x"],
    ["selfeq", "verify-urd", "--profile", "running-example", "--extras", "bad"],
    ["verify-certificate", "/nonexistent.json"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_cap_exceeded_exit_3(capsys):
    code, _, err = run(capsys, "axioms", "check", "urd", "--n", "4", "--tau-max", "3", "--cap", "100")
    assert code == 3 and err.startswith("error:")


def test_refutation_absent_exits_1(capsys):
    code, out, _ = run(capsys, "selfeq", "refute", "dictator:1", "--profile", "running-example",
                       "--rival", "y", "--support-sizes", "1")
    assert code == 1 and json.loads(out)["refuted"] is False


def test_alpha_and_characterize(capsys):
    code, out, _ = run(capsys, "alpha", "table", "dictator:1", "--n", "2")
    assert code == 0 and json.loads(out)["alpha"]["{1}"] == "1"
    code, out, _ = run(capsys, "characterize", "plurality", "--n", "3", "--tau-max", "3")
    assert code == 0
    assert json.loads(out)["verdict"]["equals_urd"] is False


def test_profile_file_fixture(capsys, tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("x>y>z\ny>z>x\nz>x>y\ny>z>x\n")
    assert load_profile(str(f)) == load_profile("running-example")
    code, out, _ = run(capsys, "selfeq", "verify-urd", "--profile", str(f), "--extras", "tx=x,ty=y")
    assert code == 0 and json.loads(out)["holds"]


def test_verify_rejects_tampering(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "selfeq", "refute", "condorcet", "--profile", "running-example", "--rival", "x",
        "--support-sizes", "1,2", "--out", str(path))
    data = json.loads(path.read_text())
    data["blocks"][0]["records"][0]["violation"] = None
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify-certificate", str(path))
    assert code == 1 and not json.loads(out)["ok"]


def test_run_config(capsys, tmp_path):
    cfg = {"rules": ["urd", "plurality", "borda", "condorcet", "dictator:1"], "n": 3, "tau_max": 3,
           "profile": "running-example", "rival": "x", "tasks": ["axioms"], "output": str(tmp_path / "out")}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "run", str(cfg_path))
    assert code == 0
    grid = json.loads((tmp_path / "out" / "axiom_matrix.json").read_text())["rules"]
    assert set(grid) == set(cfg["rules"])
    assert grid["borda"]["iia"]["status"] == "violation"
    assert grid["urd"]["iia"]["status"] == "pass"

    cfg.update(rules=["plurality"], tasks=["refute", "verify-urd"], output=str(tmp_path / "sel"))
    cfg_path.write_text(json.dumps(cfg))
    assert run(capsys, "run", str(cfg_path))[0] == 0
    assert {p.name for p in (tmp_path / "sel").iterdir()} == {"refute_plurality.json", "urd_witness.json"}


def test_run_empty_rule_list(capsys, tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"rules": [], "output": str(tmp_path / "out")}))
    assert run(capsys, "run", str(cfg_path))[0] == 0
    grid = json.loads((tmp_path / "out" / "axiom_matrix.json").read_text())
    assert grid["rules"] == {}


@pytest.mark.parametrize("cfg", [{"bogus": 1}, {"tasks": ["nope"]}, {"tasks": ["refute"]},
                                 {"rules": ["nosuch"]}])
def test_run_config_errors(capsys, tmp_path, cfg):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert run(capsys, "run", str(cfg_path))[0] == 2


def test_byte_identical_reruns(tmp_path):
    for sub in ("a", "b"):
        cli.main(["demo", "worked-example", "--out", str(tmp_path / sub)])
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stochvote", "alpha", "table", "urd", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["alpha"]["{1,2}"] == "1"
