import json
import os
import subprocess
import sys

import pytest

from twistoid import cli
from twistoid.bundle import TransitionFamily
from twistoid.suites import qhm_family


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_build_writes_round_trippable_bundle(tmp_path, capsys):
    code, _ = run(["build", "--c", "2", "--out", str(tmp_path)], capsys)
    assert code == 0
    bundle = json.loads((tmp_path / "bundle.json").read_text())
    family = TransitionFamily.from_json(bundle["family"])
    assert family.to_json() == qhm_family(2).to_json()
    assert bundle["degree"] == -2 and bundle["section_module"] == "M^2"
    grid = json.loads((tmp_path / "grid.json").read_text())
    assert grid["q"] == 24 and grid["alpha_node_offset"] == [12, 8]


def test_build_output_is_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert cli.main(["build", "--out", str(tmp_path / d)]) == 0
    capsys.readouterr()
    for name in ("bundle.json", "grid.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_verify_single_suite(capsys):
    code, out = run(["verify", "flip", "--samples", "40"], capsys)
    assert code == 0
    data = json.loads(out.out)
    assert data["passed"] and data["suites"][0]["suite"] == "flip"


def test_verify_accepts_built_bundle(tmp_path, capsys):
    run(["build", "--out", str(tmp_path)], capsys)
    code, out = run(["verify", "cocycle", "--samples", "20", "--bundle", str(tmp_path / "bundle.json")], capsys)
    assert code == 0 and json.loads(out.out)["passed"]


def test_corrupted_bundle_fails_with_witness(tmp_path, capsys):
    run(["build", "--out", str(tmp_path)], capsys)
    data = json.loads((tmp_path / "bundle.json").read_text())
    family = data["family"]
    for entry in family["transitions"]:
        if [entry["i"], entry["j"]] == [1, 2]:
            entry["pieces"][-1]["phase"]["a0"] = "1/3"
            break
    else:
        pytest.fail("no (1,2) transition in the exported family")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out = run(["verify", "cocycle", "--samples", "20", "--bundle", str(bad)], capsys)
    assert code == 1
    report = json.loads(out.out)["suites"][0]
    assert not report["passed"] and report["failures"]


def test_unknown_suite_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nonsense"])
    assert exc.value.code == 2


def test_incompatible_grid_is_usage_error(capsys):
    code, out = run(["bimodule", "verify", "--grid", "10"], capsys)
    assert code == 2 and "error" in out.err


def test_missing_bundle_file_is_usage_error(tmp_path, capsys):
    code, _ = run(["verify", "cocycle", "--bundle", str(tmp_path / "absent.json")], capsys)
    assert code == 2


def test_export_commands(tmp_path, capsys):
    code, out = run(["export", "bundle", "--c", "-1"], capsys)
    assert code == 0 and json.loads(out.out)["degree"] == 1
    target = tmp_path / "grid.json"
    code, _ = run(["export", "grid", "--grid", "12", "--out", str(target)], capsys)
    assert code == 0 and json.loads(target.read_text())["q"] == 12


def test_heisenberg_and_algebra_commands(capsys):
    code, out = run(["heisenberg", "check", "--samples", "30"], capsys)
    assert code == 0 and json.loads(out.out)["passed"]
    code, out = run(["algebra", "verify", "--samples", "300", "--grid", "12", "--levels", "2"], capsys)
    assert code == 0 and json.loads(out.out)["passed"]


def test_bimodule_single_structure(capsys):
    code, out = run(["bimodule", "verify", "--structure", "a-theta", "--grid", "12"], capsys)
    assert code == 0 and json.loads(out.out)["passed"]


@pytest.mark.parametrize("suite", ["cocycle", "algebra"])
def test_verify_is_byte_identical_across_processes(tmp_path, suite):
    argv = [sys.executable, "-m", "twistoid.cli", "verify", suite, "--samples", "300", "--grid", "12"]
    outputs = []
    for k, hashseed in enumerate(("1", "2")):
        path = tmp_path / f"r{k}.json"
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        proc = subprocess.run(argv + ["--out", str(path)], capture_output=True, text=True, env=env)
        assert proc.returncode == 0, proc.stderr
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
