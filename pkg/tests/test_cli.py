import json
import subprocess
import sys

import pytest

from congest_mdst.__main__ import main
from congest_mdst.graph import generate, write_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line.startswith("{")], out


def test_run_matching_mdst_path(capsys):
    code, recs, _ = run(capsys, "run", "--alg", "matching-mdst", "--gen", "path", "--n", "6", "--seeds", "3")
    assert code == 0
    assert len(recs) == 3
    assert [r["seed"] for r in recs] == [0, 1, 2]
    assert all(r["spanning_tree"] and r["max_degree"] == 2 for r in recs)


def test_run_epochs_from_file(capsys, tmp_path):
    path = tmp_path / "g.txt"
    write_graph(generate("wheel", 40), path)
    code, recs, _ = run(capsys, "run", "--alg", "epochs", "--graph", str(path), "--start", "hub")
    assert code == 0
    (rec,) = recs
    assert rec["n"] == 40 and rec["spanning_tree"]
    assert rec["final_max_degree"] <= rec["degree_bound"]
    assert rec["rounds"] > 0


@pytest.mark.parametrize("alg", ["component-matching", "d-cm", "improve"])
def test_run_other_algorithms(capsys, alg):
    code, recs, _ = run(capsys, "run", "--alg", alg, "--gen", "random-connected", "--n", "30")
    assert code == 0 and recs[0]["ok"]


def test_run_scaling_summary(capsys):
    code, recs, _ = run(capsys, "run", "--gen", "random-connected", "--n", "16..64", "--seeds", "2", "--scaling")
    assert code == 0
    assert [r["n"] for r in recs[:-1]] == [16, 16, 32, 32, 64, 64]
    summary = recs[-1]
    assert summary["summary"] == "scaling"
    assert set(summary["mean_ratio_by_n"]) == {"16", "32", "64"}


def test_run_unreadable_graph(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n0 7\n")
    assert main(["run", "--graph", str(bad)]) == 2


def test_verify_filter_and_unknown(capsys):
    code = main(["verify", "--suite", "budget"])
    out = capsys.readouterr().out
    assert code == 0 and "ALL PASS" in out
    assert all(line.startswith(("[PASS]", "[FAIL]", "ALL")) for line in out.splitlines())
    assert main(["verify", "--suite", "nope"]) == 2


def test_output_is_byte_identical():
    cmd = [sys.executable, "-m", "congest_mdst", "run", "--gen", "grid", "--n", "25", "--seeds", "2",
           "--alg", "epochs"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
