import json
import os

import pytest

from arcstack import certificate
from arcstack.circle import Arc
from arcstack.cli import main

SCN = os.path.join(os.path.dirname(__file__), "..", "scenarios")


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sep")
    assert main(["run", os.path.join(SCN, "separation_only.json"), "--out", str(out),
                 "--svg"]) == 0
    return out


def test_run_writes_outputs(run_dir):
    for name in ("certificate.json", "report.txt", "arcs.svg"):
        assert (run_dir / name).exists()
    report = (run_dir / "report.txt").read_text()
    assert "φ(d) ≠ 0: CERTIFIED" in report
    assert "φ(d0) ≠ φ(d1): CERTIFIED" in report
    assert "FAIL" not in report


def test_check_accepts(run_dir, capsys):
    assert main(["check", str(run_dir / "certificate.json")]) == 0
    assert "certificate OK" in capsys.readouterr().out


def _tampered(run_dir, tmp_path, edit):
    cert = certificate.load(run_dir / "certificate.json")
    edit(cert)
    path = tmp_path / "bad.json"
    certificate.write(cert, path)
    return str(path)


def test_check_rejects_moved_solution(run_dir, tmp_path):
    def edit(cert):
        phi = cert["stages"][1]["phi"]
        mu = next(iter(phi))
        a = Arc.from_json(phi[mu])
        shift = a.length / 1024
        phi[mu] = Arc(a.lo + shift, a.hi + shift).to_json()
    assert main(["check", _tampered(run_dir, tmp_path, edit)]) == 1


def test_check_rejects_changed_index_set(run_dir, tmp_path):
    def edit(cert):
        cert["scenario"]["C"] = {"0": [6]}
    assert main(["check", _tampered(run_dir, tmp_path, edit)]) == 1


def test_check_rejects_garbage(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"format": "nope"}))
    assert main(["check", str(p)]) == 1
    p.write_text("{")
    assert main(["check", str(p)]) == 1


def test_invalid_scenario_exit_code(tmp_path):
    assert main(["run", os.path.join(SCN, "overlapping_supports.json"),
                 "--out", str(tmp_path)]) == 2
    assert main(["run", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2


def test_horizon_exit_code(tmp_path):
    assert main(["run", os.path.join(SCN, "separation_only.json"), "--out", str(tmp_path),
                 "--horizon", "4"]) == 3
