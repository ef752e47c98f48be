from __future__ import annotations

import json
import subprocess
import sys

import pytest

from cantor_forge.cli import EXIT_IO, EXIT_OK, EXIT_PROPERTY, EXIT_SCHEMA, main
from cantor_forge.intervals import IntervalSet
from cantor_forge.numerics import Dyadic
from cantor_forge.oracles import TargetSet, empty_oracle, full_oracle
from cantor_forge.verify import Check


def write(path, payload) -> str:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "full": write(tmp_path / "full.json", full_oracle(1).to_json()),
        "empty": write(tmp_path / "empty.json", empty_oracle(1).to_json()),
        "evens": write(tmp_path / "evens.json", TargetSet(4, frozenset()).to_json()),
        "a15": write(tmp_path / "a15.json", TargetSet(6, frozenset({1, 5})).to_json()),
        "dir": tmp_path,
    }


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_G_full(files, capsys):
    out = files["dir"] / "g.json"
    code, text, _ = run(capsys, "construct", "--set", "G", "--oracle", files["full"], "--stage", "2", "--out", str(out))
    assert code == EXIT_OK
    assert "components\t4" in text
    s = IntervalSet.from_json(json.loads(out.read_text()))
    assert len(s) == 4 and [float(iv.lo) for iv in s] == [0.0, 0.5, 0.75, 1.0]


def test_construct_H1_matches_G(files, capsys):
    d = files["dir"]
    run(capsys, "construct", "--set", "G", "--oracle", files["full"], "--stage", "4", "--out", str(d / "g.json"))
    run(capsys, "construct", "--set", "H", "--m", "1", "--oracle", files["full"], "--stage", "4", "--out", str(d / "h.json"))
    assert (d / "g.json").read_bytes() == (d / "h.json").read_bytes()


def test_construct_K_stage_zero_contains_one(files, capsys):
    out = files["dir"] / "k.json"
    code, _, _ = run(capsys, "construct", "--set", "K", "--target", files["evens"], "--stage", "0", "--out", str(out))
    assert code == EXIT_OK
    assert IntervalSet.from_json(json.loads(out.read_text())).component_of(Dyadic(1)) is not None


def test_rank_on_symbolic_trees(files, capsys):
    d = files["dir"]
    tree = d / "k3.json"
    code, _, _ = run(capsys, "construct", "--set", "Km", "--m", "3", "--target", files["evens"], "--symbolic", "--out", str(tree))
    assert code == EXIT_OK
    code, text, _ = run(capsys, "rank", "--tree", str(tree), "--truncate", "5", "--json")
    assert code == EXIT_OK and json.loads(text)["rho"] == [0, 4]
    block = write(d / "block.json", {"tree": {"type": "block", "lo": "0", "hi": "1"}})
    code, text, _ = run(capsys, "rank", "--tree", block)
    assert code == EXIT_OK
    assert text.splitlines()[0] == "lo\thi\trank\tinterior"
    assert "# rho = {0}" in text


def test_rank_outputs_are_deterministic(files, capsys):
    d = files["dir"]
    tree = d / "k.json"
    run(capsys, "construct", "--set", "K", "--target", files["a15"], "--symbolic", "--out", str(tree))
    for tag in "ab":
        run(capsys, "rank", "--tree", str(tree), "--truncate", "6", "--depth", "4",
            "--out", str(d / f"r{tag}.json"), "--svg", str(d / f"r{tag}.svg"))
    assert (d / "ra.json").read_bytes() == (d / "rb.json").read_bytes()
    assert (d / "ra.svg").read_bytes() == (d / "rb.svg").read_bytes()
    assert (d / "ra.svg").read_text().lstrip().startswith("<?xml")


def test_artifacts_round_trip(files, capsys):
    d = files["dir"]
    tree = d / "k.json"
    run(capsys, "construct", "--set", "K", "--target", files["a15"], "--symbolic", "--out", str(tree))
    run(capsys, "realize", "--tree", str(tree), "--depth", "5", "--out", str(d / "set.json"))
    run(capsys, "rank", "--tree", str(tree), "--truncate", "6", "--out", str(d / "rank.json"))
    for name in ("k.json", "set.json", "rank.json"):
        text = (d / name).read_text()
        assert json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n" == text


def test_render_set_ascii_and_svg(files, capsys):
    d = files["dir"]
    s = write(d / "s.json", {"intervals": [["0", "1/2"], ["1", "1"]]})
    code, text, _ = run(capsys, "render", "--set", s, "--ascii", "--svg", str(d / "s.svg"))
    assert code == EXIT_OK
    line = text.splitlines()[0]
    assert line.startswith("#") and line.endswith(".")
    assert (d / "s.svg").stat().st_size > 0


def test_exit_codes(files, capsys, monkeypatch):
    d = files["dir"]
    bad = d / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, "rank", "--tree", str(bad))
    assert code == EXIT_SCHEMA and "not JSON" in err
    code, _, _ = run(capsys, "rank", "--tree", write(d / "t.json", {"type": "block", "lo": "1", "hi": "0"}))
    assert code == EXIT_SCHEMA
    code, _, _ = run(capsys, "construct", "--set", "H", "--m", "2", "--oracle", files["full"], "--stage", "1")
    assert code == EXIT_SCHEMA
    code, _, _ = run(capsys, "rank", "--tree", str(d / "missing.json"))
    assert code == EXIT_IO
    code, _, _ = run(capsys, "construct", "--set", "G", "--oracle", files["full"], "--stage", "1",
                     "--out", str(d / "no" / "such" / "dir.json"))
    assert code == EXIT_IO
    monkeypatch.setattr("cantor_forge.cli.run_suite", lambda *a, **k: [Check("km", "x", False)])
    code, text, _ = run(capsys, "verify", "--suite", "km")
    assert code == EXIT_PROPERTY and "FAIL" in text


def test_verify_km_passes(capsys):
    code, text, _ = run(capsys, "verify", "--suite", "km")
    assert code == EXIT_OK
    rows = text.strip().splitlines()
    assert rows[0] == "suite\tcheck\tstatus\tdetail" and len(rows) == 11
    assert all("\tpass\t" in r for r in rows[1:])


def test_module_entry_point(files):
    args = [sys.executable, "-m", "cantor_forge", "construct", "--set", "G", "--oracle", files["empty"], "--stage", "3"]
    first = subprocess.run(args, capture_output=True, check=True)
    second = subprocess.run(args, capture_output=True, check=True)
    assert first.stdout == second.stdout
    assert b"components\t2" in first.stdout
