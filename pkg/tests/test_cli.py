"""Command-line interface: subcommands, exit codes, determinism."""

import json

import pytest

from ropelab.cli import main
from ropelab.fixtures import bump, tight, trefoil_rope
from ropelab.io import save_rope, save_timeline
from ropelab.mccord import concat, omega, reverse
from ropelab.monoid import MonoidElement


@pytest.fixture()
def rope_files(tmp_path):
    files = {}
    for name, rope in (("tight", tight(64)), ("bump", bump()), ("tref", trefoil_rope())):
        p = tmp_path / f"{name}.json"
        save_rope(rope, p)
        files[name] = str(p)
    return files


def test_analyze_tight(rope_files, capsys):
    assert main(["analyze", rope_files["tight"], "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["l"] == pytest.approx(1.0)
    assert rep["A_components"] == []
    assert rep["in_WL"] and rep["in_WR"]


def test_analyze_trefoil(rope_files, capsys):
    assert main(["analyze", rope_files["tref"], "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["l"] == pytest.approx(2.8, abs=1e-6)
    assert len([c for c in rep["A_components"] if c["kind"] == "interval"]) == 1
    assert [b["class"] for b in rep["blocks"]] == ["3_1"]


def test_analyze_is_deterministic(rope_files, capsys):
    main(["analyze", rope_files["tref"], "--json"])
    first = capsys.readouterr().out
    main(["analyze", rope_files["tref"], "--json"])
    assert capsys.readouterr().out == first


def test_analyze_rejects_malformed(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"samples": [[0.0,0.0,0.0],[1.0,0.0,0.0]]}')
    assert main(["analyze", str(p)]) == 2
    assert main(["analyze", str(tmp_path / "missing.json")]) == 2


def test_fixture_dir_resolution(rope_files, tmp_path, monkeypatch):
    monkeypatch.setenv("ROPELAB_FIXTURES", str(tmp_path))
    assert main(["analyze", "tight.json"]) == 0


def test_deform_delta(rope_files, tmp_path, capsys):
    out = tmp_path / "frames"
    code = main(["deform", rope_files["bump"], "delta", "--frames", "64",
                 "--out", str(out), "--format", "json", "--json"])
    assert code == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["violations"] == []
    assert (out / "family.json").exists()


def test_deform_wl(rope_files, capsys):
    assert main(["deform", rope_files["bump"], "wl", "--frames", "30"]) == 0


def test_deform_tighten(rope_files, capsys):
    code = main(["deform", rope_files["tref"], "tighten",
                 "--eps", "1", "--eps-prime", "2", "--frames", "16"])
    assert code == 0


def test_deform_tighten_precondition(rope_files):
    # eps >= eps_prime is an input error
    assert main(["deform", rope_files["tref"], "tighten", "--eps", "2", "--eps-prime", "1"]) == 2


def test_loop_constant(capsys):
    assert main(["loop", "tie_and_push:0_1,eps=2,frames=8", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["class"] == "0"
    assert rep["events"] == []
    assert rep["generic"]


def test_loop_rejects_bad_spec(capsys):
    assert main(["loop", "tie_and_push:"]) == 2
    assert main(["loop", "tie_and_push:3_1,volume=2"]) == 2
    assert main(["loop", "no-such-file.json"]) == 2


def test_mccord(tmp_path, capsys):
    tl = concat(omega(MonoidElement.of("3_1")), reverse(omega(MonoidElement.of("4_1"))))
    p = tmp_path / "tl.json"
    save_timeline(tl, p)
    assert main(["mccord", str(p)]) == 0
    assert "3_1 - 4_1" in capsys.readouterr().out


def test_mccord_rejects_invalid(tmp_path, capsys):
    p = tmp_path / "tl.json"
    p.write_text(json.dumps({"tracks": [{"label": "3_1", "breakpoints": [[0.0, 0.0]]}], "events": []}))
    assert main(["mccord", str(p)]) == 2


def test_eps_must_be_positive(rope_files):
    assert main(["analyze", rope_files["tight"], "--eps", "-1"]) == 2
