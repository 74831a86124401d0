"""File formats: ropes, closed curves, families, timelines, exports."""

import json

import numpy as np
import pytest

from ropelab.errors import InvalidRopeError
from ropelab.fixtures import bump, tight
from ropelab.io import (
    Family,
    export_family_csv,
    export_family_obj,
    load_closed_curve,
    load_family,
    load_rope,
    load_timeline,
    parse_label,
    save_closed_curve,
    save_family,
    save_rope,
    save_timeline,
)
from ropelab.mccord import omega
from ropelab.monoid import MonoidElement


def test_rope_roundtrip(tmp_path):
    r = bump()
    p = tmp_path / "r.json"
    save_rope(r, p)
    back = load_rope(p)
    assert np.allclose(back.samples, r.samples)


def test_rope_endpoints_must_be_exact(tmp_path):
    p = tmp_path / "r.json"
    data = {"samples": [[1e-12, 0.0, 0.0]] + [[i / 10, 0.01, 0.0] for i in range(1, 10)] + [[1.0, 0.0, 0.0]]}
    p.write_text(json.dumps(data))
    with pytest.raises(InvalidRopeError):
        load_rope(p)


def test_rope_file_needs_samples(tmp_path):
    p = tmp_path / "r.json"
    p.write_text("{}")
    with pytest.raises(InvalidRopeError):
        load_rope(p)


def test_closed_curve_roundtrip(tmp_path):
    pts = np.column_stack([np.cos(np.linspace(0, 6, 30)), np.sin(np.linspace(0, 6, 30)), np.zeros(30)])
    p = tmp_path / "c.json"
    save_closed_curve(pts, p)
    assert np.allclose(load_closed_curve(p), pts)
    p.write_text(json.dumps({"samples": pts.tolist()}))
    with pytest.raises(InvalidRopeError):
        load_closed_curve(p)


def test_family_roundtrip_and_exports(tmp_path):
    fam = Family(2.0, (0.0, 0.5, 1.0), (tight(16), bump(), tight(16)))
    p = tmp_path / "fam.json"
    save_family(fam, p)
    back = load_family(p)
    assert back.eps == 2.0
    assert back.times == fam.times
    assert np.allclose(back.ropes[1].samples, fam.ropes[1].samples)

    csv_path = tmp_path / "fam.csv"
    export_family_csv(fam, csv_path)
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "t,index,x,y,z"
    assert len(lines) == 1 + sum(len(r.samples) for r in fam.ropes)

    objs = export_family_obj(fam, tmp_path / "frames")
    assert len(objs) == 3
    first = objs[0].read_text()
    assert first.count("v ") == len(fam.ropes[0].samples)
    assert "l 1 2" in first


def test_timeline_roundtrip(tmp_path):
    tl = omega(MonoidElement.of("3_1", "4_1"))
    p = tmp_path / "tl.json"
    save_timeline(tl, p)
    back = load_timeline(p)
    assert back.tracks[0].label == tl.tracks[0].label
    assert back.tracks[0].breakpoints == tl.tracks[0].breakpoints
    assert [e.kind for e in back.events] == [e.kind for e in tl.events]


def test_parse_label():
    assert parse_label("0_1").is_unit
    assert parse_label("2*3_1 + 4_1") == MonoidElement.of("3_1", "3_1", "4_1")
    with pytest.raises(ValueError):
        parse_label("3_1 - 4_1")
