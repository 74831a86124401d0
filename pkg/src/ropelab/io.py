"""File formats: rope, closed-curve, family, and timeline JSON; CSV/OBJ export.

Rope files pin their endpoints with exact 0.0 / 1.0 literals; the
loaders validate that bit-exactly rather than within a tolerance, so a
file that drifted through lossy processing is rejected loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidRopeError
from .geometry import Rope
from .mccord import Event, Timeline, Track
from .monoid import MonoidElement, parse_element


def _as_float_rows(obj, name: str) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidRopeError(f"{name}: expected a list of [x,y,z] triples")
    return arr


def load_rope(path: str | Path) -> Rope:
    data = json.loads(Path(path).read_text())
    if "samples" not in data:
        raise InvalidRopeError("rope file missing 'samples'")
    raw = data["samples"]
    first, last = raw[0], raw[-1]
    if list(first) != [0.0, 0.0, 0.0] or list(last) != [1.0, 0.0, 0.0]:
        raise InvalidRopeError("rope endpoints must be the exact literals [0,0,0] and [1,0,0]")
    samples = _as_float_rows(raw, "samples")
    kwargs = {}
    for key in ("tangent_a", "tangent_b"):
        if data.get(key) is not None:
            v = np.asarray(data[key], dtype=float)
            if v.shape != (3,):
                raise InvalidRopeError(f"{key}: expected an [x,y,z] triple")
            kwargs[key] = v
    return Rope(samples, **kwargs)


def save_rope(rope: Rope, path: str | Path):
    data = {"samples": [list(map(float, p)) for p in rope.samples]}
    if rope.tangent_a is not None:
        data["tangent_a"] = list(map(float, rope.tangent_a))
    if rope.tangent_b is not None:
        data["tangent_b"] = list(map(float, rope.tangent_b))
    Path(path).write_text(json.dumps(data))


def load_closed_curve(path: str | Path) -> np.ndarray:
    data = json.loads(Path(path).read_text())
    if not data.get("closed", False):
        raise InvalidRopeError("closed-curve file must set \"closed\": true")
    return _as_float_rows(data.get("samples"), "samples")


def save_closed_curve(points: np.ndarray, path: str | Path):
    Path(path).write_text(
        json.dumps({"samples": [list(map(float, p)) for p in np.asarray(points, dtype=float)], "closed": True})
    )


# ---------------------------------------------------------------------------
# one-parameter families


@dataclass(frozen=True)
class Family:
    """Rope frames indexed by a parameter t, with the ambient eps."""

    eps: float
    times: tuple[float, ...]
    ropes: tuple[Rope, ...]


def load_family(path: str | Path) -> Family:
    data = json.loads(Path(path).read_text())
    if "eps" not in data or "frames" not in data:
        raise InvalidRopeError("family file needs 'eps' and 'frames'")
    times, ropes = [], []
    for frame in data["frames"]:
        times.append(float(frame["t"]))
        raw = frame["rope"]["samples"]
        if list(raw[0]) != [0.0, 0.0, 0.0] or list(raw[-1]) != [1.0, 0.0, 0.0]:
            raise InvalidRopeError("family frame endpoints must be exact literals")
        ropes.append(Rope(_as_float_rows(raw, "frame samples")))
    return Family(float(data["eps"]), tuple(times), tuple(ropes))


def save_family(family: Family, path: str | Path):
    frames = [
        {"t": float(t), "rope": {"samples": [list(map(float, p)) for p in r.samples]}}
        for t, r in zip(family.times, family.ropes)
    ]
    Path(path).write_text(json.dumps({"eps": family.eps, "frames": frames}))


def export_family_csv(family: Family, path: str | Path):
    """One row per sample: T, sample index, x, y, z."""
    lines = ["t,index,x,y,z"]
    for t, rope in zip(family.times, family.ropes):
        for i, p in enumerate(rope.samples):
            lines.append(f"{t},{i},{p[0]},{p[1]},{p[2]}")
    Path(path).write_text("\n".join(lines) + "\n")


def export_family_obj(family: Family, out_dir: str | Path):
    """One Wavefront OBJ polyline file per frame: frame_0000.obj, ..."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, rope in enumerate(family.ropes):
        lines = [f"# t = {family.times[k]}"]
        for p in rope.samples:
            lines.append(f"v {p[0]} {p[1]} {p[2]}")
        lines.append("l " + " ".join(str(i + 1) for i in range(len(rope.samples))))
        fp = out / f"frame_{k:04d}.obj"
        fp.write_text("\n".join(lines) + "\n")
        paths.append(fp)
    return paths


# ---------------------------------------------------------------------------
# timelines


def load_timeline(path: str | Path) -> Timeline:
    data = json.loads(Path(path).read_text())
    tracks = []
    for tr in data.get("tracks", []):
        label = parse_label(tr["label"])
        bps = tuple((float(t), float(x)) for t, x in tr["breakpoints"])
        tracks.append(Track(label, bps))
    events = tuple(
        Event(float(e["time"]), str(e["kind"]), tuple(e.get("tracks", ())))
        for e in data.get("events", [])
    )
    return Timeline(tuple(tracks), events)


def save_timeline(tl: Timeline, path: str | Path):
    data = {
        "tracks": [
            {"label": str(tr.label), "breakpoints": [[t, x] for t, x in tr.breakpoints]}
            for tr in tl.tracks
        ],
        "events": [
            {"time": e.time, "kind": e.kind, "tracks": list(e.tracks)} for e in tl.events
        ],
    }
    Path(path).write_text(json.dumps(data))


def parse_label(text: str) -> MonoidElement:
    """Monoid element from text like '3_1', '2*3_1 + 4_1', or '0_1'."""
    text = text.strip()
    if text in ("0_1", "0", ""):
        return MonoidElement.unit()
    g = parse_element(text)
    primes = []
    for label, count in g.as_dict().items():
        if count < 0:
            raise ValueError(f"negative coefficient in monoid label: {text!r}")
        primes.extend([label] * count)
    return MonoidElement(tuple(primes))
