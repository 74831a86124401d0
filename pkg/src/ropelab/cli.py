"""Command-line surface: analyze ropes, run deformations, verify loops.

Four subcommands mirror the library layers:

``analyze``  geometry and knot report for a single rope file;
``deform``   run one of the named homotopies, export frames, and check
             its invariant suite;
``loop``     detect ray events of a rope family and print its class in
             the completed knot group;
``mccord``   winding class of a particle timeline.

Exit codes: 0 success, 2 input or precondition error, 3 identification
ambiguity, 4 invariant or genericity violation.  Given the same inputs
and seed, every command prints byte-identical output.  File arguments
that do not exist as paths are also resolved against the directory named
by the ``ROPELAB_FIXTURES`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import RopelabError
from .geometry import (
    Rope,
    axis_decomposition,
    c1_distance,
    hausdorff_distance,
    in_WL,
    in_WR,
    is_short,
    measures,
    min_self_distance,
    rope_type,
    tight_rope,
    validate_rope,
)
from .homotopies import (
    delta_contract,
    phi_conditions,
    tighten,
    wl_stage1,
    wl_stage2,
    wl_stage3,
)
from .io import (
    Family,
    export_family_csv,
    export_family_obj,
    load_family,
    load_rope,
    load_timeline,
    save_family,
)
from .knots import identify
from .loops import RopeFamily, loop_class, loop_verify, tie_and_push
from .mccord import validate as validate_timeline
from .mccord import winding_class_auto

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IDENT = 3
EXIT_INVARIANT = 4


@dataclass
class RunConfig:
    """Resolved options shared by the subcommands."""

    command: str
    inputs: list[str] = field(default_factory=list)
    eps: float = 2.0
    eps_prime: float = 2.0
    n_T: int = 64
    seed: int = 0
    out: Path | None = None
    fmt: str = "json"
    as_json: bool = False

    def __post_init__(self):
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _resolve(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    root = os.environ.get("ROPELAB_FIXTURES")
    if root:
        q = Path(root) / name
        if q.exists():
            return q
    raise _Exit(EXIT_INPUT, f"no such file: {name}")


def _load_rope_checked(name: str) -> Rope:
    try:
        rope = load_rope(_resolve(name))
    except (RopelabError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _Exit(EXIT_INPUT, f"malformed rope file: {exc}")
    problems = validate_rope(rope)
    if problems:
        raise _Exit(EXIT_INPUT, "; ".join(problems))
    return rope


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(cfg: RunConfig) -> int:
    rope = _load_rope_checked(cfg.inputs[0])
    m = measures(rope)
    dec = axis_decomposition(rope)
    report = {
        "l": m["l"],
        "l_x": m["l_x"],
        "l_yz": m["l_yz"],
        "l_A": dec.l_a,
        "l_Z": dec.l_z,
        "short": {str(e): is_short(rope, e) for e in sorted({1.0, 2.0, cfg.eps})},
        "A_components": [
            {"lo": c.lo, "hi": c.hi, "kind": c.kind} for c in dec.a_components
        ],
        "Z_components": [list(z) for z in dec.z_components],
        "in_WL": in_WL(rope),
        "in_WR": in_WR(rope),
    }
    try:
        blocks = rope_type(rope)
    except RopelabError as exc:
        raise _Exit(EXIT_IDENT, f"block identification failed: {exc}")
    if any(k.is_unknown for _, k in blocks):
        raise _Exit(EXIT_IDENT, "a knot block is outside the fingerprint table")
    report["blocks"] = [{"kind": kind, "class": str(k)} for kind, k in blocks]
    if cfg.as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"l      = {m['l']:.6f}   l_x = {m['l_x']:.6f}   l_yz = {m['l_yz']:.6f}")
    print(f"l_A    = {dec.l_a:.6f}   l_Z = {dec.l_z:.6f}")
    for e, ok in report["short"].items():
        print(f"short (eps={e}): {'yes' if ok else 'no'}")
    print(f"W_L: {'yes' if report['in_WL'] else 'no'}   "
          f"W_R: {'yes' if report['in_WR'] else 'no'}")
    if not dec.a_components:
        print("A(r) is empty")
    for entry in report["blocks"]:
        print(f"block [{entry['kind']}]: {entry['class']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# deform


def _frame_grid(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 1)


def _deform_frames(rope: Rope, homotopy: str, cfg: RunConfig) -> list[Rope]:
    ts = _frame_grid(cfg.n_T)
    if homotopy == "delta":
        # T runs 1 -> 0: start at the rope, end near the tight rope
        return [delta_contract(rope, 1.0 - float(t)) for t in ts]
    if homotopy == "wl":
        if not in_WL(rope):
            raise _Exit(EXIT_INPUT, "NOT_IN_E: rope is not in W_L")
        out = []
        for t in ts:
            s = 3.0 * float(t)
            if s <= 1.0:
                out.append(wl_stage1(rope, s))
            elif s <= 2.0:
                out.append(wl_stage2(wl_stage1(rope, 1.0), s - 1.0, eps=cfg.eps))
            else:
                mid = wl_stage2(wl_stage1(rope, 1.0), 1.0, eps=cfg.eps)
                out.append(wl_stage3(mid, 3.0 - s))
        return out
    if homotopy == "tighten":
        try:
            return [tighten(rope, cfg.eps, cfg.eps_prime, float(t)) for t in ts]
        except (RopelabError, ValueError) as exc:
            raise _Exit(EXIT_INPUT, f"precondition failed: {exc}")
    raise _Exit(EXIT_INPUT, f"unknown homotopy: {homotopy}")


def _deform_invariants(rope: Rope, frames: list[Rope], homotopy: str,
                       cfg: RunConfig) -> list[str]:
    bad = []
    for k, fr in enumerate(frames):
        if min_self_distance(fr) <= 0.0:
            bad.append(f"frame {k}: self-intersecting")
    for k in range(len(frames) - 1):
        d = c1_distance(frames[k], frames[k + 1])
        if d >= 0.1:
            bad.append(f"frames {k},{k + 1}: c1 jump {d:.4f}")
    if homotopy == "delta":
        start = hausdorff_distance(frames[0].samples, rope.samples)
        if start > 1e-6:
            bad.append(f"T=1 is not the identity (gap {start:.2e})")
        straight = tight_rope(frames[-1].samples.shape[0] - 1).samples
        end = hausdorff_distance(frames[-1].samples, straight)
        if end > 1e-3:
            bad.append(f"T=0 misses the tight rope by {end:.2e}")
    elif homotopy == "wl":
        l0 = measures(rope)["l"]
        for k, fr in enumerate(frames):
            if measures(fr)["l"] >= 1.0 + cfg.eps:
                bad.append(f"frame {k}: left B_eps")
        straight = tight_rope(frames[-1].samples.shape[0] - 1).samples
        end = hausdorff_distance(frames[-1].samples, straight)
        if end > 1e-3:
            bad.append(f"terminal frame misses the tight rope by {end:.2e}")
        third = frames[len(frames) // 3]
        if measures(third)["l"] > l0 + 1e-9:
            bad.append("stage 1 increased length")
    elif homotopy == "tighten":
        final = frames[-1]
        if measures(final)["l"] >= 1.0 + cfg.eps:
            bad.append(f"final length {measures(final)['l']:.4f} >= 1 + eps")
        phi = phi_conditions(frames[len(frames) // 2], cfg.eps)
        if abs(phi["phi_0"]) > 1e-9 or abs(phi["phi_1"] - 1.0) > 1e-9:
            bad.append("phi does not fix the endpoints")
        if phi["c_margin"] < -1e-9:
            bad.append(f"phi rate bound violated by {-phi['c_margin']:.2e}")
    return bad


def cmd_deform(cfg: RunConfig) -> int:
    rope = _load_rope_checked(cfg.inputs[0])
    homotopy = cfg.inputs[1]
    frames = _deform_frames(rope, homotopy, cfg)
    if cfg.out is not None:
        fam = Family(cfg.eps, tuple(map(float, _frame_grid(cfg.n_T))), tuple(frames))
        cfg.out.mkdir(parents=True, exist_ok=True)
        if cfg.fmt == "json":
            save_family(fam, cfg.out / "family.json")
        elif cfg.fmt == "csv":
            export_family_csv(fam, cfg.out / "family.csv")
        else:
            export_family_obj(fam, cfg.out)
    bad = _deform_invariants(rope, frames, homotopy, cfg)
    report = {"homotopy": homotopy, "frames": len(frames), "violations": bad}
    if cfg.as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(f"{homotopy}: {len(frames)} frames")
        for line in bad:
            print(f"violation: {line}")
        if not bad:
            print("all invariants hold")
    return EXIT_INVARIANT if bad else EXIT_OK


# ---------------------------------------------------------------------------
# loop


def _parse_generator(spec: str) -> RopeFamily:
    head, _, rest = spec.partition(":")
    if head != "tie_and_push" or not rest:
        raise _Exit(EXIT_INPUT, f"unrecognized generator spec: {spec!r}")
    parts = [p.strip() for p in rest.split(",")]
    label, eps, n_T = parts[0], 2.0, None
    for p in parts[1:]:
        key, _, val = p.partition("=")
        if key == "eps":
            eps = float(val)
        elif key in ("n_T", "frames"):
            n_T = int(val)
        else:
            raise _Exit(EXIT_INPUT, f"unknown generator option: {p!r}")
    try:
        return tie_and_push(label, eps, n_T=n_T)
    except (RopelabError, ValueError) as exc:
        raise _Exit(EXIT_INPUT, f"cannot generate loop: {exc}")


def _family_from_file(name: str) -> tuple[RopeFamily, float]:
    try:
        fam = load_family(_resolve(name))
    except (RopelabError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _Exit(EXIT_INPUT, f"malformed family file: {exc}")
    frames = list(zip(fam.times, fam.ropes))
    return RopeFamily(frames, len(frames) - 1), fam.eps


def cmd_loop(cfg: RunConfig) -> int:
    arg = cfg.inputs[0]
    if arg.startswith("tie_and_push:"):
        fam, eps = _parse_generator(arg), cfg.eps
    else:
        fam, eps = _family_from_file(arg)
    try:
        rep = loop_verify(fam, eps)
    except RopelabError as exc:
        raise _Exit(EXIT_INPUT, str(exc))
    events = [
        {"T": t, "side": side, "before": str(b), "after": str(a)}
        for side, entries in (("L", rep.left_events), ("R", rep.right_events))
        for t, b, a in entries
    ]
    events.sort(key=lambda e: e["T"])
    cls = loop_class(rep)
    report = {
        "events": events,
        "generic": rep.generic,
        "flags": rep.flags,
        "class": str(cls),
    }
    if cfg.as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for e in events:
            print(f"event {e['side']} T={e['T']:.6f}: {e['before']} -> {e['after']}")
        if not rep.generic:
            print("NON_GENERIC: " + "; ".join(rep.flags))
        print(f"class: {cls}")
    if not rep.generic:
        return EXIT_INVARIANT
    if any("UNKNOWN" in (e["before"], e["after"]) for e in events):
        return EXIT_IDENT
    return EXIT_OK


# ---------------------------------------------------------------------------
# mccord


def cmd_mccord(cfg: RunConfig) -> int:
    try:
        tl = load_timeline(_resolve(cfg.inputs[0]))
    except (RopelabError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _Exit(EXIT_INPUT, f"malformed timeline file: {exc}")
    rep = validate_timeline(tl)
    if not rep.valid:
        raise _Exit(EXIT_INPUT, "; ".join(rep.problems))
    try:
        cls = winding_class_auto(tl)
    except RopelabError as exc:
        raise _Exit(EXIT_INVARIANT, str(exc))
    if cfg.as_json:
        print(json.dumps({"class": str(cls)}, sort_keys=True))
    else:
        print(f"class: {cls}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ropelab", description=__doc__.split("\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--eps", type=float, default=2.0)
        p.add_argument("--eps-prime", type=float, default=2.0)
        p.add_argument("--frames", type=int, default=64)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true")
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--format", choices=("json", "csv", "obj"), default="json")

    p = sub.add_parser("analyze", help="geometry and knot report for a rope file")
    p.add_argument("rope")
    common(p)
    p = sub.add_parser("deform", help="run a homotopy and verify its invariants")
    p.add_argument("rope")
    p.add_argument("homotopy", choices=("delta", "wl", "tighten"))
    common(p)
    p = sub.add_parser("loop", help="events and class of a rope family")
    p.add_argument("family", help="family file or 'tie_and_push:3_1,eps=2'")
    common(p)
    p = sub.add_parser("mccord", help="winding class of a timeline file")
    p.add_argument("timeline")
    common(p)
    return top


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    inputs = [
        getattr(args, name)
        for name in ("rope", "family", "timeline", "homotopy")
        if hasattr(args, name)
    ]
    try:
        cfg = RunConfig(
            command=args.command,
            inputs=inputs,
            eps=args.eps,
            eps_prime=args.eps_prime,
            n_T=args.frames,
            seed=args.seed,
            out=args.out,
            fmt=args.format,
            as_json=args.json,
        )
        np.random.seed(cfg.seed)
        handler = {
            "analyze": cmd_analyze,
            "deform": cmd_deform,
            "loop": cmd_loop,
            "mccord": cmd_mccord,
        }[cfg.command]
        return handler(cfg)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
