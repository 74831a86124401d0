"""Tie a trefoil near A, carry it across, and shed it at B.

Builds the generator loop for the trefoil class, verifies genericity,
prints the ray events with the knot classes on both sides, and exports
a handful of frames as OBJ polylines for external plotting.

Usage: python demos/tie_and_shed.py [out_dir]
"""

import sys
from pathlib import Path

from ropelab.geometry import measures
from ropelab.io import Family, export_family_obj
from ropelab.loops import loop_class, loop_verify, tie_and_push


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_frames")
    print("building the tie-and-push loop for 3_1 ...")
    fam = tie_and_push("3_1", eps=2.0)
    lengths = [measures(r)["l"] for _, r in fam.frames]
    print(f"{len(fam.frames)} frames, length range "
          f"[{min(lengths):.3f}, {max(lengths):.3f}] (< 3 throughout)")

    report = loop_verify(fam, eps=2.0)
    for side, events in (("left", report.left_events), ("right", report.right_events)):
        for t, before, after in events:
            print(f"{side:>5} ray event at T = {t:.4f}: {before} -> {after}")
    print(f"loop class: {loop_class(report)}")

    keep = [fam.frames[i] for i in range(0, len(fam.frames), len(fam.frames) // 24)]
    family = Family(2.0, tuple(t for t, _ in keep), tuple(r for _, r in keep))
    paths = export_family_obj(family, out)
    print(f"wrote {len(paths)} OBJ frames to {out}/")


if __name__ == "__main__":
    main()
