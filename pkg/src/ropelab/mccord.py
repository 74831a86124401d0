"""Labeled-particle timelines on the unit interval.

Particles carry non-unit monoid labels and move piecewise linearly in
time.  They may be created at either endpoint, exit through an
endpoint, or merge (the merged particle carries the product label).
Loops — timelines with empty start and end configurations — have a
winding class in the Grothendieck completion, computed as signed label
flux through a generic interior point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonGenericLoopError
from .monoid import GrothendieckElement, MonoidElement, complete, msum

#: minimum time gap between distinct events
EVENT_GAP = 1e-9


@dataclass(frozen=True)
class Configuration:
    """Particles at strictly increasing interior positions, non-unit labels."""

    particles: tuple[tuple[float, MonoidElement], ...]

    def __post_init__(self):
        prev = 0.0
        for pos, label in self.particles:
            if not (0.0 < pos < 1.0):
                raise ValueError(f"particle position {pos} not interior")
            if pos <= prev:
                raise ValueError("positions must be strictly increasing")
            if label.is_unit:
                raise ValueError("unit labels are not allowed")
            prev = pos

    @classmethod
    def empty(cls) -> "Configuration":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.particles


@dataclass(frozen=True)
class Track:
    """Piecewise-linear particle path: breakpoints [(t, x), ...]."""

    label: MonoidElement
    breakpoints: tuple[tuple[float, float], ...]

    @property
    def t0(self) -> float:
        return self.breakpoints[0][0]

    @property
    def t1(self) -> float:
        return self.breakpoints[-1][0]

    def position(self, t: float) -> float:
        ts = [b[0] for b in self.breakpoints]
        xs = [b[1] for b in self.breakpoints]
        return float(np.interp(t, ts, xs))

    def alive_at(self, t: float) -> bool:
        return self.t0 <= t <= self.t1


@dataclass(frozen=True)
class Event:
    time: float
    kind: str  # CREATE_0 | CREATE_1 | EXIT_0 | EXIT_1 | MERGE
    tracks: tuple[int, ...] = ()


@dataclass(frozen=True)
class Timeline:
    tracks: tuple[Track, ...]
    events: tuple[Event, ...] = ()

    def configuration_at(self, t: float) -> Configuration:
        live = [
            (tr.position(t), tr.label)
            for tr in self.tracks
            if tr.t0 < t < tr.t1 and 0.0 < tr.position(t) < 1.0
        ]
        live.sort(key=lambda p: p[0])
        return Configuration(tuple(live))

    @property
    def is_loop(self) -> bool:
        return self.configuration_at(0.0).is_empty and self.configuration_at(1.0).is_empty


def empty_timeline() -> Timeline:
    return Timeline((), ())


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    problems: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.problems


def validate(tl: Timeline, as_loop: bool = True) -> ValidationReport:
    """Check the model axioms; problems are reported, not thrown."""
    rep = ValidationReport()
    for k, tr in enumerate(tl.tracks):
        if tr.label.is_unit:
            rep.problems.append(f"track {k}: unit label")
        ts = [b[0] for b in tr.breakpoints]
        if any(b >= a for a, b in zip(ts[1:], ts)) is False and len(ts) >= 2:
            pass
        if len(ts) < 2:
            rep.problems.append(f"track {k}: fewer than two breakpoints")
            continue
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            rep.problems.append(f"track {k}: non-increasing times")
        for t, x in tr.breakpoints:
            if not (0.0 <= x <= 1.0) or not (0.0 <= t <= 1.0):
                rep.problems.append(f"track {k}: breakpoint outside [0,1]x[0,1]")
                break
    times = sorted(e.time for e in tl.events)
    for t1, t2 in zip(times, times[1:]):
        if t2 - t1 < EVENT_GAP:
            rep.problems.append(f"simultaneous events at t={t1}")
    for e in tl.events:
        if e.kind in ("CREATE_0", "CREATE_1"):
            bnd = 0.0 if e.kind.endswith("0") else 1.0
            for k in e.tracks:
                tr = tl.tracks[k]
                if abs(tr.t0 - e.time) > EVENT_GAP or abs(tr.breakpoints[0][1] - bnd) > 1e-9:
                    rep.problems.append(f"event {e.kind}@{e.time}: track {k} does not start there")
        elif e.kind in ("EXIT_0", "EXIT_1"):
            bnd = 0.0 if e.kind.endswith("0") else 1.0
            for k in e.tracks:
                tr = tl.tracks[k]
                if abs(tr.t1 - e.time) > EVENT_GAP or abs(tr.breakpoints[-1][1] - bnd) > 1e-9:
                    rep.problems.append(f"event {e.kind}@{e.time}: track {k} does not end there")
        elif e.kind == "MERGE":
            if len(e.tracks) != 3:
                rep.problems.append(f"MERGE@{e.time}: needs (in, in, out) track triple")
                continue
            i, j, out = e.tracks
            ti, tj, to = tl.tracks[i], tl.tracks[j], tl.tracks[out]
            x = to.breakpoints[0][1]
            if (
                abs(ti.t1 - e.time) > EVENT_GAP
                or abs(tj.t1 - e.time) > EVENT_GAP
                or abs(to.t0 - e.time) > EVENT_GAP
            ):
                rep.problems.append(f"MERGE@{e.time}: track times do not meet")
            elif (
                abs(ti.breakpoints[-1][1] - x) > 1e-9
                or abs(tj.breakpoints[-1][1] - x) > 1e-9
            ):
                rep.problems.append(f"MERGE@{e.time}: tracks not coincident")
            if msum(ti.label, tj.label) != to.label:
                rep.problems.append(f"MERGE@{e.time}: label is not the product")
        else:
            rep.problems.append(f"unknown event kind {e.kind}")
    if as_loop:
        if not tl.configuration_at(0.0).is_empty:
            rep.problems.append("loop: non-empty configuration at t=0")
        if not tl.configuration_at(1.0).is_empty:
            rep.problems.append("loop: non-empty configuration at t=1")
    return rep


# ---------------------------------------------------------------------------
# basic loops and composition


def omega(m: MonoidElement) -> Timeline:
    """Single particle moving 0 -> 1 with label m."""
    if m.is_unit:
        raise ValueError("omega requires a non-unit label")
    track = Track(m, ((0.0, 0.0), (1.0, 1.0)))
    events = (Event(0.0, "CREATE_0", (0,)), Event(1.0, "EXIT_1", (0,)))
    return Timeline((track,), events)


def _require_loop(tl: Timeline):
    if not tl.is_loop:
        raise ValueError("timeline is not a loop")


def reverse(tl: Timeline) -> Timeline:
    """Time reversal; creations and exits swap roles."""
    _require_loop(tl)
    swap = {"CREATE_0": "EXIT_0", "CREATE_1": "EXIT_1", "EXIT_0": "CREATE_0", "EXIT_1": "CREATE_1", "MERGE": "MERGE"}
    tracks = tuple(
        Track(tr.label, tuple((1.0 - t, x) for t, x in reversed(tr.breakpoints)))
        for tr in tl.tracks
    )
    events = tuple(
        Event(1.0 - e.time, swap[e.kind], e.tracks) for e in reversed(tl.events)
    )
    return Timeline(tracks, events)


def concat(t1: Timeline, t2: Timeline) -> Timeline:
    """Loop composition: t1 on [0, 1/2], t2 on [1/2, 1]."""
    _require_loop(t1)
    _require_loop(t2)

    def rescale(tl: Timeline, lo: float, scale: float):
        tracks = tuple(
            Track(tr.label, tuple((lo + scale * t, x) for t, x in tr.breakpoints))
            for tr in tl.tracks
        )
        events = tuple(Event(lo + scale * e.time, e.kind, e.tracks) for e in tl.events)
        return tracks, events

    # the second half starts just after the first ends, so that events at
    # the junction keep the minimum time gap
    tr1, ev1 = rescale(t1, 0.0, 0.5 - EVENT_GAP)
    tr2, ev2 = rescale(t2, 0.5 + EVENT_GAP, 0.5 - EVENT_GAP)
    offset = len(tr1)
    ev2 = tuple(Event(e.time, e.kind, tuple(k + offset for k in e.tracks)) for e in ev2)
    return Timeline(tr1 + tr2, ev1 + ev2)


# ---------------------------------------------------------------------------
# winding class


def winding_class(tl: Timeline, x0: float = 0.5) -> GrothendieckElement:
    """Signed label flux through the level x = x0.

    Upward crossings count +complete(label), downward -complete(label).
    For a loop this is the class in the Grothendieck completion and is
    independent of the generic level chosen.
    """
    _require_loop(tl)
    total = GrothendieckElement.zero()
    for tr in tl.tracks:
        xs = [x for _, x in tr.breakpoints]
        for x_a, x_b in zip(xs, xs[1:]):
            if abs(x_a - x0) < 1e-12 or abs(x_b - x0) < 1e-12:
                raise NonGenericLoopError(f"track breakpoint at level x0={x0}")
            if x_a < x0 < x_b:
                total = total + complete(tr.label)
            elif x_b < x0 < x_a:
                total = total - complete(tr.label)
    return total


def winding_class_auto(tl: Timeline, x0: float = 0.5) -> GrothendieckElement:
    """winding_class with automatic perturbation of a non-generic level."""
    rng = np.random.default_rng(0)
    for _ in range(16):
        try:
            return winding_class(tl, x0)
        except NonGenericLoopError:
            x0 = min(1 - 1e-6, max(1e-6, x0 + float(rng.uniform(-1e-3, 1e-3))))
    raise NonGenericLoopError("no generic level found")


# ---------------------------------------------------------------------------
# subordination to a rope


def is_subordinate(c: Configuration, rope) -> bool | None:
    """Whether the configuration is subordinate to the rope.

    Every particle must sit in an axis component; for each interval
    component not containing an endpoint, the labels inside must sum to
    the knot class of its block.  Components containing an endpoint are
    unconstrained.  Returns None when a block class is UNKNOWN and the
    answer depends on it.
    """
    from .geometry import axis_decomposition, knot_blocks, rope_type
    from .knots import identify

    dec = axis_decomposition(rope)
    comps = dec.a_components
    membership: dict[int, list[MonoidElement]] = {k: [] for k in range(len(comps))}
    for pos, label in c.particles:
        home = None
        for k, comp in enumerate(comps):
            if comp.lo - 1e-12 <= pos <= comp.hi + 1e-12:
                home = k
                break
        if home is None:
            return False
        membership[home].append(label)
    indeterminate = False
    blocks = dict(knot_blocks(rope))
    for k, comp in enumerate(comps):
        if comp.contains_a or comp.contains_b or comp.is_point:
            continue
        block = blocks.get(comp)
        if block is None:
            continue
        cls = identify(block)
        inside = MonoidElement.unit()
        for label in membership[k]:
            inside = msum(inside, label)
        if cls.is_unknown:
            indeterminate = True
            continue
        if MonoidElement(cls.primes) != inside:
            return False
    _ = rope_type
    return None if indeterminate else True
