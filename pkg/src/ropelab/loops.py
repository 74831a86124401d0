"""Loops in rope space: the tie-and-push generator and event bookkeeping.

A loop is a one-parameter family of ropes starting and ending at the
tight rope.  Its class is read off from the isolated moments where the
rope touches one of the two rays of the extension (the x-axis left of A
or right of B): at each such event the knot class of the extension
jumps, and the sum of the jumps over left-ray events is the loop's value
in the group completion of the knot monoid.

The tie-and-push family realizes +k for a twist knot k.  Near A the
rope grows a hanging ring and threads a twisted finger bight through
it; the finger's apex rises through the left ray (one left event,
unknot to k) and tucks back over the structure, leaving a knotted ball
with its apex parked above.  The ball slides toward B until the apex
pokes past x = 1 and drops through the right ray (one right event, k to
unknot); the now-trivial tangle is then dismantled in place by running
the tying moves backwards, which touches no ray because the structure
sits strictly inside 0 < x < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .errors import NotInSpaceError, TemplateTooLongError
from .geometry import (
    A_POINT,
    B_POINT,
    Rope,
    arclengths,
    extend,
    is_short,
    polyline_length,
    resample_polyline,
    tight_rope,
)
from .knots import KnotClass, identify
from .monoid import GrothendieckElement, complete

#: number of samples per frame
FRAME_SAMPLES = 768
#: bisection tolerance for event times
EVENT_DT = 1e-6
#: two events closer than this are flagged non-generic
EVENT_GAP = 2e-6

#: finger twist count realizing each supported prime knot
TWIST_COUNTS = {"3_1": -1, "4_1": 0}


def _smoothstep(t: float) -> float:
    t = min(1.0, max(0.0, t))
    return t * t * (3.0 - 2.0 * t)


def _lerp(a, b, w: float):
    return tuple(ai + w * (bi - ai) for ai, bi in zip(a, b))


def _piecewise(points, w: float):
    """Position along a chain of waypoints at fraction w of its segments."""
    n = len(points) - 1
    u = min(max(w, 0.0), 1.0) * n
    i = min(int(u), n - 1)
    return _lerp(points[i], points[i + 1], u - i)


# ---------------------------------------------------------------------------
# structure geometry


@dataclass
class _Structure:
    """One ring-and-finger assembly in structure-local coordinates."""

    twists: int = 0
    scale: float = 1.0  # similarity factor about the anchor
    shift: float = 0.0  # translation along the axis
    ring_open: float = 1.0  # 0 = flat, 1 = full hanging curl
    f_scale: float = 1.0  # finger growth factor (0 = absent)
    hinge_x: float = 0.05  # where the shaft ends and the free route begins
    apex: tuple = (-0.10, 0.0, -0.105)  # (x, y, z) of the finger fold
    elbow: tuple | None = None  # optional route waypoint before the apex
    anchor: float = 0.23  # scaling center on the axis

    # fixed layout (full size)
    ring_x: float = 0.17
    ring_r: float = 0.055
    depth: float = 0.105  # shaft depth below the axis
    pair_sep: float = 0.028  # half-gap of the finger strand pair
    base_x: float = 0.30  # finger attachment


def _round_corners(pts: np.ndarray, radius: float, min_angle: float = 0.2) -> np.ndarray:
    """Replace sharp polyline corners with circular fillet arcs."""
    out = [pts[0]]
    for i in range(1, len(pts) - 1):
        a, b, c = out[-1], pts[i], pts[i + 1]
        u = b - a
        v = c - b
        lu, lv = np.linalg.norm(u), np.linalg.norm(v)
        if lu < 1e-12 or lv < 1e-12:
            continue
        u /= lu
        v /= lv
        phi = math.acos(float(np.clip(u @ v, -1.0, 1.0)))
        if phi < min_angle or phi > math.pi - 1e-3:
            out.append(b)
            continue
        t = min(radius * math.tan(0.5 * phi), 0.45 * lu, 0.45 * lv)
        r_eff = t / math.tan(0.5 * phi)
        center = b + (r_eff / math.cos(0.5 * phi)) * (v - u) / np.linalg.norm(v - u)
        w1 = (b - t * u) - center
        axis = np.cross(w1, (b + t * v) - center)
        na = np.linalg.norm(axis)
        if na < 1e-12:
            out.append(b)
            continue
        axis /= na
        steps = max(2, int(math.ceil(phi / 0.12)))
        for s in np.linspace(0.0, phi, steps + 1):
            out.append(center + math.cos(s) * w1 + math.sin(s) * np.cross(axis, w1))
    out.append(pts[-1])
    return np.array(out)


def _ring_points(st: _Structure) -> np.ndarray:
    """Hanging curl below the axis; ring_open flattens it onto the axis."""
    w = st.ring_open
    xr = st.ring_x
    rr = st.ring_r * w
    zc = st.depth * w
    g = 0.045
    phi0 = 0.6
    lo = phi0 + (1.0 - math.sqrt(w)) * (math.pi - phi0)
    phi = np.linspace(lo, 2.0 * math.pi - lo, 40)
    circle = np.column_stack(
        [
            np.full_like(phi, xr),
            rr * np.sin(phi),
            -zc + rr * np.cos(phi),
        ]
    )
    # legs meet the curl tangentially via quadratic Bezier blends
    c0 = circle[0]
    c1 = circle[-1]
    t0 = np.array([0.0, math.cos(lo), -math.sin(lo)])
    t1 = np.array([0.0, math.cos(lo), math.sin(lo)])
    k = 0.03 * max(w, 0.2)
    a0 = np.array([xr - g, 0.0, 0.0])
    a1 = np.array([xr + g, 0.0, 0.0])
    u = np.linspace(0.0, 1.0, 9)[:, None]
    enter = (1 - u) ** 2 * a0 + 2 * u * (1 - u) * (c0 - k * t0) + u**2 * c0
    exit_ = (1 - u) ** 2 * c1 + 2 * u * (1 - u) * (c1 + k * t1) + u**2 * a1
    return np.vstack([enter[:-1], circle, exit_[1:]])


def _finger_points(st: _Structure) -> np.ndarray:
    """Twisted strand pair from the base, through the ring, to the apex."""
    zc, d = st.depth, st.pair_sep
    mid = st.base_x
    route = [
        (mid, 0.0, 0.0),
        (mid, 0.0, -zc),
        (st.hinge_x, 0.0, -zc),
    ]
    if st.elbow is not None:
        route.append(tuple(st.elbow))
    route.append(tuple(st.apex))
    ctrl = np.array(route)
    if st.f_scale < 1.0:
        base = np.array([mid, 0.0, 0.0])
        ctrl = base + st.f_scale * (ctrl - base)
    d = d * math.sqrt(st.f_scale)
    ctrl = _round_corners(ctrl, 0.035)
    center = resample_polyline(ctrl, 240)
    s = arclengths(center)
    total = max(s[-1], 1e-9)
    s = s / total
    tang = np.gradient(center, axis=0)
    norms = np.linalg.norm(tang, axis=1, keepdims=True)
    tang = tang / np.maximum(norms, 1e-12)
    # twist the pair on the horizontal run between the base corner and
    # the ring plane, where the route is straight in every stage
    ramp = np.clip((s * total - 0.15) / 0.08, 0.0, 1.0)
    fade = min(1.0, max(0.0, (st.f_scale - 0.55) / 0.45))
    theta = st.twists * math.pi * ramp * (fade * fade * (3.0 - 2.0 * fade))
    taper = np.clip(s * total / (0.02 + 0.06 * st.f_scale), 0.0, 1.0)
    y_hat = np.array([0.0, 1.0, 0.0])
    n2 = np.cross(tang, y_hat)
    n2n = np.linalg.norm(n2, axis=1, keepdims=True)
    n2 = n2 / np.maximum(n2n, 1e-12)
    off = (d * taper)[:, None] * (
        np.cos(theta)[:, None] * y_hat[None, :] + np.sin(theta)[:, None] * n2
    )
    # separate the two base attachments along the axis
    split = (0.035 * st.f_scale * (1.0 - taper))[:, None] * np.array([1.0, 0.0, 0.0])
    out = center + off - split
    back = center - off + split
    # U-turn cap at the apex: a true semicircle in the plane spanned by
    # the end offset and the tangent component orthogonal to it
    v = out[-1] - center[-1]
    vn_ = np.linalg.norm(v)
    v_hat = v / max(vn_, 1e-12)
    t_perp = tang[-1] - float(tang[-1] @ v_hat) * v_hat
    tp = np.linalg.norm(t_perp)
    if tp < 1e-9:
        t_perp = np.cross(v_hat, np.array([0.0, 0.0, 1.0]))
        tp = np.linalg.norm(t_perp)
    w2 = (vn_ / max(tp, 1e-12)) * t_perp
    cap_t = np.linspace(0.0, 1.0, 16)[1:-1]
    cap = (
        center[-1][None, :]
        + np.cos(math.pi * cap_t)[:, None] * v[None, :]
        + np.sin(math.pi * cap_t)[:, None] * w2[None, :]
    )
    return np.vstack([out, cap, back[::-1]])


def _structure_points(st: _Structure) -> np.ndarray:
    parts = []
    if st.ring_open > 1e-9:
        parts.append(_ring_points(st))
    if st.f_scale > 1e-9:
        parts.append(_finger_points(st))
    if not parts:
        return np.empty((0, 3))
    pts = np.vstack(parts)
    anchor = np.array([st.anchor, 0.0, 0.0])
    pts = anchor + st.scale * (pts - anchor)
    pts[:, 0] += st.shift
    return pts


def assemble(structures: list[_Structure], n: int = FRAME_SAMPLES,
             smooth_arc: float = 0.007) -> Rope:
    """Rope through the given assemblies in order of axis position."""
    parts: list[np.ndarray] = [np.array([A_POINT])]
    placed = sorted(
        (st for st in structures if st.scale > 1e-9),
        key=lambda st: st.anchor + st.shift,
    )
    for st in placed:
        pts = _structure_points(st)
        if len(pts):
            parts.append(pts)
    parts.append(np.array([B_POINT]))
    poly = np.vstack(parts)
    keep = np.ones(len(poly), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(poly, axis=0), axis=1) > 1e-12
    poly = poly[keep]
    poly = _round_corners(poly, 0.035)
    dense = resample_polyline(poly, 1600)
    sigma = smooth_arc * 1600.0 / max(polyline_length(dense), 1e-9)
    dense = gaussian_filter1d(dense, sigma=sigma, axis=0, mode="nearest")
    dense[0] = A_POINT
    dense[-1] = B_POINT
    return Rope(resample_polyline(dense, n - 1))


# ---------------------------------------------------------------------------
# rope families


@dataclass
class RopeFamily:
    """Ordered (T, rope) frames of a path or loop in a rope space."""

    frames: list[tuple[float, Rope]]
    n_T: int

    def rope_at(self, T: float) -> Rope:
        """Linear interpolation between the neighbouring frames."""
        times = np.array([t for t, _ in self.frames])
        i = int(np.clip(np.searchsorted(times, T) - 1, 0, len(times) - 2))
        t0, r0 = self.frames[i]
        t1, r1 = self.frames[i + 1]
        w = 0.0 if t1 <= t0 else (T - t0) / (t1 - t0)
        w = min(1.0, max(0.0, w))
        pts = (1.0 - w) * r0.samples + w * r1.samples
        pts[0] = A_POINT
        pts[-1] = B_POINT
        return Rope(pts)


def reverse_family(fam: RopeFamily) -> RopeFamily:
    frames = [(1.0 - t, r) for t, r in reversed(fam.frames)]
    return RopeFamily(frames, fam.n_T)


def concat_families(a: RopeFamily, b: RopeFamily) -> RopeFamily:
    """Run a on [0, 1/2] then b on [1/2, 1]."""
    frames = [(0.5 * t, r) for t, r in a.frames]
    frames += [(0.5 + 0.5 * t, r) for t, r in b.frames if t > 0.0]
    return RopeFamily(frames, a.n_T + b.n_T)


# ---------------------------------------------------------------------------
# tie-and-push choreography

#: apex stations in structure-local (x, y, z) coordinates
_REST = (-0.10, 0.0, -0.105)
_UP = (-0.10, 0.0, 0.12)
_PARK = (0.45, 0.0, 0.14)
_DOWN = (0.45, 0.0, -0.12)
_OVER = (0.20, 0.0, 0.16)  # elbow routing the strand over the structure
_MID = (-0.025, 0.0, 0.0075)  # elbow resting on the hinge-apex chord
_TH_END = (0.03, 0.0, -0.105)  # apex as the threading finishes


def _st(m: int, *, scale=1.0, shift=0.0, ring=1.0, f=1.0, hinge=0.05,
        apex=_REST, elbow=None) -> _Structure:
    return _Structure(
        twists=m, scale=scale, shift=shift, ring_open=ring, f_scale=f,
        hinge_x=hinge, apex=apex, elbow=elbow,
    )


def _grow(w: float, floor: float = 0.24) -> float:
    """Formation ramp with a floor so features never shrink below the
    sampling resolution (a vanishing curl or tongue would otherwise turn
    into an unresolvable cusp)."""
    return floor + (1.0 - floor) * _smoothstep(w)


def _tie_stages(m: int, park_scale: float, extra=lambda: [], sc=1.0, sh=0.0,
                park_sh=None, park_apex=_PARK, park_elbow=_OVER, tuck_wt=10):
    """Stages taking a flat axis to a tucked knotted ball.

    The structure forms at overall scale sc, offset sh (the raise still
    reaches x < 0 provided sc and sh keep the apex station left of A).
    extra() supplies any other structures present throughout (so two-knot
    loops can tie the second knot while the first sits parked near B).
    The final stage morphs scale/shift toward the parked values while the
    apex retracts from the raised station to park_apex.
    """
    if park_sh is None:
        park_sh = sh
    park_path = park_apex if isinstance(park_apex, list) else [_UP, park_apex]
    elbow_path = park_elbow if isinstance(park_elbow, list) else [_MID, park_elbow]
    g = max(0.24, 0.20 / sc)

    def base(**kw):
        kw.setdefault("scale", sc)
        kw.setdefault("shift", sh)
        return [_st(m, **kw)] + extra()

    return [
        (6, lambda w: base(ring=_grow(w, g), f=0.0)),
        (7, lambda w: base(f=_grow(w, g), hinge=0.30,
                           apex=(0.30, 0.0, -0.105))),
        (3, lambda w: base(hinge=0.30 - 0.04 * _grow(w, g),
                           apex=_lerp((0.30, 0.0, -0.105),
                                      (0.24, 0.0, -0.105),
                                      _grow(w, g)))),
        (8, lambda w: base(hinge=(h := 0.26 + w * (0.05 - 0.26)),
                           apex=(h - 0.02, 0.0, -0.105))),
        (4, lambda w: base(apex=_lerp(_TH_END, _REST, _smoothstep(w)))),
        (8, lambda w: base(apex=_lerp(_REST, _UP, _smoothstep(w)))),
        (tuck_wt, lambda w: base(
            scale=sc + _smoothstep(w) * (park_scale - sc),
            shift=sh + _smoothstep(w) * (park_sh - sh),
            apex=_piecewise(park_path, _smoothstep(w)),
            elbow=_piecewise(elbow_path, _smoothstep(w)),
        )),
    ]


def _untie_stages(m: int, scale: float, shift: float, start_apex=_DOWN,
                  start_elbow=_OVER, extra=lambda: [], wt: float = 1.0):
    """Stages dismantling a shed (trivial) tangle at a fixed position.

    The apex swings back left below the axis (at a y-offset so it clears
    both the rope and the rays) to its pre-raise rest point, then the
    remaining tying moves run backwards: un-thread, shrink, flatten.  The
    raised position is never revisited, so no events occur here.
    """
    swing_path = [start_apex, start_apex, (0.42, 0.12, -0.22),
                  (0.10, 0.14, -0.22), (-0.08, 0.10, -0.16), _REST]
    elbow_path = [start_elbow, (0.20, 0.16, 0.16), (0.20, 0.16, -0.16),
                  (0.16, 0.12, -0.18), (0.02, 0.08, -0.15),
                  (-0.02, 0.0, -0.105)]

    g = max(0.24, 0.20 / scale)

    def base(**kw):
        return [_st(m, scale=scale, shift=shift, **kw)] + extra()

    return [
        (16 * wt, lambda w: base(apex=_piecewise(swing_path, _smoothstep(w)),
                                 elbow=_piecewise(elbow_path, _smoothstep(w)))),
        (8 * wt, lambda w: base(
            hinge=(h := 0.05 + max(0.0, (w - 0.3) / 0.7) * (0.26 - 0.05)),
            apex=_lerp(_REST, _TH_END, min(w / 0.3, 1.0)) if w < 0.3
            else (h - 0.02, 0.0, -0.105),
        )),
        (3 * wt, lambda w: base(hinge=0.30 - 0.04 * _grow(1.0 - w, g),
                                apex=_lerp((0.30, 0.0, -0.105),
                                           (0.24, 0.0, -0.105),
                                           _grow(1.0 - w, g)))),
        (4 * wt, lambda w: base(f=_grow(1.0 - w, g), hinge=0.30,
                                apex=(0.30, 0.0, -0.105))),
        (6 * wt, lambda w: base(ring=_grow(1.0 - w, g), f=0.0)),
    ]


def _single_stages(m: int):
    sc, sh = 0.8, 0.63
    stages = _tie_stages(m, sc)
    stages += [
        (12, lambda w: [_st(m, scale=sc, shift=_smoothstep(w) * sh,
                            apex=_PARK, elbow=_OVER)]),
        (8, lambda w: [_st(m, scale=sc, shift=sh,
                           apex=_lerp(_PARK, _DOWN, _smoothstep(w)),
                           elbow=_OVER)]),
    ]
    stages += _untie_stages(m, sc, sh)
    return stages


def _double_stages(m1: int, m2: int):
    """Tie k1, park it near B, tie k2, shed k2 at B, then shed k1."""
    p_sc, p_sh = 0.40, 0.69  # first ball parked compactly just left of B
    # the tip stays above the axis plane: dipping it below would drag the
    # strand under the rope and undo the raise crossing
    p_apex = (0.22, 0.0, 0.10)
    p_elbow = (0.16, 0.0, 0.12)
    park_path = [_UP, p_apex]
    park_elb = [_MID, p_elbow]
    t2_sh = -0.12  # second knot ties smaller and nudged left so its
    t2_sc = 0.60   # raise still crosses x = 0
    c2_sc, c2_sh = 0.42, 0.56  # ... then carried toward B
    c2_apex = (0.26, 0.0, 0.10)
    ext2 = (0.83, 0.0, 0.19)
    down2 = (0.83, 0.0, -0.06)
    e2 = (0.62, 0.0, 0.30)  # high elbow so the drop strand clears ball 1
    r_sc, r_sh = 0.60, 0.65  # first ball re-inflated for its own shed
    ext1 = (0.53, 0.0, 0.20)
    down1 = (0.53, 0.0, -0.12)
    wake_path = [p_apex, (0.40, 0.0, 0.20), ext1]
    wake_elb = [p_elbow, _OVER]

    def park1():
        return [_st(m1, scale=p_sc, shift=p_sh, apex=p_apex, elbow=p_elbow)]

    stages = _tie_stages(m1, p_sc, park_sh=p_sh, park_apex=park_path,
                         park_elbow=park_elb, tuck_wt=30)
    stages += _tie_stages(m2, c2_sc, extra=park1, sc=t2_sc, sh=t2_sh,
                          park_sh=t2_sh, park_apex=c2_apex)
    stages += [
        # carry the second ball toward B, then poke its apex past x = 1
        (36, lambda w: [_st(m2, scale=c2_sc,
                            shift=t2_sh + _smoothstep(w) * (c2_sh - t2_sh),
                            apex=c2_apex, elbow=_OVER)] + park1()),
        (6, lambda w: [_st(m2, scale=c2_sc, shift=c2_sh,
                           apex=_lerp(c2_apex, ext2, _smoothstep(w)),
                           elbow=_lerp(_OVER, e2, _smoothstep(w)))] + park1()),
        (6, lambda w: [_st(m2, scale=c2_sc, shift=c2_sh,
                           apex=_lerp(ext2, down2, _smoothstep(w)),
                           elbow=e2)] + park1()),
    ]
    stages += _untie_stages(m2, c2_sc, c2_sh, start_apex=down2,
                            start_elbow=e2, extra=park1, wt=1.4)
    stages += [
        # re-inflate the first ball and lift its tip over B
        (10, lambda w: [_st(
            m1,
            scale=p_sc + _smoothstep(w) * (r_sc - p_sc),
            shift=p_sh + _smoothstep(w) * (r_sh - p_sh),
            apex=_piecewise(wake_path, _smoothstep(w)),
            elbow=_piecewise(wake_elb, _smoothstep(w)),
        )]),
        (6, lambda w: [_st(m1, scale=r_sc, shift=r_sh,
                           apex=_lerp(ext1, down1, _smoothstep(w)),
                           elbow=_OVER)]),
    ]
    stages += _untie_stages(m1, r_sc, r_sh, start_apex=down1, wt=2.0)
    return stages


def _phase(stages, tau: float):
    total = sum(wt for wt, _ in stages)
    acc = 0.0
    for wt, fn in stages:
        frac = wt / total
        if tau <= acc + frac or (wt, fn) is stages[-1]:
            return fn(min(1.0, max(0.0, (tau - acc) / frac)))
        acc += frac
    return stages[-1][1](1.0)


def tie_and_push(k: KnotClass | str, eps: float, n_T: int | None = None) -> RopeFamily:
    """Loop that ties k near A, carries it to B, and sheds it there.

    The unknot gives the constant family.  Supported classes are the
    table twist knots and two-prime connected sums of them.  The default
    frame count (384 for one prime factor, 896 for two) keeps consecutive
    frames within the c1 density that event detection assumes.
    """
    if isinstance(k, str):
        labels = [] if k in ("0_1", "unknot") else k.split("#")
        k = KnotClass.of(*labels)
    if k.is_unknot:
        if n_T is None:
            n_T = 384
        r = tight_rope(FRAME_SAMPLES - 1)
        frames = [(i / n_T, r) for i in range(n_T + 1)]
        return RopeFamily(frames, n_T)
    primes = list(k.primes)
    if n_T is None:
        n_T = 384 if len(primes) == 1 else 896
    for p in primes:
        if p not in TWIST_COUNTS:
            raise TemplateTooLongError(f"no tie template for {p}")
    if len(primes) == 1:
        stages = _single_stages(TWIST_COUNTS[primes[0]])
    elif len(primes) == 2:
        stages = _double_stages(TWIST_COUNTS[primes[0]], TWIST_COUNTS[primes[1]])
    else:
        raise TemplateTooLongError("at most two prime factors supported")
    # rope-length overhead check on the fully raised keyframe
    peak = assemble(_phase(stages, 0.27 if len(primes) == 1 else 0.615))
    overhead = polyline_length(peak.samples) - 1.0
    if overhead > eps - 0.1:
        raise TemplateTooLongError(
            f"template overhead {overhead:.2f} exceeds eps - 0.1 = {eps - 0.1:.2f}"
        )
    frames = []
    for i in range(n_T + 1):
        tau = i / n_T
        if i == 0 or i == n_T:
            frames.append((tau, tight_rope(FRAME_SAMPLES - 1)))
        else:
            frames.append((tau, assemble(_phase(stages, tau))))
    return RopeFamily(frames, n_T)


# ---------------------------------------------------------------------------
# event detection


@dataclass
class EventReport:
    """Left and right ray events of a loop, with classes on both sides."""

    left_events: list[tuple[float, KnotClass, KnotClass]] = field(default_factory=list)
    right_events: list[tuple[float, KnotClass, KnotClass]] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def generic(self) -> bool:
        return not self.flags


def _punctures(samples: np.ndarray, side: str) -> np.ndarray:
    """(x, z) of rope intersections with the half-plane of one ray."""
    y = samples[:, 1]
    flips = np.nonzero(y[:-1] * y[1:] < 0.0)[0]
    out = []
    for i in flips:
        w = y[i] / (y[i] - y[i + 1])
        p = samples[i] + w * (samples[i + 1] - samples[i])
        if (side == "left" and p[0] < 0.0) or (side == "right" and p[0] > 1.0):
            out.append((p[0], p[2]))
    return np.array(out).reshape(-1, 2)


def loop_verify(fam: RopeFamily, eps: float) -> EventReport:
    """Locate ray events of the family and identify classes on both sides.

    Events are z sign changes of tracked ray-plane punctures between
    consecutive frames, refined by bisection on the linear interpolation
    of the two frames.
    """
    for idx, (t, r) in enumerate(fam.frames):
        if not is_short(r, eps):
            raise NotInSpaceError(f"frame {idx} is not in B_eps")
    report = EventReport()
    events: list[tuple[float, str]] = []
    for i in range(len(fam.frames) - 1):
        t0, r0 = fam.frames[i]
        t1, r1 = fam.frames[i + 1]
        for side in ("left", "right"):
            events.extend(
                (t, side) for t in _pair_events(r0.samples, r1.samples, t0, t1, side)
            )
    events.sort()
    for j, (t, side) in enumerate(events):
        if j > 0 and abs(t - events[j - 1][0]) < EVENT_GAP:
            report.flags.append(f"events coincide near T={t:.6f}")
        before, after = _classes_around(fam, t)
        entry = (t, before, after)
        if side == "left":
            report.left_events.append(entry)
        else:
            report.right_events.append(entry)
    return report


def _pair_events(s0: np.ndarray, s1: np.ndarray, t0: float, t1: float,
                 side: str) -> list[float]:
    """Event times within [t0, t1] for one ray, by puncture tracking."""
    n_sub = 8
    found = []
    prev = _punctures(s0, side)
    prev_w = 0.0
    for j in range(1, n_sub + 1):
        w = j / n_sub
        cur = _punctures((1.0 - w) * s0 + w * s1, side)
        for p in prev:
            if len(cur) == 0:
                continue
            d = np.linalg.norm(cur - p[None, :], axis=1)
            q = cur[int(np.argmin(d))]
            if d.min() > 0.15:
                continue
            if p[1] * q[1] < 0.0:
                lo, hi, pl = prev_w, w, p
                while (hi - lo) * (t1 - t0) > EVENT_DT:
                    mid = 0.5 * (lo + hi)
                    pm = _punctures((1.0 - mid) * s0 + mid * s1, side)
                    if len(pm) == 0:
                        break
                    dm = np.linalg.norm(pm - pl[None, :], axis=1)
                    qm = pm[int(np.argmin(dm))]
                    if pl[1] * qm[1] < 0.0:
                        hi = mid
                    else:
                        lo, pl = mid, qm
                found.append(t0 + 0.5 * (lo + hi) * (t1 - t0))
        prev, prev_w = cur, w
    return found


def _classes_around(fam: RopeFamily, t: float) -> tuple[KnotClass, KnotClass]:
    dt = 2.0 / fam.n_T
    before = identify(extend(fam.rope_at(max(0.0, t - dt))))
    after = identify(extend(fam.rope_at(min(1.0, t + dt))))
    return before, after


def loop_class(report: EventReport) -> GrothendieckElement:
    """Sum over left-ray events of complete(after) - complete(before)."""
    total = GrothendieckElement.zero()
    for _, before, after in report.left_events:
        total = total + complete(after.to_monoid()) - complete(before.to_monoid())
    return total
