"""Ropes as dense polylines and their axis-projection quantities.

A rope is an embedded arc in 3-space from A = (0,0,0) to B = (1,0,0),
represented by ordered samples.  The functions here compute lengths and
projected lengths, the decomposition of the AB axis into multivalued
("A") and single-valued ("Z") parts, long-curve extensions by axis
rays, and the C1-style distance between ropes on a common grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    ContainsEndpointError,
    GridMismatchError,
    InvalidRopeError,
    NonGenericContactError,
    NonGenericFiberError,
)

A_POINT = np.array([0.0, 0.0, 0.0])
B_POINT = np.array([1.0, 0.0, 0.0])
X_AXIS = np.array([1.0, 0.0, 0.0])

#: turning-angle cap per segment pair (smoothness surrogate), radians
THETA_MAX = math.radians(30.0)
#: tolerance for "tangent orthogonal to AB" detection, radians
TOL_ORTH = 1e-6
#: fiber tolerance for multiplicity queries
TOL_X = 1e-9
#: gap below which adjacent axis components are merged
MERGE_GAP = 1e-7
#: contact tolerance between a curve and an extension ray
TOL_SING = 1e-4
#: minimal transversality angle at a ray contact, radians
TOL_TANG = 1e-3


@dataclass(frozen=True)
class Rope:
    """Polyline rope from A to B; ``samples`` has shape (N+1, 3), N >= 8."""

    samples: np.ndarray
    tangent_a: np.ndarray | None = None
    tangent_b: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", pts)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 9:
            raise InvalidRopeError("need at least 9 samples of shape (N+1, 3)")
        if not np.all(np.isfinite(pts)):
            raise InvalidRopeError("non-finite coordinates")
        if not (np.array_equal(pts[0], A_POINT) and np.array_equal(pts[-1], B_POINT)):
            raise InvalidRopeError("endpoints must be exactly (0,0,0) and (1,0,0)")
        seg = np.diff(pts, axis=0)
        if np.any(np.linalg.norm(seg, axis=1) == 0.0):
            raise InvalidRopeError("consecutive samples must be distinct")
        for name in ("tangent_a", "tangent_b"):
            t = getattr(self, name)
            if t is not None:
                t = np.asarray(t, dtype=float)
                n = np.linalg.norm(t)
                if not np.isfinite(n) or n == 0.0:
                    raise InvalidRopeError(f"{name} must be a nonzero vector")
                object.__setattr__(self, name, t / n)

    @property
    def n_segments(self) -> int:
        return self.samples.shape[0] - 1

    def segment_vectors(self) -> np.ndarray:
        return np.diff(self.samples, axis=0)

    def endpoint_tangent(self, end: int) -> np.ndarray:
        """Unit tangent at A (end=0) or B (end=1), finite-difference fallback."""
        if end == 0:
            if self.tangent_a is not None:
                return self.tangent_a
            v = self.samples[1] - self.samples[0]
        else:
            if self.tangent_b is not None:
                return self.tangent_b
            v = self.samples[-1] - self.samples[-2]
        return v / np.linalg.norm(v)


@dataclass(frozen=True)
class LongCurve:
    """PL core plus two half-infinite rays parallel to the x-axis.

    For a rope extension the rays exit through A leftward and B rightward;
    knot blocks carry rays through the slab entry/exit points instead.
    """

    core: np.ndarray
    left_dir: np.ndarray = field(default_factory=lambda: np.array([-1.0, 0.0, 0.0]))
    right_dir: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))

    def __post_init__(self):
        object.__setattr__(self, "core", np.asarray(self.core, dtype=float))

    @property
    def left_base(self) -> np.ndarray:
        return self.core[0]

    @property
    def right_base(self) -> np.ndarray:
        return self.core[-1]

    def truncated(self, ray_length: float | None = None) -> np.ndarray:
        """Core with rays truncated to finite stubs, as one polyline."""
        if ray_length is None:
            span = np.ptp(self.core, axis=0).max()
            ray_length = 2.0 * max(span, 1.0)
        left = self.left_base + ray_length * self.left_dir
        right = self.right_base + ray_length * self.right_dir
        return np.vstack([left, self.core, right])


@dataclass(frozen=True)
class AxisComponent:
    lo: float
    hi: float

    @property
    def is_point(self) -> bool:
        return self.hi - self.lo <= 2.0 * MERGE_GAP

    @property
    def contains_a(self) -> bool:
        return self.lo <= MERGE_GAP

    @property
    def contains_b(self) -> bool:
        return self.hi >= 1.0 - MERGE_GAP

    @property
    def kind(self) -> str:
        if self.contains_a:
            return "contains-A"
        if self.contains_b:
            return "contains-B"
        return "point" if self.is_point else "interval"


@dataclass(frozen=True)
class AxisDecomposition:
    """A(r) as merged components; Z(r) is the complement inside [0,1]."""

    a_components: tuple[AxisComponent, ...]
    z_components: tuple[tuple[float, float], ...]
    l_a: float
    l_z: float


# ---------------------------------------------------------------------------
# basic measures


def polyline_length(points: np.ndarray) -> float:
    return float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum())


def arclengths(points: np.ndarray) -> np.ndarray:
    """Cumulative arclength per sample, starting at 0."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def resample_polyline(points: np.ndarray, n: int) -> np.ndarray:
    """n+1 points at equal arclength spacing along the same polyline."""
    s = arclengths(points)
    total = s[-1]
    targets = np.linspace(0.0, total, n + 1)
    out = np.empty((n + 1, 3))
    idx = np.searchsorted(s, targets, side="right") - 1
    idx = np.clip(idx, 0, len(points) - 2)
    seg_len = s[idx + 1] - s[idx]
    frac = np.where(seg_len > 0, (targets - s[idx]) / np.where(seg_len > 0, seg_len, 1.0), 0.0)
    out = points[idx] + frac[:, None] * (points[idx + 1] - points[idx])
    out[0] = points[0]
    out[-1] = points[-1]
    return out


def resample_arclength(rope: Rope, n: int) -> Rope:
    """Resample to n+1 equal-arclength samples; endpoints kept exact."""
    if n < 8:
        raise InvalidRopeError("resample_arclength requires n >= 8")
    pts = resample_polyline(rope.samples, n)
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts, rope.tangent_a, rope.tangent_b)


def measures(rope: Rope | np.ndarray) -> dict:
    """Total length l, axis-projected length l_x, transverse length l_yz."""
    pts = rope.samples if isinstance(rope, Rope) else np.asarray(rope, dtype=float)
    seg = np.diff(pts, axis=0)
    l = float(np.linalg.norm(seg, axis=1).sum())
    l_x = float(np.abs(seg[:, 0]).sum())
    l_yz = float(np.linalg.norm(seg[:, 1:], axis=1).sum())
    return {"l": l, "l_x": l_x, "l_yz": l_yz}


def is_short(rope: Rope, eps: float) -> bool:
    """Membership in the space of ropes of length < 1 + eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return measures(rope)["l"] < 1.0 + eps


# ---------------------------------------------------------------------------
# fibers and the axis decomposition


def multiplicity(rope: Rope, x: float, _retried: bool = False) -> int:
    """Number of transversal intersections of the rope with the plane {x}."""
    xs = rope.samples[:, 0]
    if np.any(np.abs(xs - x) < TOL_X):
        if not _retried:
            return multiplicity(rope, x + 1e-9, _retried=True)
        raise NonGenericFiberError(f"fiber at x={x} passes through a sample")
    x0, x1 = xs[:-1], xs[1:]
    return int(np.count_nonzero((x0 - x) * (x1 - x) < 0.0))


def _coverage_intervals(rope: Rope) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints b and per-cell fiber counts n on (b[i], b[i+1])."""
    xs = rope.samples[:, 0]
    lo = np.minimum(xs[:-1], xs[1:])
    hi = np.maximum(xs[:-1], xs[1:])
    bounds = np.unique(np.concatenate([lo, hi]))
    mids = 0.5 * (bounds[:-1] + bounds[1:])
    counts = ((lo[None, :] < mids[:, None]) & (mids[:, None] < hi[None, :])).sum(axis=1)
    return bounds, counts


def _merge_intervals(intervals: list[tuple[float, float]], gap: float) -> list[tuple[float, float]]:
    if not intervals:
        return []
    intervals = sorted(intervals)
    merged = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1] + gap:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def axis_decomposition(rope: Rope) -> AxisDecomposition:
    """Split the axis into the multivalued/orthogonal part A(r) and Z(r).

    A(r) is the closure of the fiber-count >= 2 region, together with the
    x-extents of segments within TOL_ORTH of orthogonal to the axis and
    endpoint-tangent orthogonality points.  l_a integrates the fiber count
    n(x) over A(r); l_z is the Lebesgue measure of the complement in [0,1].
    """
    bounds, counts = _coverage_intervals(rope)
    raw: list[tuple[float, float]] = [
        (bounds[i], bounds[i + 1]) for i in range(len(counts)) if counts[i] >= 2
    ]
    seg = rope.segment_vectors()
    seg_len = np.linalg.norm(seg, axis=1)
    ortho = np.abs(seg[:, 0]) <= math.sin(TOL_ORTH) * seg_len
    xs = rope.samples[:, 0]
    for i in np.nonzero(ortho)[0]:
        lo, hi = sorted((xs[i], xs[i + 1]))
        raw.append((lo, hi))
    for end, x_end in ((0, 0.0), (1, 1.0)):
        t = rope.endpoint_tangent(end)
        if abs(t[0]) <= math.sin(TOL_ORTH):
            raw.append((x_end, x_end))
    comps = tuple(
        AxisComponent(lo, hi) for lo, hi in _merge_intervals(raw, MERGE_GAP)
    )

    # integrate n(x) over A(r) segment by segment
    l_a = 0.0
    lo_seg = np.minimum(xs[:-1], xs[1:])
    hi_seg = np.maximum(xs[:-1], xs[1:])
    for c in comps:
        overlap = np.clip(np.minimum(hi_seg, c.hi) - np.maximum(lo_seg, c.lo), 0.0, None)
        l_a += float(overlap.sum())

    z: list[tuple[float, float]] = []
    cursor = 0.0
    for c in comps:
        lo = max(0.0, min(1.0, c.lo))
        hi = max(0.0, min(1.0, c.hi))
        if c.hi < 0.0 or c.lo > 1.0:
            continue
        if lo > cursor:
            z.append((cursor, lo))
        cursor = max(cursor, hi)
    if cursor < 1.0:
        z.append((cursor, 1.0))
    l_z = float(sum(hi - lo for lo, hi in z))
    return AxisDecomposition(comps, tuple(z), l_a, l_z)


def component_core(rope: Rope, comp: AxisComponent) -> np.ndarray:
    """Sub-polyline of the rope over an interval component of A(r)."""
    xs = rope.samples[:, 0]
    inside = (xs >= comp.lo - TOL_X) & (xs <= comp.hi + TOL_X)
    idx = np.nonzero(inside)[0]
    if len(idx) == 0:
        mid = 0.5 * (comp.lo + comp.hi)
        # component generated by a single long segment spanning it
        for i in range(rope.n_segments):
            a, b = xs[i], xs[i + 1]
            if min(a, b) <= mid <= max(a, b):
                return rope.samples[i : i + 2].copy()
        raise InvalidRopeError("axis component without rope support")
    first, last = idx[0], idx[-1]
    pts = [rope.samples[first]]
    if first > 0:
        # interpolate the exact entry point on the preceding segment
        a, b = rope.samples[first - 1], rope.samples[first]
        target = comp.lo if b[0] > a[0] else comp.hi
        if abs(b[0] - a[0]) > TOL_X:
            f = (target - a[0]) / (b[0] - a[0])
            if 0.0 < f < 1.0:
                pts.insert(0, a + f * (b - a))
    pts.extend(rope.samples[first + 1 : last + 1])
    if last < len(xs) - 1:
        a, b = rope.samples[last], rope.samples[last + 1]
        target = comp.hi if b[0] > a[0] else comp.lo
        if abs(b[0] - a[0]) > TOL_X:
            f = (target - a[0]) / (b[0] - a[0])
            if 0.0 < f < 1.0:
                pts.append(a + f * (b - a))
    return np.asarray(pts)


def knot_blocks(rope: Rope, decomp: AxisDecomposition | None = None):
    """One capped LongCurve per interval component of A(r).

    Point components yield a short trivial curve.  Components touching an
    endpoint carry no well-defined block and raise CONTAINS_ENDPOINT when
    accessed strictly; here they are skipped with a flag entry.
    """
    if decomp is None:
        decomp = axis_decomposition(rope)
    blocks = []
    for comp in decomp.a_components:
        if comp.contains_a or comp.contains_b:
            blocks.append((comp, None))
            continue
        if comp.is_point:
            mid = 0.5 * (comp.lo + comp.hi)
            core = np.array([[mid - 1e-3, 0.0, 0.0], [mid + 1e-3, 0.0, 0.0]])
            blocks.append((comp, LongCurve(core)))
            continue
        core = component_core(rope, comp)
        blocks.append((comp, LongCurve(core)))
    return blocks


def extend(rope: Rope) -> LongCurve:
    """The rope prolonged by rays along the x-axis beyond A and B."""
    return LongCurve(rope.samples.copy())


# ---------------------------------------------------------------------------
# self-distance, ray singularities, C1 metric


def _pairwise_segment_distances(p0, p1, q0, q1):
    """Vectorized min distance between segment sets [p0,p1] and [q0,q1]."""
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0[:, None, :] - q0[None, :, :]
    a = np.einsum("ij,ij->i", d1, d1)[:, None]
    e = np.einsum("ij,ij->i", d2, d2)[None, :]
    b = np.einsum("ik,jk->ij", d1, d2)
    c = np.einsum("ik,ijk->ij", d1, r)
    f = np.einsum("jk,ijk->ij", d2, r)
    denom = a * e - b * b
    s = np.where(denom > 1e-14, (b * f - c * e) / np.where(denom > 1e-14, denom, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.where(e > 1e-14, (f + b * s) / np.where(e > 1e-14, e, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    s = np.where(a > 1e-14, np.clip((b * t - c) / np.where(a > 1e-14, a, 1.0), 0.0, 1.0), 0.0)
    closest_p = p0[:, None, :] + s[:, :, None] * d1[:, None, :]
    closest_q = q0[None, :, :] + t[:, :, None] * d2[None, :, :]
    return np.linalg.norm(closest_p - closest_q, axis=2)


def min_self_distance(curve: Rope | LongCurve | np.ndarray, closed: bool = False) -> float:
    """Minimum distance between non-adjacent segment pairs (inf if none)."""
    if isinstance(curve, Rope):
        pts = curve.samples
    elif isinstance(curve, LongCurve):
        pts = curve.truncated()
    else:
        pts = np.asarray(curve, dtype=float)
    if closed:
        pts = np.vstack([pts, pts[:1]])
    p0, p1 = pts[:-1], pts[1:]
    n = len(p0)
    if n < 3:
        return math.inf
    dist = _pairwise_segment_distances(p0, p1, p0, p1)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    gap = np.abs(i - j)
    if closed:
        gap = np.minimum(gap, n - gap)
    mask = gap >= 2
    if not mask.any():
        return math.inf
    return float(dist[mask].min())


def _segment_axis_contacts(pts: np.ndarray, side: str):
    """Contacts of a polyline with the open left/right axis ray."""
    contacts = []
    for i in range(len(pts) - 1):
        p, q = pts[i], pts[i + 1]
        d = q - p
        # closest approach of the segment to the x-axis line
        dyz = d[1:]
        pyz = p[1:]
        denom = float(dyz @ dyz)
        if denom < 1e-18:
            t = 0.0
        else:
            t = float(np.clip(-(pyz @ dyz) / denom, 0.0, 1.0))
        point = p + t * d
        dist = float(np.hypot(point[1], point[2]))
        if dist >= TOL_SING:
            continue
        x = point[0]
        on_left = x < -TOL_X
        on_right = x > 1.0 + TOL_X
        if (side == "left" and on_left) or (side == "right" and on_right):
            seg_dir = d / np.linalg.norm(d)
            angle = math.acos(min(1.0, abs(float(seg_dir[0]))))
            if angle < TOL_TANG:
                raise NonGenericContactError(f"tangential ray contact near x={x:.4f}")
            contacts.append(point)
    return contacts


def extension_singularities(rope: Rope) -> dict:
    """Self-intersections of the extension on the left/right axis rays."""
    left = _segment_axis_contacts(rope.samples, "left")
    right = _segment_axis_contacts(rope.samples, "right")
    return {
        "left": np.asarray(left).reshape(-1, 3),
        "right": np.asarray(right).reshape(-1, 3),
        "in_WL": len(left) == 0,
        "in_WR": len(right) == 0,
    }


def in_WL(rope: Rope) -> bool:
    return extension_singularities(rope)["in_WL"]


def in_WR(rope: Rope) -> bool:
    return extension_singularities(rope)["in_WR"]


def c1_distance(r1: Rope, r2: Rope) -> float:
    """Max over the common grid of position plus derivative distance.

    The derivative term is the central finite difference of the sample
    positions themselves (the discrete tangent vector at the sample
    scale), not a difference quotient: on dense polylines the quotient
    amplifies sample-scale sliding by the grid resolution, which would
    make continuity bounds depend on n rather than on the curves.
    """
    if r1.samples.shape != r2.samples.shape:
        raise GridMismatchError("ropes must share the sample grid")
    diff = r1.samples - r2.samples
    deriv = np.empty_like(diff)
    deriv[1:-1] = (diff[2:] - diff[:-2]) * 0.5
    deriv[0] = diff[1] - diff[0]
    deriv[-1] = diff[-1] - diff[-2]
    vals = np.linalg.norm(diff, axis=1) + np.linalg.norm(deriv, axis=1)
    return float(vals.max())


def hausdorff_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two sample clouds."""
    d = np.linalg.norm(p[:, None, :] - q[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def validate_rope(rope: Rope, theta_max: float = THETA_MAX, check_embedded: bool = True) -> list[str]:
    """Invariant check; returns human-readable violations (empty if valid)."""
    problems = []
    seg = rope.segment_vectors()
    lens = np.linalg.norm(seg, axis=1)
    u = seg / lens[:, None]
    cosines = np.clip(np.einsum("ij,ij->i", u[:-1], u[1:]), -1.0, 1.0)
    max_turn = float(np.arccos(cosines).max())
    if max_turn > theta_max + 1e-12:
        problems.append(f"turning angle {max_turn:.4f} exceeds cap {theta_max:.4f}")
    if check_embedded and min_self_distance(rope) <= 0.0:
        problems.append("EMBEDDING: self-intersecting polyline")
    return problems


def rope_type(rope: Rope):
    """Ordered (component kind, knot class) sequence along the axis."""
    from .knots import KnotClass, identify

    decomp = axis_decomposition(rope)
    out = []
    for comp, block in knot_blocks(rope, decomp):
        if block is None:
            raise ContainsEndpointError(
                f"component [{comp.lo:.3f},{comp.hi:.3f}] touches an endpoint"
            )
        if comp.is_point:
            out.append((comp.kind, KnotClass.unknot()))
        else:
            out.append((comp.kind, identify(block)))
    return tuple(out)


def tight_rope(n: int = 16) -> Rope:
    x = np.linspace(0.0, 1.0, n + 1)
    pts = np.column_stack([x, np.zeros(n + 1), np.zeros(n + 1)])
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts, tangent_a=X_AXIS, tangent_b=X_AXIS)
