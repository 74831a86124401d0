"""Knot-type identification for PL curves.

Closed (or ray-capped long) polylines are projected generically to get a
crossing diagram, simplified by crossing-decreasing Reidemeister moves,
and classified through the Alexander polynomial and determinant against
a small table of prime knots and their connected sums.  Fox colorings
give an independent oracle for the determinant.
"""

from __future__ import annotations

import bisect
import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from importlib import resources

import numpy as np
import sympy as sp

from .errors import (
    IdentificationError,
    ProjectionFailedError,
    SingularExtensionError,
)
from .geometry import LongCurve, Rope, min_self_distance
from .monoid import MonoidElement

#: coincidence tolerance for marked double points
TOL_COINC = 1e-4
#: strand offset applied when resolving a double point
RESOLVE_OFFSET = 2.0 * TOL_COINC
#: minimal crossing angle at a transversal double point, radians
MIN_CROSSING_ANGLE = math.radians(5.0)

_T = sp.Symbol("t")


@dataclass(frozen=True)
class Passage:
    """One visit of the curve through a crossing."""

    position: float  # segment index + fractional parameter, in curve order
    crossing: int
    over: bool
    sign: int


@dataclass(frozen=True)
class Diagram:
    """Crossing sequence of a generic planar projection, in curve order."""

    passages: tuple[Passage, ...]

    @property
    def n_crossings(self) -> int:
        return len(self.passages) // 2

    def gauss_code(self) -> tuple[int, ...]:
        """Signed sequence: +id at over-passages, -id at under-passages."""
        ids = {}
        code = []
        for p in self.passages:
            ids.setdefault(p.crossing, len(ids) + 1)
            code.append(ids[p.crossing] if p.over else -ids[p.crossing])
        return tuple(code)

    def crossing_signs(self) -> dict[int, int]:
        return {p.crossing: p.sign for p in self.passages}


@dataclass(frozen=True)
class KnotClass:
    """Multiset of prime labels, or UNKNOWN with an invariant fingerprint."""

    primes: tuple[str, ...] | None
    fingerprint: tuple | None = None

    @classmethod
    def unknot(cls) -> "KnotClass":
        return cls(primes=())

    @classmethod
    def of(cls, *labels: str) -> "KnotClass":
        return cls(primes=tuple(sorted(labels)))

    @classmethod
    def unknown(cls, determinant: int, alexander: tuple[int, ...]) -> "KnotClass":
        return cls(primes=None, fingerprint=(determinant, alexander))

    @property
    def is_unknown(self) -> bool:
        return self.primes is None

    @property
    def is_unknot(self) -> bool:
        return self.primes == ()

    def to_monoid(self) -> MonoidElement:
        if self.is_unknown:
            det, alex = self.fingerprint
            label = f"K[det={det},alex={','.join(map(str, alex))}]"
            return MonoidElement.of(label)
        return MonoidElement(self.primes)

    def __str__(self) -> str:
        if self.is_unknown:
            return f"UNKNOWN{self.fingerprint}"
        return str(self.to_monoid())


def _load_table():
    text = resources.files("ropelab.data").joinpath("fingerprints.json").read_text()
    return json.loads(text)["primes"]


_TABLE = _load_table()


# ---------------------------------------------------------------------------
# projection and crossing extraction


def _frame(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    helper = np.array([1.0, 0.0, 0.0])
    if abs(d @ helper) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    u = np.cross(helper, d)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    return u, v, d


def _jittered(direction: np.ndarray, seed: int, attempt: int) -> np.ndarray:
    if attempt == 0:
        return np.asarray(direction, dtype=float)
    rng = np.random.default_rng(seed * 1000 + attempt)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = 1e-3 * attempt / 32.0 * (0.5 + rng.random())
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    k = axis
    d_rot = (
        d * math.cos(angle)
        + np.cross(k, d) * math.sin(angle)
        + k * (k @ d) * (1 - math.cos(angle))
    )
    return d_rot / np.linalg.norm(d_rot)


class _Degenerate(Exception):
    pass


def _crossings_of_projection(pts: np.ndarray, direction: np.ndarray):
    """All transversal crossings of the closed projected polyline."""
    u, v, d = _frame(direction)
    m = len(pts)
    xy = np.column_stack([pts @ u, pts @ v])
    depth = pts @ d
    p0 = xy
    p1 = xy[(np.arange(m) + 1) % m]
    d0 = p1 - p0
    crossings = []
    band = 1e-7
    for i in range(m):
        for j in range(i + 2, m):
            if i == 0 and j == m - 1:
                continue  # cyclically adjacent
            # quick reject on bounding boxes
            if (
                max(p0[i, 0], p1[i, 0]) < min(p0[j, 0], p1[j, 0])
                or max(p0[j, 0], p1[j, 0]) < min(p0[i, 0], p1[i, 0])
                or max(p0[i, 1], p1[i, 1]) < min(p0[j, 1], p1[j, 1])
                or max(p0[j, 1], p1[j, 1]) < min(p0[i, 1], p1[i, 1])
            ):
                continue
            denom = d0[i, 0] * d0[j, 1] - d0[i, 1] * d0[j, 0]
            rel = p0[j] - p0[i]
            if abs(denom) < 1e-12 * max(1e-30, np.linalg.norm(d0[i]) * np.linalg.norm(d0[j])):
                # parallel in projection; overlapping parallels are degenerate
                cross_a = rel[0] * d0[j, 1] - rel[1] * d0[j, 0]
                if abs(cross_a) < 1e-12:
                    raise _Degenerate("parallel overlap")
                continue
            ti = (rel[0] * d0[j, 1] - rel[1] * d0[j, 0]) / denom
            tj = (rel[0] * d0[i, 1] - rel[1] * d0[i, 0]) / denom
            if ti < -band or ti > 1 + band or tj < -band or tj > 1 + band:
                continue
            if min(ti, 1 - ti) < band or min(tj, 1 - tj) < band:
                raise _Degenerate("crossing at a vertex")
            zi = depth[i] + ti * (depth[(i + 1) % m] - depth[i])
            zj = depth[j] + tj * (depth[(j + 1) % m] - depth[j])
            if abs(zi - zj) < 1e-12:
                raise _Degenerate("depth tie")
            crossings.append((i + ti, j + tj, zi > zj, d0[i], d0[j]))
    # triple-point guard: projected crossing points must be separated
    pts2d = []
    for ci, cj, _, _, _ in crossings:
        ii = int(ci) % m
        pt = p0[ii] + (ci - int(ci)) * d0[ii]
        pts2d.append(pt)
    for a, b in itertools.combinations(range(len(pts2d)), 2):
        if np.linalg.norm(pts2d[a] - pts2d[b]) < 1e-9:
            raise _Degenerate("triple point")
    return crossings


def diagram(curve: np.ndarray | LongCurve, direction=(0.0, 0.0, 1.0), seed: int = 0) -> Diagram:
    """Generic projection diagram; retries with seeded jitter up to 32 times."""
    if isinstance(curve, LongCurve):
        pts = close_long(curve)
    else:
        pts = np.asarray(curve, dtype=float)
    last = None
    for attempt in range(32):
        d = _jittered(direction, seed, attempt)
        try:
            raw = _crossings_of_projection(pts, d)
        except _Degenerate as exc:
            last = exc
            continue
        passages = []
        for cid, (ci, cj, i_over, di, dj) in enumerate(raw):
            d_over, d_under = (di, dj) if i_over else (dj, di)
            sign = 1 if (d_over[0] * d_under[1] - d_over[1] * d_under[0]) > 0 else -1
            passages.append(Passage(ci, cid, i_over, sign))
            passages.append(Passage(cj, cid, not i_over, sign))
        passages.sort(key=lambda p: p.position)
        return Diagram(tuple(passages))
    raise ProjectionFailedError(f"no generic projection found: {last}")


# ---------------------------------------------------------------------------
# Reidemeister simplification


def _remove_crossings(passages, dead: set[int]):
    return tuple(p for p in passages if p.crossing not in dead)


def simplify(d: Diagram) -> Diagram:
    """Apply crossing-decreasing Reidemeister I and II moves to a fixpoint."""
    passages = d.passages
    changed = True
    while changed and passages:
        changed = False
        n = len(passages)
        # R1: the same crossing visited twice in a row (cyclically)
        for i in range(n):
            a, b = passages[i], passages[(i + 1) % n]
            if a.crossing == b.crossing:
                passages = _remove_crossings(passages, {a.crossing})
                changed = True
                break
        if changed:
            continue
        # R2: adjacent pair both-over here and both-under elsewhere
        pos_of = {}
        for i, p in enumerate(passages):
            pos_of.setdefault(p.crossing, []).append(i)
        for i in range(n):
            a, b = passages[i], passages[(i + 1) % n]
            if a.crossing == b.crossing or not (a.over and b.over):
                continue
            other_a = [k for k in pos_of[a.crossing] if k != i][0]
            other_b = [k for k in pos_of[b.crossing] if k != (i + 1) % n][0]
            if passages[other_a].over or passages[other_b].over:
                continue
            if (other_a - other_b) % n == 1 or (other_b - other_a) % n == 1:
                passages = _remove_crossings(passages, {a.crossing, b.crossing})
                changed = True
                break
    return Diagram(passages)


# ---------------------------------------------------------------------------
# invariants


def _arcs(d: Diagram):
    """Arc index per passage; arcs are separated by under-passages.

    Returns (n_arcs, per-crossing dict with over/under_in/under_out arcs).
    """
    unders = sorted(p.position for p in d.passages if not p.over)
    n_arcs = len(unders)

    def arc_at(pos: float) -> int:
        return bisect.bisect_right(unders, pos) % n_arcs

    info: dict[int, dict] = {}
    for p in d.passages:
        e = info.setdefault(p.crossing, {"sign": p.sign})
        if p.over:
            e["over"] = arc_at(p.position)
        else:
            m = unders.index(p.position)
            e["under_in"] = m
            e["under_out"] = (m + 1) % n_arcs
    return n_arcs, info


def alexander(d: Diagram) -> tuple[int, ...]:
    """Alexander polynomial coefficients, ascending, normalized.

    Normalization strips units +-t^k so that the lowest coefficient is
    positive; the unknot gives (1,).
    """
    d = simplify(d)
    if d.n_crossings == 0:
        return (1,)
    n_arcs, info = _arcs(d)
    # entries are linear in t; evaluate the minor's determinant exactly
    # at integer points and interpolate (symbolic determinants blow up
    # past ~15 crossings)
    a0 = np.zeros((len(info), n_arcs), dtype=object)
    a1 = np.zeros((len(info), n_arcs), dtype=object)
    for row, (_, e) in enumerate(sorted(info.items())):
        if e["sign"] > 0:
            contrib = ((e["over"], 1, -1), (e["under_in"], 0, 1), (e["under_out"], -1, 0))
        else:
            contrib = ((e["over"], -1, 1), (e["under_in"], 1, 0), (e["under_out"], 0, -1))
        for col, c0, c1 in contrib:
            a0[row, col] += c0
            a1[row, col] += c1
    nm = len(info) - 1
    m0 = a0[:nm, : n_arcs - 1]
    m1 = a1[:nm, : n_arcs - 1]
    samples = [
        (x, _int_det((m0 + x * m1).tolist())) for x in range(2, 2 + nm + 1)
    ]
    det = sp.interpolate(samples, _T) if nm else sp.Integer(samples[0][1])
    poly = sp.Poly(sp.expand(det), _T)
    coeffs = [int(c) for c in poly.all_coeffs()[::-1]]  # ascending
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if not coeffs:
        return (0,)
    if coeffs[0] < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


def _int_det(m: list[list[int]]) -> int:
    """Fraction-free (Bareiss) determinant of an integer matrix."""
    m = [list(row) for row in m]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _alex_eval(coeffs: tuple[int, ...], x: int) -> int:
    return sum(c * x**k for k, c in enumerate(coeffs))


def determinant(d: Diagram) -> int:
    """|Alexander polynomial at t = -1|."""
    return abs(_alex_eval(alexander(d), -1))


def fox_colorings(d: Diagram, p: int) -> int:
    """Number of Fox p-colorings of the diagram's arcs.

    Brute force over all labelings when feasible; otherwise the count is
    p ** (nullity of the crossing relations over Z/p).
    """
    d_s = d  # colorings are computed on the diagram as given
    if d_s.n_crossings == 0:
        return p
    n_arcs, info = _arcs(d_s)
    rows = []
    for _, e in sorted(info.items()):
        row = np.zeros(n_arcs, dtype=np.int64)
        row[e["over"]] += 2
        row[e["under_in"]] -= 1
        row[e["under_out"]] -= 1
        rows.append(row % p)
    rel = np.array(rows, dtype=np.int64)
    if n_arcs <= 12 and p**n_arcs <= 2_000_000:
        combos = np.array(
            np.meshgrid(*[np.arange(p)] * n_arcs, indexing="ij")
        ).reshape(n_arcs, -1)
        ok = np.all((rel @ combos) % p == 0, axis=0)
        return int(np.count_nonzero(ok))
    # rank over Z/p by Gaussian elimination
    a = rel.copy() % p
    rank = 0
    rows_n, cols_n = a.shape
    for col in range(cols_n):
        pivot = None
        for r in range(rank, rows_n):
            if a[r, col] % p != 0:
                pivot = r
                break
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        inv = pow(int(a[rank, col]), -1, p)
        a[rank] = (a[rank] * inv) % p
        for r in range(rows_n):
            if r != rank and a[r, col] % p != 0:
                a[r] = (a[r] - a[r, col] * a[rank]) % p
        rank += 1
        if rank == rows_n:
            break
    return p ** (cols_n - rank)


# ---------------------------------------------------------------------------
# closure, identification, connected sums


def close_long(curve: LongCurve, margin: float = 2.0) -> np.ndarray:
    """Close a long curve by a far rectangular arc below its bounding box."""
    core = curve.core
    _check_rays_clear(curve)
    span = max(1.0, float(np.ptp(core, axis=0).max()))
    m = margin * span
    x_lo = float(core[:, 0].min()) - m
    x_hi = float(core[:, 0].max()) + m
    z_lo = float(core[:, 2].min()) - m
    lb, rb = curve.left_base, curve.right_base
    left_pt = np.array([x_lo, lb[1], lb[2]])
    right_pt = np.array([x_hi, rb[1], rb[2]])
    closure = np.array(
        [
            right_pt,
            [x_hi, rb[1], z_lo],
            [x_lo, lb[1], z_lo],
            left_pt,
        ]
    )
    return np.vstack([core, closure])


def _check_rays_clear(curve: LongCurve):
    for base, direction in ((curve.left_base, curve.left_dir), (curve.right_base, curve.right_dir)):
        rel = curve.core - base
        # distance from each core segment to the open ray {base + s*dir, s>0}
        for i in range(len(curve.core) - 1):
            p, q = curve.core[i], curve.core[i + 1]
            d_seg = q - p
            best = _segment_ray_distance(p, d_seg, base, direction)
            if best[0] < TOL_COINC and best[1] > TOL_COINC:
                raise SingularExtensionError("core intersects an extension ray")
        _ = rel


def _segment_ray_distance(p, d_seg, base, d_ray):
    """(distance, ray parameter) of the closest approach segment/ray."""
    a = float(d_seg @ d_seg)
    e = float(d_ray @ d_ray)
    r = p - base
    b = float(d_seg @ d_ray)
    c = float(d_seg @ r)
    f = float(d_ray @ r)
    denom = a * e - b * b
    if denom > 1e-14:
        t = np.clip((b * f - c * e) / denom, 0.0, 1.0)
    else:
        t = 0.0
    s = max(0.0, (f + b * t) / e)
    if a > 1e-14:
        t = np.clip((b * s - c) / a, 0.0, 1.0)
    s = max(0.0, (f + b * t) / e)
    closest_seg = p + t * d_seg
    closest_ray = base + s * d_ray
    return float(np.linalg.norm(closest_seg - closest_ray)), float(s)


def _match_fingerprint(det: int, alex: tuple[int, ...]) -> KnotClass:
    if alex == (1,):
        return KnotClass.unknot()
    multisets = set()

    def factor(coeffs: tuple[int, ...], acc: tuple[str, ...]):
        if coeffs == (1,):
            multisets.add(tuple(sorted(acc)))
            return
        for entry in _TABLE:
            q = _poly_divide(coeffs, tuple(entry["alexander"]))
            if q is not None:
                factor(q, acc + (entry["label"],))

    factor(alex, ())
    candidates = {
        ms
        for ms in multisets
        if math.prod(_prime_det(l) for l in ms) == det
    }
    if len(candidates) == 1:
        return KnotClass(primes=next(iter(candidates)))
    return KnotClass.unknown(det, alex)


def _prime_det(label: str) -> int:
    for entry in _TABLE:
        if entry["label"] == label:
            return entry["determinant"]
    raise KeyError(label)


def _poly_divide(num: tuple[int, ...], den: tuple[int, ...]) -> tuple[int, ...] | None:
    """Exact division of ascending-coefficient integer polynomials."""
    num_l = list(num[::-1])  # descending
    den_l = list(den[::-1])
    if len(num_l) < len(den_l):
        return None
    quot = [0] * (len(num_l) - len(den_l) + 1)
    for i in range(len(quot)):
        lead = num_l[i]
        if lead % den_l[0] != 0:
            return None
        q = lead // den_l[0]
        quot[i] = q
        for k, dc in enumerate(den_l):
            num_l[i + k] -= q * dc
    if any(c != 0 for c in num_l):
        return None
    res = tuple(quot[::-1])
    if res and res[0] < 0:
        return None
    return res


def identify(curve: np.ndarray | LongCurve | Rope, direction=(0.0, 0.0, 1.0), seed: int = 0) -> KnotClass:
    """Knot class of a closed PL curve or a long curve via its closure."""
    if isinstance(curve, Rope):
        from .geometry import extend

        curve = extend(curve)
    d = simplify(diagram(curve, direction=direction, seed=seed))
    if d.n_crossings == 0:
        return KnotClass.unknot()
    alex = alexander(d)
    det = abs(_alex_eval(alex, -1))
    return _match_fingerprint(det, alex)


def connected_sum(k1: np.ndarray, k2: np.ndarray) -> np.ndarray:
    """Geometric band sum of two closed curves along the x-axis."""
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    gap = 1.0 + 0.25 * (np.ptp(k1[:, 0]) + np.ptp(k2[:, 0]))
    shift = np.array([k1[:, 0].max() - k2[:, 0].min() + gap, 0.0, 0.0])
    k2s = k2 + shift
    v = int(np.argmax(k1[:, 0]))
    w = int(np.argmin(k2s[:, 0]))
    path1 = np.roll(k1, -(v + 1), axis=0)  # a2 ... a1, open at the cut edge
    for reverse in (False, True):
        path2 = np.roll(k2s, -(w + 1), axis=0)
        if reverse:
            path2 = path2[::-1]
        candidate = np.vstack([path1, path2])
        if min_self_distance(candidate, closed=True) > 1e-9:
            return candidate
    # tiny transverse offset as a fallback for coplanar bridges
    path2 = np.roll(k2s + np.array([0.0, 1e-3, 0.0]), -(w + 1), axis=0)
    candidate = np.vstack([path1, path2])
    if min_self_distance(candidate, closed=True) > 1e-12:
        return candidate
    raise IdentificationError("could not join curves without intersection")


# ---------------------------------------------------------------------------
# singular curves and resolutions


@dataclass(frozen=True)
class SingularCurve:
    """Closed PL curve with marked transversal double points.

    Each mark is a pair of sample indices whose positions coincide
    within TOL_COINC.
    """

    points: np.ndarray
    double_points: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        m = len(pts)
        for i, j in self.double_points:
            if np.linalg.norm(pts[i] - pts[j]) > TOL_COINC:
                raise IdentificationError(f"marked pair {(i, j)} does not coincide")
            ti = _vertex_tangent(pts, i)
            tj = _vertex_tangent(pts, j)
            angle = math.acos(min(1.0, abs(float(ti @ tj))))
            if angle < MIN_CROSSING_ANGLE:
                raise IdentificationError(f"double point {(i, j)} is not transversal")
        _ = m

    @property
    def is_embedded(self) -> bool:
        return not self.double_points and min_self_distance(self.points, closed=True) > 0


def _vertex_tangent(pts: np.ndarray, i: int) -> np.ndarray:
    m = len(pts)
    v = pts[(i + 1) % m] - pts[(i - 1) % m]
    return v / np.linalg.norm(v)


def resolve(s: SingularCurve, dp: int, sign: int) -> SingularCurve:
    """Push one strand of a marked double point off the other.

    The second strand of the pair moves by RESOLVE_OFFSET along the
    crossing normal; ``sign`` selects the side.  The mark is consumed.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    i, j = s.double_points[dp]
    pts = s.points.copy()
    ti = _vertex_tangent(pts, i)
    tj = _vertex_tangent(pts, j)
    normal = np.cross(ti, tj)
    norm = np.linalg.norm(normal)
    if norm < math.sin(MIN_CROSSING_ANGLE) / 2:
        raise IdentificationError("double point is not transversal")
    normal /= norm
    pts[j] = pts[j] + sign * RESOLVE_OFFSET * normal
    remaining = tuple(m for k, m in enumerate(s.double_points) if k != dp)
    return SingularCurve(pts, remaining)


def resolve_all(s: SingularCurve, signs) -> np.ndarray:
    """Resolve every marked double point; returns the embedded curve."""
    out = s
    for sign in signs:
        out = resolve(out, 0, sign)
    if out.double_points:
        raise IdentificationError("not all double points resolved")
    return out.points


def vassiliev1_defect(s: SingularCurve, v) -> object:
    """Alternating sum v(k++) - v(k+-) + v(k--) - v(k-+).

    ``v`` maps a KnotClass into an abelian group (any value supporting
    + and -).  Exactly two marked double points are required.
    """
    if len(s.double_points) != 2:
        raise IdentificationError("need exactly two double points")
    classes = {
        combo: identify(resolve_all(s, combo))
        for combo in [(1, 1), (1, -1), (-1, -1), (-1, 1)]
    }
    return (
        v(classes[(1, 1)])
        - v(classes[(1, -1)])
        + v(classes[(-1, -1)])
        - v(classes[(-1, 1)])
    )


def resolution_classes(s: SingularCurve) -> dict[tuple[int, int], KnotClass]:
    return {
        combo: identify(resolve_all(s, combo))
        for combo in [(1, 1), (1, -1), (-1, -1), (-1, 1)]
    }
