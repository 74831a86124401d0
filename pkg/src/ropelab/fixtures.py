"""Fixture corpus: ropes, closed curves, and singular curves used in tests
and demos.

Knotted rope fixtures are built by cutting a closed template open at its
leftmost point and routing the loose ends to A and B around the knot
ball; their lengths are calibrated by bisection on the template scale.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .geometry import A_POINT, B_POINT, Rope, polyline_length, resample_polyline

# ---------------------------------------------------------------------------
# closed curves


def closed_trefoil(n: int = 240) -> np.ndarray:
    s = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return np.column_stack(
        [
            np.sin(s) + 2.0 * np.sin(2.0 * s),
            np.cos(s) - 2.0 * np.cos(2.0 * s),
            -np.sin(3.0 * s),
        ]
    )


def closed_figure_eight(n: int = 300) -> np.ndarray:
    s = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return np.column_stack(
        [
            (2.0 + np.cos(2.0 * s)) * np.cos(3.0 * s),
            (2.0 + np.cos(2.0 * s)) * np.sin(3.0 * s),
            np.sin(4.0 * s),
        ]
    )


def closed_granny(n: int = 240) -> np.ndarray:
    from .knots import connected_sum

    return connected_sum(closed_trefoil(n), closed_trefoil(n))


# ---------------------------------------------------------------------------
# simple rope fixtures


def tight(n: int = 64) -> Rope:
    from .geometry import tight_rope

    return tight_rope(n)


def bump(n: int = 200, amplitude: float = 0.2) -> Rope:
    """Planar sine bump; x-monotone, so its axis decomposition is empty."""
    x = np.linspace(0.0, 1.0, n + 1)
    pts = np.column_stack([x, amplitude * np.sin(math.pi * x), np.zeros(n + 1)])
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts)


def semicircle_composite(n: int = 200, tilt: float = 0.3) -> Rope:
    """Semicircular arc over [AB] in a plane tilted about the x-axis.

    Both endpoint tangents are orthogonal to the axis, so the axis
    decomposition consists of the endpoint components.
    """
    theta = np.linspace(0.0, math.pi, n + 1)
    y = 0.5 * np.sin(theta)
    pts = np.column_stack(
        [
            0.5 - 0.5 * np.cos(theta),
            y * math.cos(tilt),
            y * math.sin(tilt),
        ]
    )
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts)


def skew_arc(n: int = 200, ay: float = 0.18, az: float = 0.12) -> Rope:
    """Non-planar x-monotone arc with moderate tangent angles; in W_L and W_R."""
    x = np.linspace(0.0, 1.0, n + 1)
    pts = np.column_stack(
        [
            x,
            ay * np.sin(math.pi * x),
            az * np.sin(2.0 * math.pi * x) * np.sin(math.pi * x),
        ]
    )
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts)


def overhang(n: int = 240) -> Rope:
    """Rope with a mid-course x-reversal (one interval of multiplicity 3).

    Stays in the x >= 0 half-space and clear of both rays; the initial
    stretch up to the first turn is single-valued with gentle tangents.
    """
    t = np.linspace(0.0, 1.0, n + 1)
    # x advances, backs up over the middle, then advances again
    x = t + 0.14 * np.exp(-((t - 0.55) / 0.16) ** 2) * np.sin(
        2.0 * math.pi * (t - 0.55) / 0.45
    ) * -1.0
    y = 0.16 * np.sin(math.pi * t)
    z = 0.10 * np.sin(2.0 * math.pi * t) * np.sin(math.pi * t)
    pts = np.column_stack([x, y, z])
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts)


# ---------------------------------------------------------------------------
# knotted rope fixtures


def _open_template(closed_pts: np.ndarray, scale: float, cap_angle: float = 0.45,
                   rho_bar: float = 0.97, kappa: float = 0.03) -> np.ndarray:
    """Knot template drawn in a spherical cap at nearly constant radius.

    The closed template's plane coordinates become angular coordinates
    in a cap of directions around c0 (an off-axis direction), its third
    coordinate a small radial offset resolving the crossings.  Keeping
    the radius from A close to 1 along the whole knotted part makes the
    contraction family's homothety factor stay near 1, so contraction
    sweeps move slowly.  The rope is the radial stub from A to the cut
    point nearest B, the cap pattern, and a short tail to B.
    """
    pts = np.asarray(closed_pts, dtype=float)
    pts = pts - pts.mean(axis=0)
    pts = pts / np.abs(pts[:, :2]).max()
    c0 = np.array([math.cos(cap_angle), 0.0, math.sin(cap_angle)])
    x_hat = np.array([1.0, 0.0, 0.0])
    e1 = x_hat - (x_hat @ c0) * c0
    e1 /= np.linalg.norm(e1)  # cap direction pointing toward B
    e2 = np.cross(c0, e1)

    directions = c0[None, :] + scale * (
        pts[:, 0:1] * e1 + pts[:, 1:2] * e2
    )
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rho_bar * (1.0 + kappa * pts[:, 2] / max(1.0, np.abs(pts[:, 2]).max()))
    ball = radii[:, None] * directions
    # cut where the image lies closest to B
    k = int(np.argmax(directions @ x_hat))
    ball = np.roll(ball, -(k + 1), axis=0)
    # leave A straight along the axis before bending toward the cap
    # entry, so the free-end direction starts at (1,0,0)
    leg = np.linspace(0.0, 0.3, 12)[:, None] * np.array([[1.0, 0.0, 0.0]])
    stub = np.array([0.3, 0.0, 0.0]) + np.linspace(0.0, 1.0, 40)[1:-1, None] * (
        ball[0] - np.array([0.3, 0.0, 0.0])
    )[None, :]
    poly = np.vstack([leg, stub, ball, [B_POINT]])
    # round the junction corners; the kernel is much narrower than the
    # crossing bumps, so the knot pattern is essentially untouched
    dense = resample_polyline(poly, 1200)
    dense = gaussian_filter1d(dense, sigma=8.0, axis=0, mode="nearest")
    dense[0] = A_POINT
    dense[-1] = B_POINT
    return dense


def _calibrated_rope(build, target_length: float, lo: float, hi: float,
                     n: int) -> Rope:
    """Bisection on a scale parameter until the rope length hits the target."""
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if polyline_length(resample_polyline(build(mid), n)) < target_length:
            lo = mid
        else:
            hi = mid
    pts = resample_polyline(build(0.5 * (lo + hi)), n)
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts)


def trefoil_rope(n: int = 240, length: float = 2.8) -> Rope:
    """Rope with a trefoil block in the middle, length calibrated."""

    def build(scale):
        return _open_template(closed_trefoil(), scale)

    return _calibrated_rope(build, length, 0.02, 0.6, n)


def granny_rope(n: int = 300, length: float = 2.95) -> Rope:
    """Rope with a granny-knot block, length calibrated."""

    def build(scale):
        return _open_template(closed_granny(), scale)

    return _calibrated_rope(build, length, 0.02, 0.6, n)


def figure_eight_rope(n: int = 300, length: float = 2.9) -> Rope:
    """Rope with a figure-eight block, length calibrated."""

    def build(scale):
        return _open_template(closed_figure_eight(), scale)

    return _calibrated_rope(build, length, 0.02, 0.6, n)


# ---------------------------------------------------------------------------
# tightening corpus: ropes with length in (2, 3)


def coil(n: int = 300, turns: float = 3.0, radius: float = 0.28) -> Rope:
    x = np.linspace(0.0, 1.0, n + 1)
    env = np.sin(math.pi * x)
    pts = np.column_stack(
        [
            x,
            radius * env * np.cos(2.0 * math.pi * turns * x),
            radius * env * np.sin(2.0 * math.pi * turns * x),
        ]
    )
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts)


def tall_bump(n: int = 240, amplitude: float = 0.9) -> Rope:
    x = np.linspace(0.0, 1.0, n + 1)
    pts = np.column_stack([x, amplitude * np.sin(math.pi * x), np.zeros(n + 1)])
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts)


def zigzag(n: int = 300, amplitude: float = 0.35, waves: int = 3) -> Rope:
    x = np.linspace(0.0, 1.0, n + 1)
    pts = np.column_stack(
        [
            x,
            amplitude * np.sin(math.pi * waves * x) * np.sin(math.pi * x) ** 0.5,
            0.1 * np.sin(math.pi * x),
        ]
    )
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return Rope(pts)


def tighten_corpus() -> list[Rope]:
    """Ten ropes with lengths in (2, 3) for the tightening suite."""
    ropes = [
        coil(turns=2.5, radius=0.24),
        coil(turns=3.0, radius=0.20),
        coil(turns=4.0, radius=0.15),
        tall_bump(amplitude=0.85),
        tall_bump(amplitude=1.05),
        zigzag(amplitude=0.40, waves=3),
        zigzag(amplitude=0.33, waves=4),
        trefoil_rope(length=2.8),
        granny_rope(length=2.95),
        figure_eight_rope(length=2.9),
    ]
    return ropes


def wl_corpus() -> list[Rope]:
    """Ropes in the x >= 0 half-space with no left-ray singularities."""
    return [bump(), skew_arc(), overhang()]


# ---------------------------------------------------------------------------
# singular fixtures


def _planar_crossings(xy: np.ndarray):
    """Self-intersections of a closed planar polyline.

    Returns (i, ti, j, tj, point) per crossing, in segment order.
    """
    m = len(xy)
    p0 = xy
    p1 = xy[(np.arange(m) + 1) % m]
    d = p1 - p0
    out = []
    for i in range(m):
        for j in range(i + 2, m):
            if i == 0 and j == m - 1:
                continue
            denom = d[i, 0] * d[j, 1] - d[i, 1] * d[j, 0]
            if abs(denom) < 1e-14:
                continue
            rel = p0[j] - p0[i]
            ti = (rel[0] * d[j, 1] - rel[1] * d[j, 0]) / denom
            tj = (rel[0] * d[i, 1] - rel[1] * d[i, 0]) / denom
            if 0.0 < ti < 1.0 and 0.0 < tj < 1.0:
                out.append((i, ti, j, tj, p0[i] + ti * d[i]))
    return out


def _pinched_curve(xy: np.ndarray, z_constraints: dict, marked: list):
    """3D closed curve from a planar diagram with chosen crossing depths.

    ``z_constraints`` maps crossing index -> (z at first pass, z at
    second pass); ``marked`` crossings get coincident passes (both z
    values equal) and become the curve's double points.
    """
    from .knots import SingularCurve

    crossings = _planar_crossings(xy)
    m = len(xy)
    # positions along the curve (segment index + fraction), with target z
    inserts = []  # (position, point2d, z)
    for c_idx, (i, ti, j, tj, pt) in enumerate(crossings):
        z_first, z_second = z_constraints.get(c_idx, (0.0, 0.0))
        inserts.append((i + ti, pt, z_first, c_idx))
        inserts.append((j + tj, pt, z_second, c_idx))
    inserts.sort(key=lambda e: e[0])
    positions = np.array([e[0] for e in inserts])
    z_nodes = np.array([e[2] for e in inserts])

    def z_of(pos: float) -> float:
        if len(positions) == 0:
            return 0.0
        ext_pos = np.concatenate([positions - m, positions, positions + m])
        ext_z = np.concatenate([z_nodes, z_nodes, z_nodes])
        return float(np.interp(pos, ext_pos, ext_z))

    pts3, pass_index = [], {}
    cursor = 0
    for k in range(m):
        pts3.append([xy[k, 0], xy[k, 1], z_of(float(k))])
        while cursor < len(inserts) and k <= inserts[cursor][0] < k + 1:
            pos, pt, z, c_idx = inserts[cursor]
            new = [pt[0], pt[1], z]
            if np.linalg.norm(np.asarray(new) - pts3[-1]) < 1e-9:
                pts3.pop()  # crossing sits on a sample; replace it
            pass_index.setdefault(c_idx, []).append(len(pts3))
            pts3.append(new)
            cursor += 1
    pts3 = np.array(pts3)
    double_points = tuple(tuple(pass_index[c]) for c in marked)
    return SingularCurve(pts3, double_points)


def two_crossing_singular():
    """Fully planar closed curve with exactly two transversal double points."""
    u = np.linspace(0.0, 2.0 * math.pi, 160, endpoint=False)
    # epitrochoid with two small inner loops: two crossings only
    xy = np.column_stack(
        [np.cos(u) - 0.5 * np.cos(3.0 * u), np.sin(u) - 0.5 * np.sin(3.0 * u)]
    )
    return xy


def singular_from_trefoil_diagram(real_crossing: int = 0, depth: float = 0.4):
    """Trefoil-shadow curve: one honest crossing, two marked double points."""
    u = np.linspace(0.0, 2.0 * math.pi, 200, endpoint=False)
    xy = np.column_stack(
        [np.sin(u) + 2.0 * np.sin(2.0 * u), np.cos(u) - 2.0 * np.cos(2.0 * u)]
    )
    crossings = _planar_crossings(xy)
    marked = [c for c in range(len(crossings)) if c != real_crossing]
    z_constraints = {real_crossing: (depth, -depth)}
    return _pinched_curve(xy, z_constraints, marked)


def singular_from_figure_eight_diagram(real: tuple = (0, 1), depth: float = 0.4):
    """Figure-eight-shadow curve: two honest crossings, two marked."""
    # phase offset keeps the sample grid clear of the crossing points
    u = np.linspace(0.0, 2.0 * math.pi, 240, endpoint=False) + 0.37
    xy = np.column_stack(
        [
            (2.0 + np.cos(2.0 * u)) * np.cos(3.0 * u),
            (2.0 + np.cos(2.0 * u)) * np.sin(3.0 * u),
        ]
    )
    crossings = _planar_crossings(xy)
    marked = [c for c in range(len(crossings)) if c not in real]
    sign = {real[0]: (depth, -depth), real[1]: (-depth, depth)}
    return _pinched_curve(xy, sign, marked)


def singular_planar_two_loop():
    """Planar two-crossing singular curve from an explicit waypoint list."""
    from .knots import SingularCurve

    xy = two_crossing_singular()
    crossings = _planar_crossings(xy)
    marked = list(range(len(crossings)))
    return _pinched_curve(xy, {}, marked)
