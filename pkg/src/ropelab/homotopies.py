"""Explicit deformations of short ropes.

Four constructions: the contraction family delta_contract that slides a
rope back along itself to the tight rope; the three-stage retraction of
the no-left-singularity zone (cone squeeze, near-endpoint transverse
squeeze, rightward push); and the two-stage tightening map (transverse
squeeze H followed by the axis reparametrization Phi) that takes a rope
of length < 1 + eps' to one of length < 1 + eps without changing its
knot type.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    CoordinateSingularityError,
    NotInSpaceError,
    NotInSqueezeZoneError,
    OdeSingularError,
)
from .geometry import (
    A_POINT,
    B_POINT,
    Rope,
    _coverage_intervals,
    arclengths,
    axis_decomposition,
    measures,
    polyline_length,
    resample_polyline,
    tight_rope,
)

#: below this contraction parameter the family is pinned to the tight rope
T_MIN = 0.02
#: quadrature grid for the axis reparametrization, points per unit length
PHI_GRID = 2048


def _straight_rope(n_samples: int) -> Rope:
    return tight_rope(n_samples - 1)


def _snap(pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float).copy()
    pts[0] = A_POINT
    pts[-1] = B_POINT
    return pts


def _cut_at_arclength(pts: np.ndarray, s_cut: float) -> np.ndarray:
    """Initial piece of the polyline up to arclength s_cut."""
    s = arclengths(pts)
    if s_cut >= s[-1]:
        return pts.copy()
    i = int(np.searchsorted(s, s_cut, side="right") - 1)
    i = min(i, len(pts) - 2)
    frac = (s_cut - s[i]) / (s[i + 1] - s[i])
    end = pts[i] + frac * (pts[i + 1] - pts[i])
    return np.vstack([pts[: i + 1], end])


def _smallest_rotation(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotation matrix taking unit vector u to unit vector v by the short way."""
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    c = float(u @ v)
    axis = np.cross(u, v)
    s = float(np.linalg.norm(axis))
    if s < 1e-15:
        if c > 0:
            return np.eye(3)
        # antipodal: rotate by pi about any perpendicular axis
        perp = np.cross(u, [0.0, 1.0, 0.0])
        if np.linalg.norm(perp) < 1e-12:
            perp = np.cross(u, [0.0, 0.0, 1.0])
        perp /= np.linalg.norm(perp)
        return 2.0 * np.outer(perp, perp) - np.eye(3)
    axis = axis / s
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


# ---------------------------------------------------------------------------
# contraction family


def _ode_transport(rope: Rope, T: float, max_step: float = 1.0 / 512.0) -> np.ndarray:
    """Rotation matrix from integrating dM/dt = -M [omega]x up to T.

    omega = (r x dr/dt)/|r|^2 is the angular velocity of the free-end
    direction; the integral transports that direction back to the rope's
    initial direction at A.  Fourth-order steps on the rotation group,
    re-orthonormalized after each step.
    """
    dense = resample_polyline(rope.samples, 4096)
    total = polyline_length(dense)
    s_grid = arclengths(dense)
    tangents = np.diff(dense, axis=0)
    tangents /= np.linalg.norm(tangents, axis=1, keepdims=True)

    def omega(t: float) -> np.ndarray:
        s = t * total
        i = min(int(np.searchsorted(s_grid, s, side="right")) - 1, len(tangents) - 1)
        i = max(i, 0)
        frac = (s - s_grid[i]) / max(s_grid[i + 1] - s_grid[i], 1e-300)
        r = dense[i] + frac * (dense[i + 1] - dense[i])
        rho2 = float(r @ r)
        if t > 0.0 and rho2 < 1e-12:
            raise OdeSingularError("rope re-entered A during rotation integration")
        if rho2 < 1e-300:
            return np.zeros(3)
        return np.cross(r, tangents[i]) * (total / rho2)

    def deriv(m: np.ndarray, w: np.ndarray) -> np.ndarray:
        k = np.array(
            [[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]]
        )
        return -m @ k

    n_steps = max(8, int(math.ceil(T / max_step)))
    h = T / n_steps
    m = np.eye(3)
    for k in range(n_steps):
        t = k * h
        k1 = deriv(m, omega(t))
        k2 = deriv(m + 0.5 * h * k1, omega(t + 0.5 * h))
        k3 = deriv(m + 0.5 * h * k2, omega(t + 0.5 * h))
        k4 = deriv(m + h * k3, omega(t + h))
        m = m + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        u_svd, _, vt = np.linalg.svd(m)
        m = u_svd @ vt
    return m


def _total_rotation(rope: Rope, T: float) -> np.ndarray:
    """Integrated transport composed with the corrective rotation to B."""
    total = polyline_length(rope.samples)
    end = _cut_at_arclength(rope.samples, T * total)[-1]
    rho = float(np.linalg.norm(end))
    if rho < 1e-6:
        raise OdeSingularError("free end returned to A during contraction")
    transport = _ode_transport(rope, T)
    corrective = _smallest_rotation(transport @ (end / rho), B_POINT)
    return corrective @ transport


def _pure_delta(rope: Rope, T: float) -> np.ndarray:
    n = rope.samples.shape[0]
    total = polyline_length(rope.samples)
    piece = _cut_at_arclength(rope.samples, T * total)
    piece = resample_polyline(piece, n - 1)
    end = piece[-1]
    rho = float(np.linalg.norm(end))
    if rho < 1e-6:
        raise OdeSingularError("free end returned to A during contraction")
    scaled = piece / rho
    rot = _total_rotation(rope, T)
    if T > 0.9:
        # the transport returns a small holonomy twist about the axis at
        # T = 1; blend it out so the family lands on the identity exactly.
        # A twist about the x-axis fixes both endpoints.
        rot1 = _total_rotation(rope, 1.0)
        tau = math.atan2(rot1[2, 1], rot1[1, 1])
        w = min(1.0, (T - 0.9) / 0.1)
        c, s = math.cos(-w * tau), math.sin(-w * tau)
        untwist = np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
        rot = untwist @ rot
    return _snap(scaled @ rot.T)


def delta_contract(rope: Rope, T: float) -> Rope:
    """Contract the rope along itself: homothety to the free end plus the
    rotation taking it back to B.

    At T = 1 this is the identity; below T_MIN it is pinned to the tight
    rope, with a linear blend on [T_MIN, 2 T_MIN] to keep the family
    continuous on a discrete grid.
    """
    n = rope.samples.shape[0]
    if T >= 1.0:
        return Rope(rope.samples.copy())
    if T <= T_MIN:
        return _straight_rope(n)
    if T < 2.0 * T_MIN:
        w = (T - T_MIN) / T_MIN
        straight = _straight_rope(n).samples
        curved = _pure_delta(rope, 2.0 * T_MIN)
        return Rope(_snap((1.0 - w) * straight + w * curved))
    return Rope(_pure_delta(rope, min(T, 1.0)))


def delta_rotation_residual(rope: Rope, T: float, max_step: float = 1.0 / 512.0) -> float:
    """Angle (radians) the integrated rotation family misses B by at T.

    This is the size of the corrective rotation delta_contract composes
    with the integrated transport to pin the free end to B exactly.
    """
    m = _ode_transport(rope, T, max_step)
    total = polyline_length(rope.samples)
    end = _cut_at_arclength(rope.samples, T * total)[-1]
    rho = float(np.linalg.norm(end))
    if rho < 1e-6:
        raise OdeSingularError("free end returned to A")
    landed = m @ (end / rho)
    c = float(np.clip(landed @ B_POINT, -1.0, 1.0))
    return math.acos(c)


# ---------------------------------------------------------------------------
# retraction of the no-left-singularity zone


def wl_stage1(rope: Rope, T: float) -> Rope:
    """Scale every sample's polar angle about the x-axis by 1 - 5T/6.

    At T = 1 the rope lies in the cone of angle pi/6 about the positive
    x-axis.  Samples on the non-positive x-axis have no well-defined
    azimuth and are rejected.
    """
    if not (0.0 <= T <= 1.0):
        raise ValueError("T must lie in [0, 1]")
    factor = 1.0 - 5.0 * T / 6.0
    pts = rope.samples
    out = pts.copy()
    for i, p in enumerate(pts):
        rho = float(np.linalg.norm(p))
        if rho == 0.0:
            continue
        transverse = math.hypot(p[1], p[2])
        if transverse == 0.0:
            if p[0] < 0.0:
                raise CoordinateSingularityError(
                    f"sample {i} on the non-positive x-axis"
                )
            continue  # already on the cone axis
        theta = math.atan2(transverse, p[0])
        theta_new = theta * factor
        scale_t = math.sin(theta_new) / (transverse / rho)
        out[i, 0] = rho * math.cos(theta_new)
        out[i, 1] = p[1] * scale_t
        out[i, 2] = p[2] * scale_t
    return Rope(_snap(out))


def _smoothstep(x: np.ndarray) -> np.ndarray:
    y = np.clip(x, 0.0, 1.0)
    return y * y * (3.0 - 2.0 * y)


def squeeze_margin(rope: Rope, n_grid: int = 256) -> float:
    """Conservative positive margin for the near-endpoint squeeze.

    Over the largest initial axis interval [0, x*] of fiber multiplicity
    one, takes the worst of (pi/4 - tangent angle) and the clearance of
    the fiber point from the rest of the rope, scaled by a safety factor
    of 1/4.  Non-positive when the rope leaves the admissible zone.
    """
    bounds, counts = _coverage_intervals(rope)
    x_star = 0.0
    for i, c in enumerate(counts):
        if bounds[i + 1] <= 0.0:
            continue
        if c != 1:
            break
        x_star = bounds[i + 1]
    if x_star <= 0.0:
        return -1.0
    x_star = min(x_star, 1.0)
    pts = rope.samples
    seg = np.diff(pts, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    xs_lo = np.minimum(pts[:-1, 0], pts[1:, 0])
    xs_hi = np.maximum(pts[:-1, 0], pts[1:, 0])
    worst = math.inf
    grid = np.linspace(1e-9, x_star - 1e-9, n_grid)
    for x in grid:
        hit = np.nonzero((xs_lo < x) & (x < xs_hi))[0]
        if len(hit) != 1:
            continue
        i = int(hit[0])
        tangent = seg[i] / seg_len[i]
        alpha = math.acos(min(1.0, abs(float(tangent[0]))))
        frac = (x - pts[i, 0]) / (pts[i + 1, 0] - pts[i, 0])
        p = pts[i] + frac * (pts[i + 1] - pts[i])
        far = [
            _point_segment_distance(p, pts[j], pts[j + 1])
            for j in range(len(seg))
            if abs(j - i) > 1
        ]
        gap = min(far) if far else 1.0
        worst = min(worst, math.pi / 4.0 - alpha, gap)
    if not math.isfinite(worst):
        return -1.0
    return 0.25 * worst


def _point_segment_distance(p, a, b) -> float:
    d = b - a
    t = float(np.clip((p - a) @ d / max(float(d @ d), 1e-300), 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * d)))


def wl_stage2(rope: Rope, T: float, eps: float = 2.0) -> Rope:
    """Squeeze the rope onto the axis near A.

    Transverse coordinates are scaled by 1 - T(1 - f(x/delta)) with f a
    smoothstep profile (f(0)=0, f(x>=1)=1, 0 < f' < 2) and delta one
    fifth of the smaller of the squeeze margin and the length headroom
    1 + eps - l.
    """
    if not (0.0 <= T <= 1.0):
        raise ValueError("T must lie in [0, 1]")
    delta2 = 1.0 + eps - measures(rope)["l"]
    if delta2 <= 0.0:
        raise NotInSpaceError("rope too long for the ambient space")
    delta1 = squeeze_margin(rope)
    if delta1 <= 0.0:
        raise NotInSqueezeZoneError("no admissible squeeze margin near A")
    delta = min(delta1, delta2) / 5.0
    pts = rope.samples.copy()
    f = 1.0 - T * (1.0 - _smoothstep(pts[:, 0] / delta))
    pts[:, 1] *= f
    pts[:, 2] *= f
    return Rope(_snap(pts))


def wl_stage3(rope: Rope, T: float) -> Rope:
    """Push the rope rightward out through B.

    The initial piece up to arclength fraction T is rescaled or
    translated in x so its free end reaches the plane x = 1, a quadratic
    shear carries that end to B itself, and a transverse squeeze keeps
    the length at most the input's.  T = 1 is the identity and T = 0 the
    tight rope.
    """
    if not (0.0 <= T <= 1.0):
        raise ValueError("T must lie in [0, 1]")
    n = rope.samples.shape[0]
    if T >= 1.0:
        return rope
    if T <= 0.0:
        return _straight_rope(n)
    total = polyline_length(rope.samples)
    target = total
    piece = _cut_at_arclength(rope.samples, T * total)
    p = float(piece[-1, 0])
    if p >= 1.0:
        piece = piece * np.array([1.0 / p, 1.0, 1.0])
    else:
        piece = piece + np.array([1.0 - p, 0.0, 0.0])
        piece = np.vstack([A_POINT, piece])
    b_prime = piece[-1].copy()
    shear = b_prime - B_POINT  # = (0, y, z) since the free end sits at x = 1
    piece = piece - np.square(piece[:, :1]) * shear

    def length_at(h: float) -> float:
        q = piece * np.array([1.0, h, h])
        return polyline_length(q)

    if length_at(1.0) <= target:
        h = 1.0
    else:
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if length_at(mid) <= target:
                lo = mid
            else:
                hi = mid
        h = lo
    piece = piece * np.array([1.0, h, h])
    # drop duplicate points the cut or squeeze may have produced
    keep = np.ones(len(piece), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(piece, axis=0), axis=1) > 1e-12
    piece = piece[keep]
    return Rope(_snap(resample_polyline(piece, n - 1)))


# ---------------------------------------------------------------------------
# tightening


def squeeze_fraction(rope: Rope, eps: float) -> float:
    """The transverse squeeze fraction f = max(f1, f2).

    l_yz scales linearly under the squeeze, so the minimal tau with
    l_yz <= eps/2 is f1 = max(0, 1 - eps/(2 l_yz)) and the minimal tau
    with l_yz + l_x <= l is f2 = max(0, 1 - (l - l_x)/l_yz).  The tight
    rope gets f = 1.
    """
    m = measures(rope)
    if m["l_yz"] < 1e-12:
        return 1.0
    f1 = max(0.0, 1.0 - eps / (2.0 * m["l_yz"]))
    f2 = max(0.0, 1.0 - (m["l"] - m["l_x"]) / m["l_yz"])
    return max(f1, f2)


def _axis_distance(x: np.ndarray, comps) -> np.ndarray:
    if not comps:
        return np.full_like(x, np.inf)
    d = np.full_like(x, np.inf)
    for c in comps:
        d = np.minimum(d, np.maximum.reduce([c.lo - x, x - c.hi, np.zeros_like(x)]))
    return d


def axis_slowdown(rope: Rope, grid: np.ndarray) -> np.ndarray:
    """The slowdown field: zero exactly on A(r), positive elsewhere.

    Product of the distance to A(r) and a transversality margin built
    from the largest tangent-axis angle over the fiber.
    """
    dec = axis_decomposition(rope)
    dist = _axis_distance(grid, dec.a_components)
    dist = np.where(np.isfinite(dist), dist, 1.0 + np.abs(grid))
    pts = rope.samples
    seg = np.diff(pts, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    cos_alpha = np.abs(seg[:, 0]) / seg_len
    xs_lo = np.minimum(pts[:-1, 0], pts[1:, 0])
    xs_hi = np.maximum(pts[:-1, 0], pts[1:, 0])
    margin = np.ones_like(grid)
    for k, x in enumerate(grid):
        hit = (xs_lo < x) & (x < xs_hi)
        if np.any(hit):
            alpha_max = math.acos(float(np.min(cos_alpha[hit])))
            margin[k] = max(0.0, (math.pi / 2.0 - alpha_max) / (math.pi / 4.0))
    return dist * np.minimum(1.0, margin)


def _phi_data(rope: Rope, eps: float):
    """Grid, slowdown field, unit-interval integral, and beta for Phi."""
    xs = rope.samples[:, 0]
    lo = min(0.0, float(xs.min())) - 1e-3
    hi = max(1.0, float(xs.max())) + 1e-3
    n_pts = int(math.ceil(PHI_GRID * (hi - lo))) + 1
    grid = np.linspace(lo, hi, n_pts)
    g = axis_slowdown(rope, grid)
    unit = (grid >= 0.0) & (grid <= 1.0)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    int_unit = float(trapezoid(np.where(unit, g, 0.0), grid))
    l_a = axis_decomposition(rope).l_a
    if l_a <= eps / 4.0 or int_unit <= 0.0:
        beta = 0.0
    else:
        beta = (4.0 * l_a / eps - 1.0) / int_unit
    return grid, g, int_unit, beta


def _phi_map(grid: np.ndarray, g: np.ndarray, s: float):
    """Monotone reparametrization fixing 0 and 1, slowed by s*g."""
    integrand = 1.0 + s * g
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(grid))])
    f0 = float(np.interp(0.0, grid, cum))
    f1 = float(np.interp(1.0, grid, cum))

    def phi(x: np.ndarray) -> np.ndarray:
        return (np.interp(x, grid, cum) - f0) / (f1 - f0)

    def dphi(x: np.ndarray) -> np.ndarray:
        return np.interp(x, grid, integrand) / (f1 - f0)

    return phi, dphi


def tighten(rope: Rope, eps: float, eps_prime: float, T: float) -> Rope:
    """Deform a rope of length < 1 + eps' to one of length < 1 + eps.

    First half of the time: transverse squeeze by h = 1 - sigma*f with f
    the closed-form squeeze fraction.  Second half: reparametrize the
    axis by phi built from the slowdown field, with the strength beta
    chosen so that at full time the rope spends axis length at most
    eps/4 over A(r).  Both stages are ambient and preserve knot type.
    """
    if not (0.0 < eps < eps_prime <= 2.0 + 1e-12):
        raise ValueError("need 0 < eps < eps_prime <= 2")
    if measures(rope)["l"] >= 1.0 + eps_prime:
        raise NotInSpaceError("input length must be below 1 + eps_prime")
    sigma1 = min(2.0 * T, 1.0)
    sigma2 = max(2.0 * T - 1.0, 0.0)
    f = squeeze_fraction(rope, eps)
    h = 1.0 - sigma1 * f
    pts = rope.samples.copy()
    pts[:, 1] *= h
    pts[:, 2] *= h
    squeezed = Rope(_snap(pts))
    if sigma2 <= 0.0:
        return squeezed
    grid, g, _, beta = _phi_data(squeezed, eps)
    if beta == 0.0:
        return squeezed
    phi, _ = _phi_map(grid, g, sigma2 * beta)
    out = squeezed.samples.copy()
    out[:, 0] = phi(out[:, 0])
    return Rope(_snap(out))


def phi_conditions(rope: Rope, eps: float) -> dict:
    """Check the reparametrization's endpoint, contraction, and rate bounds.

    (a) phi fixes 0 and 1; (b) dphi/dx < 1 on A(r) at positive times;
    (c) at full time dphi/dx <= eps/(4 l_A) on A(r), with equality by
    the choice of beta.
    """
    dec = axis_decomposition(rope)
    grid, g, _, beta = _phi_data(rope, eps)
    report = {"beta": beta, "l_a": dec.l_a}
    phi, dphi = _phi_map(grid, g, beta)
    report["phi_0"] = float(phi(np.array([0.0]))[0])
    report["phi_1"] = float(phi(np.array([1.0]))[0])
    # sample strictly inside each component, clear of quadrature-grid cells
    # that straddle the boundary of A(r)
    inset = 2.0 * (grid[1] - grid[0])
    spans = [
        np.linspace(c.lo + inset, c.hi - inset, 64)
        for c in dec.a_components
        if c.hi - c.lo > 4.0 * inset
    ]
    a_points = np.concatenate(spans) if spans else np.array([])
    if len(a_points) == 0 or beta == 0.0:
        report["b_max_dphi"] = 0.0
        report["c_margin"] = 0.0
        return report
    rates_full = dphi(a_points)
    report["b_max_dphi"] = float(rates_full.max())
    for t_mid in (0.25, 0.5, 0.75):
        _, dmid = _phi_map(grid, g, t_mid * beta)
        report["b_max_dphi"] = max(report["b_max_dphi"], float(dmid(a_points).max()))
    bound = eps / (4.0 * dec.l_a)
    report["c_margin"] = float(bound - rates_full.max())
    return report
