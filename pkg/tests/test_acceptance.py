"""Acceptance gate: one test per headline criterion, tolerances pinned.

Each test prints a single CRITERION line on success; pytest -v shows one
pass/fail line per criterion either way.
"""

import math
import time

import numpy as np

from ropelab.fixtures import (
    bump,
    granny_rope,
    semicircle_composite,
    closed_figure_eight,
    closed_granny,
    closed_trefoil,
    singular_from_figure_eight_diagram,
    singular_from_trefoil_diagram,
    singular_planar_two_loop,
    tight,
    tighten_corpus,
    trefoil_rope,
    wl_corpus,
)
from ropelab.geometry import (
    axis_decomposition,
    c1_distance,
    extend,
    hausdorff_distance,
    measures,
    min_self_distance,
    tight_rope,
)
from ropelab.homotopies import (
    delta_contract,
    phi_conditions,
    tighten,
    wl_stage1,
    wl_stage2,
    wl_stage3,
)
from ropelab.knots import (
    alexander,
    determinant,
    diagram,
    fox_colorings,
    identify,
    resolution_classes,
    resolve_all,
    simplify,
    vassiliev1_defect,
)
from ropelab.loops import (
    concat_families,
    loop_class,
    loop_verify,
    reverse_family,
    tie_and_push,
)
from ropelab.mccord import (
    Configuration,
    Event,
    Timeline,
    Track,
    concat,
    is_subordinate,
    omega,
    reverse,
    validate,
    winding_class,
)
from ropelab.monoid import MonoidElement, complete, msum


def _gap_to_straight(rope):
    n = rope.samples.shape[0] - 1
    return hausdorff_distance(rope.samples, tight_rope(n).samples)


def test_criterion_1_contraction_sweeps():
    """64-frame contraction sweeps on five fixtures; budget 30 s."""
    t_start = time.monotonic()
    fixtures = [tight(64), bump(), semicircle_composite(), trefoil_rope(), granny_rope()]
    for rope in fixtures:
        frames = [delta_contract(rope, 1.0 - i / 64) for i in range(65)]
        for fr in frames:
            assert np.max(np.abs(fr.samples[0])) <= 1e-9
            assert np.max(np.abs(fr.samples[-1] - [1, 0, 0])) <= 1e-9
            assert min_self_distance(fr) > 0.0
        for a, b in zip(frames, frames[1:]):
            assert c1_distance(a, b) < 0.1
        assert np.max(np.abs(frames[0].samples - rope.samples)) <= 1e-6
        assert _gap_to_straight(frames[-1]) <= 1e-3
    elapsed = time.monotonic() - t_start
    assert elapsed < 30.0
    print(f"CRITERION 1 PASS: contraction sweeps on 5 fixtures in {elapsed:.1f}s")


def test_criterion_2_wl_retraction():
    """Cone, length, and terminal bounds of the three-stage retraction."""
    eps = 2.0
    for rope in wl_corpus():
        l0 = measures(rope)["l"]
        lengths = [measures(wl_stage1(rope, i / 64))["l"] for i in range(65)]
        assert all(b <= a + 1e-9 for a, b in zip(lengths, lengths[1:]))
        s1 = wl_stage1(rope, 1.0)
        p = s1.samples[1:]
        theta = float(np.arctan2(np.hypot(p[:, 1], p[:, 2]), p[:, 0]).max())
        assert theta < math.pi / 6.0 + 1e-9
        delta2 = 1.0 + eps - measures(s1)["l"]
        s2 = wl_stage2(s1, 1.0, eps=eps)
        assert measures(s2)["l"] - measures(s1)["l"] <= delta2
        assert _gap_to_straight(wl_stage3(s2, 0.0)) <= 1e-3
        for T in np.linspace(0.0, 1.0, 16):
            for fr in (wl_stage1(rope, float(T)), wl_stage3(s2, float(T))):
                assert measures(fr)["l"] < 1.0 + eps
        assert l0 < 1.0 + eps
    print("CRITERION 2 PASS: W_L retraction bounds hold on the corpus")


def test_criterion_3_tightening():
    """eps=1, eps'=2 tightening on ten fixtures; budget 60 s."""
    t_start = time.monotonic()
    for rope in tighten_corpus():
        l0 = measures(rope)["l"]
        assert 2.0 < l0 < 3.0
        half = tighten(rope, 1.0, 2.0, 0.5)
        mh = measures(half)
        assert mh["l_yz"] <= 0.5 + 1e-9
        assert mh["l_x"] + mh["l_yz"] <= l0 + 1e-9
        final = tighten(rope, 1.0, 2.0, 1.0)
        assert measures(final)["l"] < 2.0
        lx = [measures(tighten(rope, 1.0, 2.0, 0.5 + 0.5 * i / 64))["l_x"] for i in range(65)]
        assert all(b <= a + 1e-9 for a, b in zip(lx, lx[1:]))
        phi = phi_conditions(half, 1.0)
        assert abs(phi["phi_0"]) <= 1e-9
        assert abs(phi["phi_1"] - 1.0) <= 1e-9
        assert phi["c_margin"] >= -1e-9
        assert str(identify(extend(rope))) == str(identify(extend(final)))
    elapsed = time.monotonic() - t_start
    assert elapsed < 60.0
    print(f"CRITERION 3 PASS: tightening suite on 10 fixtures in {elapsed:.1f}s")


def test_criterion_4_loop_classes(loop_31, loop_41):
    """Loop classes respect composition: products match connected sums."""
    rep = loop_verify(loop_31, 2.0)
    assert rep.generic
    assert str(loop_class(rep)) == "3_1"

    mixed = concat_families(loop_31, reverse_family(loop_41))
    rep_mixed = loop_verify(mixed, 2.0)
    assert rep_mixed.generic
    assert str(loop_class(rep_mixed)) == "3_1 - 4_1"

    for second, label in ((loop_31, "3_1#3_1"), (loop_41, "3_1#4_1")):
        product = loop_verify(concat_families(loop_31, second), 2.0)
        combined = loop_verify(tie_and_push(label, 2.0), 2.0)
        assert product.generic and combined.generic
        assert loop_class(product) == loop_class(combined)
    print("CRITERION 4 PASS: b(3_1)=3_1, b(3_1)rev(b(4_1))=3_1-4_1, products = sums")


def test_criterion_5_identification():
    """Determinants vs the Fox-coloring oracle; factorization; invariance."""
    d3 = simplify(diagram(closed_trefoil()))
    assert determinant(d3) == 3
    assert fox_colorings(d3, 3) == 9
    d4 = simplify(diagram(closed_figure_eight()))
    assert determinant(d4) == 5
    assert fox_colorings(d4, 5) == 25
    granny = closed_granny()
    assert str(identify(granny)) == "2*3_1"
    assert alexander(simplify(diagram(granny))) == (1, -2, 3, -2, 1)
    c = closed_trefoil()
    a = 0.7
    rot = np.array(
        [[math.cos(a), -math.sin(a), 0], [math.sin(a), math.cos(a), 0], [0, 0, 1]]
    )
    from ropelab.geometry import resample_polyline

    dense = resample_polyline(np.vstack([c, c[:1]]), 401)[:-1]
    for variant in (
        identify(c, seed=5),
        identify(c @ rot.T + np.array([0.1, -0.4, 0.8])),
        identify(dense),
    ):
        assert str(variant) == "3_1"
    print("CRITERION 5 PASS: det/Fox cross-checks, factorization, invariance")


def test_criterion_6_vassiliev_order_1():
    """Constant invariants have zero alternating sum on 2-double-point curves."""
    fixtures = [
        singular_planar_two_loop(),
        singular_from_trefoil_diagram(),
        singular_from_figure_eight_diagram(),
    ]
    for s in fixtures:
        assert len(s.double_points) == 2
        assert vassiliev1_defect(s, lambda _k: 1) == 0
        classes = resolution_classes(s)
        assert len(classes) == 4
        for combo in classes:
            pts = resolve_all(s, combo)
            assert min_self_distance(pts, closed=True) > 0.0
            assert not classes[combo].is_unknown
    print("CRITERION 6 PASS: order-1 alternating sums vanish on 3 fixtures")


def test_criterion_7_winding_classes():
    """Winding flux matches the particle labels; budget 5 s."""
    t_start = time.monotonic()
    rng = np.random.default_rng(0)
    pool = ["3_1", "4_1", "5_1", "5_2", "6_1"]
    for _ in range(20):
        m1 = MonoidElement(tuple(rng.choice(pool, size=rng.integers(1, 4))))
        m2 = MonoidElement(tuple(rng.choice(pool, size=rng.integers(1, 4))))
        assert winding_class(omega(m1)) == complete(m1)
        loop = concat(omega(m1), reverse(omega(m2)))
        expected = complete(m1) - complete(m2)
        for x0 in (0.3, 0.5, 0.7):
            assert winding_class(loop, x0) == expected
        assert winding_class(reverse(omega(m1))) == -complete(m1)
    # merging below vs above the reading level reads the same class
    m1, m2 = MonoidElement.of("3_1"), MonoidElement.of("4_1")
    for x_merge in (0.3, 0.7):
        tl = Timeline(
            (
                Track(m1, ((0.0, 0.0), (0.4, x_merge))),
                Track(m2, ((0.01, 0.0), (0.4, x_merge))),
                Track(msum(m1, m2), ((0.4, x_merge), (1.0, 1.0))),
            ),
            (
                Event(0.0, "CREATE_0", (0,)),
                Event(0.01, "CREATE_0", (1,)),
                Event(0.4, "MERGE", (0, 1, 2)),
                Event(1.0, "EXIT_1", (2,)),
            ),
        )
        assert validate(tl).valid
        assert winding_class(tl) == complete(msum(m1, m2))
    elapsed = time.monotonic() - t_start
    assert elapsed < 5.0
    print(f"CRITERION 7 PASS: 20 random winding classes in {elapsed:.2f}s")


def test_criterion_8_subordination():
    """Single labeled particle in the trefoil's knotted interval."""
    rope = trefoil_rope()
    comp = [c for c in axis_decomposition(rope).a_components if not c.is_point][0]
    mid = 0.5 * (comp.lo + comp.hi)
    good = Configuration(((mid, MonoidElement.of("3_1")),))
    assert is_subordinate(good, rope) is True
    assert is_subordinate(Configuration(((mid, MonoidElement.of("4_1")),)), rope) is False
    assert is_subordinate(Configuration(((0.4, MonoidElement.of("3_1")),)), rope) is False
    print("CRITERION 8 PASS: subordination accepts the labeled interval only")
