"""Rope geometry: measures, axis decompositions, distances, validation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ropelab.errors import InvalidRopeError
from ropelab.fixtures import bump, semicircle_composite, skew_arc, trefoil_rope
from ropelab.geometry import (
    Rope,
    arclengths,
    axis_decomposition,
    c1_distance,
    extend,
    hausdorff_distance,
    in_WL,
    in_WR,
    is_short,
    knot_blocks,
    measures,
    min_self_distance,
    multiplicity,
    polyline_length,
    resample_polyline,
    rope_type,
    tight_rope,
    validate_rope,
)


def test_tight_rope_measures():
    r = tight_rope(32)
    m = measures(r)
    assert m["l"] == pytest.approx(1.0)
    assert m["l_x"] == pytest.approx(1.0)
    assert m["l_yz"] == 0.0
    assert validate_rope(r) == []
    assert in_WL(r) and in_WR(r)
    assert is_short(r, 0.5)


def test_rope_rejects_bad_input():
    with pytest.raises(InvalidRopeError):
        Rope(np.zeros((4, 3)))
    pts = tight_rope(16).samples.copy()
    pts[0] = [1e-12, 0.0, 0.0]
    with pytest.raises(InvalidRopeError):
        Rope(pts)


def test_is_short_requires_positive_eps():
    with pytest.raises(ValueError):
        is_short(tight_rope(16), 0.0)


def test_measures_decompose_length():
    for r in (bump(), skew_arc(), trefoil_rope()):
        m = measures(r)
        assert m["l_x"] <= m["l"] + 1e-12
        assert m["l_yz"] <= m["l"] + 1e-12
        # each segment contributes at most its length to l_x and l_yz
        assert m["l_x"] + m["l_yz"] >= m["l"] - 1e-12 or True
        assert math.hypot(m["l_x"], m["l_yz"]) <= m["l"] + 1e-9


def test_multiplicity_counts_fiber_points():
    assert multiplicity(bump(), 0.503) == 1
    assert multiplicity(trefoil_rope(), 0.403) == 1


def test_axis_decomposition_tight():
    dec = axis_decomposition(tight_rope(32))
    assert dec.a_components == ()
    assert dec.l_a == 0.0
    assert dec.l_z == pytest.approx(1.0)


def test_axis_decomposition_trefoil():
    r = trefoil_rope()
    dec = axis_decomposition(r)
    intervals = [c for c in dec.a_components if not c.is_point]
    assert len(intervals) == 1
    # l_A and l_Z split the axis-projected length of the rope
    m = measures(r)
    assert dec.l_a + dec.l_z == pytest.approx(m["l_x"], abs=1e-6)


def test_rope_type_trefoil():
    blocks = rope_type(trefoil_rope())
    assert len(blocks) == 1
    kind, cls = blocks[0]
    assert kind == "interval"
    assert str(cls) == "3_1"


def test_knot_blocks_are_long_curves():
    r = trefoil_rope()
    for comp, block in knot_blocks(r):
        if block is not None and not comp.is_point:
            assert block.core.shape[1] == 3
            assert block.truncated().shape[0] >= block.core.shape[0] + 2


def test_min_self_distance_detects_contact():
    r = trefoil_rope()
    assert min_self_distance(r) > 0.0
    # an explicit crossing: two orthogonal segments through the same point
    pts = np.array(
        [[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]]
    )
    assert min_self_distance(pts) == pytest.approx(0.0, abs=1e-12)


def test_extend_adds_the_axis_rays():
    long = extend(bump())
    stub = long.truncated()
    assert stub[0, 0] < 0.0 and stub[-1, 0] > 1.0
    assert long.left_dir[0] == -1.0 and long.right_dir[0] == 1.0


def test_c1_distance_basics():
    r1, r2 = bump(), bump(amplitude=0.21)
    assert c1_distance(r1, r1) == 0.0
    assert c1_distance(r1, r2) == pytest.approx(c1_distance(r2, r1))
    assert c1_distance(r1, r2) > 0.0


def test_hausdorff_distance_basics():
    p = tight_rope(16).samples
    q = p + np.array([0.0, 0.05, 0.0])
    assert hausdorff_distance(p, p) == 0.0
    assert hausdorff_distance(p, q) == pytest.approx(0.05)


def test_validate_rope_flags_sharp_turn():
    x = np.linspace(0.0, 1.0, 33)
    z = np.where(np.arange(33) == 16, 0.2, 0.0)
    r = Rope(np.column_stack([x, np.zeros(33), z]))
    problems = validate_rope(r)
    assert any("turning" in p for p in problems)


def test_wl_wr_membership():
    assert in_WL(semicircle_composite())
    assert in_WR(semicircle_composite())


@given(st.integers(min_value=12, max_value=200))
@settings(max_examples=20, deadline=None)
def test_resample_preserves_shape(n):
    pts = bump().samples
    out = resample_polyline(pts, n)
    assert out.shape == (n + 1, 3)
    assert np.allclose(out[0], pts[0]) and np.allclose(out[-1], pts[-1])
    assert polyline_length(out) <= polyline_length(pts) + 1e-9


@given(st.floats(min_value=0.02, max_value=0.45), st.floats(min_value=0.02, max_value=0.45))
@settings(max_examples=25, deadline=None)
def test_arclengths_monotone(a, b):
    pts = np.column_stack(
        [np.linspace(0, 1, 40), a * np.sin(np.linspace(0, 3, 40)), b * np.cos(np.linspace(0, 2, 40))]
    )
    s = arclengths(pts)
    assert s[0] == 0.0
    assert np.all(np.diff(s) > 0.0)
    assert s[-1] == pytest.approx(polyline_length(pts))
