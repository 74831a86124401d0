"""Diagrams, invariants, identification, and singular curves."""

import math

import numpy as np
import pytest

from ropelab.errors import IdentificationError
from ropelab.fixtures import (
    closed_figure_eight,
    closed_granny,
    closed_trefoil,
    singular_from_trefoil_diagram,
    singular_planar_two_loop,
    trefoil_rope,
)
from ropelab.geometry import extend, min_self_distance, resample_polyline
from ropelab.knots import (
    KnotClass,
    SingularCurve,
    alexander,
    connected_sum,
    determinant,
    diagram,
    fox_colorings,
    identify,
    resolution_classes,
    resolve,
    resolve_all,
    simplify,
)


def _simplified(curve):
    return simplify(diagram(curve))


def test_round_circle_is_unknot():
    u = np.linspace(0.0, 2.0 * math.pi, 60, endpoint=False)
    circle = np.column_stack([np.cos(u), np.sin(u), np.zeros_like(u)])
    d = _simplified(circle)
    assert d.n_crossings == 0
    assert identify(circle).is_unknot


def test_trefoil_invariants():
    d = _simplified(closed_trefoil())
    assert determinant(d) == 3
    assert alexander(d) == (1, -1, 1)
    assert fox_colorings(d, 3) == 9
    assert str(identify(closed_trefoil())) == "3_1"


def test_figure_eight_invariants():
    d = _simplified(closed_figure_eight())
    assert determinant(d) == 5
    assert alexander(d) == (1, -3, 1)
    assert fox_colorings(d, 5) == 25
    assert str(identify(closed_figure_eight())) == "4_1"


def test_granny_factorizes():
    assert str(identify(closed_granny())) == "2*3_1"
    d = _simplified(closed_granny())
    assert alexander(d) == (1, -2, 3, -2, 1)


def test_alexander_is_palindromic():
    for c in (closed_trefoil(), closed_figure_eight(), closed_granny()):
        a = alexander(_simplified(c))
        assert a == tuple(reversed(a))


def test_identify_invariances():
    c = closed_trefoil()
    ang = np.array([0.4, -0.9, 1.3])
    cx, sx = math.cos(ang[0]), math.sin(ang[0])
    rot = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]], dtype=float)
    moved = c @ rot.T + np.array([0.3, 0.7, -0.2])
    assert str(identify(moved)) == "3_1"
    assert str(identify(c, seed=11)) == "3_1"
    dense = resample_polyline(np.vstack([c, c[:1]]), 401)[:-1]
    assert str(identify(dense)) == "3_1"


def test_identify_long_curve():
    assert str(identify(extend(trefoil_rope()))) == "3_1"


def test_connected_sum_classes():
    s = connected_sum(closed_trefoil(), closed_figure_eight())
    assert str(identify(s)) == "3_1 + 4_1"


def test_knotclass_monoid_roundtrip():
    k = KnotClass.of("3_1", "3_1", "4_1")
    assert str(k) == "2*3_1 + 4_1"
    assert not k.is_unknown
    u = KnotClass.unknown(17, (1, -1, 2, -1, 1))
    assert u.is_unknown
    assert "det=17" in str(u.to_monoid())


def test_singular_curve_marks_must_coincide():
    pts = closed_trefoil()
    with pytest.raises(IdentificationError):
        SingularCurve(pts, ((0, 50),))


def test_resolve_consumes_marks():
    s = singular_planar_two_loop()
    assert len(s.double_points) == 2
    once = resolve(s, 0, 1)
    assert len(once.double_points) == 1
    pts = resolve_all(s, (1, -1))
    assert min_self_distance(pts, closed=True) > 0.0


def test_trefoil_shadow_resolutions():
    s = singular_from_trefoil_diagram()
    classes = resolution_classes(s)
    labels = {str(v) for v in classes.values()}
    assert "3_1" in labels
    assert "0_1" in labels
