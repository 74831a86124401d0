"""Particle timelines: validation, winding classes, subordination."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ropelab.errors import NonGenericLoopError
from ropelab.fixtures import trefoil_rope
from ropelab.mccord import (
    Configuration,
    Event,
    Timeline,
    Track,
    concat,
    empty_timeline,
    is_subordinate,
    omega,
    reverse,
    validate,
    winding_class,
    winding_class_auto,
)
from ropelab.monoid import MonoidElement, complete, msum

labels = st.sampled_from(["3_1", "4_1", "5_1", "5_2"])
elements = st.lists(labels, min_size=1, max_size=4).map(lambda ls: MonoidElement(tuple(ls)))


def test_empty_timeline_is_the_constant_loop():
    tl = empty_timeline()
    assert validate(tl).valid
    assert winding_class(tl).is_zero


@given(elements)
@settings(max_examples=30, deadline=None)
def test_omega_winds_once(m):
    tl = omega(m)
    assert validate(tl).valid
    assert winding_class(tl) == complete(m)


@given(elements, elements)
@settings(max_examples=30, deadline=None)
def test_concat_adds_and_reverse_negates(m1, m2):
    tl = concat(omega(m1), reverse(omega(m2)))
    assert validate(tl).valid
    assert winding_class(tl) == complete(m1) - complete(m2)


def test_level_independence():
    tl = concat(omega(MonoidElement.of("3_1")), reverse(omega(MonoidElement.of("4_1"))))
    vals = {str(winding_class(tl, x0)) for x0 in (0.3, 0.5, 0.7)}
    assert vals == {"3_1 - 4_1"}


def _merge_timeline(m1, m2, x_merge):
    merged = msum(m1, m2)
    tracks = (
        Track(m1, ((0.0, 0.0), (0.4, x_merge))),
        Track(m2, ((0.01, 0.0), (0.4, x_merge))),
        Track(merged, ((0.4, x_merge), (1.0, 1.0))),
    )
    events = (
        Event(0.0, "CREATE_0", (0,)),
        Event(0.01, "CREATE_0", (1,)),
        Event(0.4, "MERGE", (0, 1, 2)),
        Event(1.0, "EXIT_1", (2,)),
    )
    return Timeline(tracks, events)


def test_merge_invariance():
    m1, m2 = MonoidElement.of("3_1"), MonoidElement.of("4_1")
    low = _merge_timeline(m1, m2, 0.3)   # merge below the reading level
    high = _merge_timeline(m1, m2, 0.7)  # merge above it
    assert validate(low).valid and validate(high).valid
    assert winding_class(low) == winding_class(high) == complete(msum(m1, m2))


def test_validate_flags_bad_merge_label():
    m1, m2 = MonoidElement.of("3_1"), MonoidElement.of("4_1")
    tl = _merge_timeline(m1, m2, 0.3)
    bad = Timeline(
        tl.tracks[:2] + (Track(MonoidElement.of("5_1"), tl.tracks[2].breakpoints),),
        tl.events,
    )
    rep = validate(bad)
    assert any("label is not the product" in p for p in rep.problems)


def test_validate_flags_short_track():
    tl = Timeline((Track(MonoidElement.of("3_1"), ((0.0, 0.0),)),), ())
    assert not validate(tl).valid


def test_winding_rejects_breakpoint_on_level():
    tl = Timeline(
        (Track(MonoidElement.of("3_1"), ((0.0, 0.0), (0.5, 0.5), (1.0, 1.0))),),
        (Event(0.0, "CREATE_0", (0,)), Event(1.0, "EXIT_1", (0,))),
    )
    with pytest.raises(NonGenericLoopError):
        winding_class(tl, 0.5)
    assert winding_class_auto(tl, 0.5) == complete(MonoidElement.of("3_1"))


def test_configuration_validation():
    with pytest.raises(ValueError):
        Configuration(((0.0, MonoidElement.of("3_1")),))
    with pytest.raises(ValueError):
        Configuration(((0.5, MonoidElement.unit()),))


def test_subordination_to_trefoil():
    rope = trefoil_rope()
    from ropelab.geometry import axis_decomposition

    comp = [c for c in axis_decomposition(rope).a_components if not c.is_point][0]
    mid = 0.5 * (comp.lo + comp.hi)
    good = Configuration(((mid, MonoidElement.of("3_1")),))
    assert is_subordinate(good, rope) is True
    wrong_label = Configuration(((mid, MonoidElement.of("4_1")),))
    assert is_subordinate(wrong_label, rope) is False
    misplaced = Configuration(((0.4, MonoidElement.of("3_1")),))
    assert is_subordinate(misplaced, rope) is False
