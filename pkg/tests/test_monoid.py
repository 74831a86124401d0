"""Free commutative monoid and its group completion."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ropelab.monoid import (
    GrothendieckElement,
    MonoidElement,
    complete,
    extend_linearly,
    gdiff,
    msum,
    parse_element,
)

labels = st.sampled_from(["3_1", "4_1", "5_1", "5_2", "6_1"])
monoid_elements = st.lists(labels, max_size=6).map(lambda ls: MonoidElement(tuple(ls)))
group_elements = st.dictionaries(labels, st.integers(-4, 4), max_size=4).map(
    lambda d: GrothendieckElement(tuple(d.items()))
)


def test_unit_and_ordering():
    assert MonoidElement.unit().is_unit
    assert MonoidElement.of("4_1", "3_1") == MonoidElement.of("3_1", "4_1")
    assert str(MonoidElement.unit()) == "0_1"


@given(monoid_elements, monoid_elements)
@settings(max_examples=50, deadline=None)
def test_msum_commutative_and_complete_additive(a, b):
    assert msum(a, b) == msum(b, a)
    assert complete(msum(a, b)) == complete(a) + complete(b)


@given(monoid_elements, monoid_elements)
@settings(max_examples=50, deadline=None)
def test_gdiff_antisymmetric(a, b):
    assert gdiff(a, b) == -gdiff(b, a)
    assert gdiff(a, a).is_zero


@given(group_elements, group_elements, group_elements)
@settings(max_examples=50, deadline=None)
def test_group_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert x + (-x) == GrothendieckElement.zero()
    assert x - y == x + (-y)


@given(group_elements)
@settings(max_examples=50, deadline=None)
def test_parse_str_roundtrip(x):
    assert parse_element(str(x)) == x


def test_parse_examples():
    assert parse_element("3_1 + 2*4_1 - 5_2").as_dict() == {"3_1": 1, "4_1": 2, "5_2": -1}
    assert parse_element("0").is_zero
    with pytest.raises(ValueError):
        parse_element("3_1 & 4_1")


@given(group_elements, group_elements)
@settings(max_examples=50, deadline=None)
def test_extend_linearly_is_linear(x, y):
    values = {"3_1": 1, "4_1": -2, "5_1": 3, "5_2": 5, "6_1": 0}
    assert extend_linearly(values, x + y) == extend_linearly(values, x) + extend_linearly(values, y)


def test_extend_linearly_requires_known_labels():
    with pytest.raises(KeyError):
        extend_linearly({}, complete(MonoidElement.of("3_1")))
