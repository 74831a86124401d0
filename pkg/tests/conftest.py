"""Shared fixtures: expensive loop families are built once per session."""

import pytest

from ropelab.loops import loop_verify, tie_and_push


@pytest.fixture(scope="session")
def loop_31():
    return tie_and_push("3_1", 2.0)


@pytest.fixture(scope="session")
def loop_41():
    return tie_and_push("4_1", 2.0)


@pytest.fixture(scope="session")
def report_31(loop_31):
    return loop_verify(loop_31, 2.0)
