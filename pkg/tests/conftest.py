from __future__ import annotations

import random

import pytest

from herm2.ring import Case, make_ring


@pytest.fixture(params=[Case.CASE1, Case.CASE2], ids=["case1", "case2"])
def ring(request):
    return make_ring(request.param, 1, 1, 16)


@pytest.fixture
def ring1():
    return make_ring(Case.CASE1, 1, 1, 16)


@pytest.fixture
def ring2():
    return make_ring(Case.CASE2, 1, 1, 16)


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
