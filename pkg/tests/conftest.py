from __future__ import annotations

from pathlib import Path

import pytest

from paltime import Vocabulary, enumerate_universe, parse
from paltime.formula import Pre, Post, Prop
from paltime import scenarios

DATA = Path(__file__).resolve().parents[1] / "src" / "paltime" / "data"

# criterion number -> (passed, seconds); filled by test_acceptance
CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        ok, secs = CRITERIA[k]
        terminalreporter.write_line(f"CRITERION {k} {'PASS' if ok else 'FAIL'} ({secs:.1f}s)")


@pytest.fixture(scope="session")
def ab():
    return Vocabulary(("a", "b"), ("p", "q"), horizon=2)


@pytest.fixture(scope="session")
def small_universe(ab):
    """Two actions, horizon 1, a handful of atoms: 100-odd trees."""
    return enumerate_universe(ab, 1, [Prop("p"), Pre(("a",)), Post("a")])


@pytest.fixture(scope="session")
def shop():
    return scenarios.shopping_universe()


@pytest.fixture
def P(ab):
    return lambda text: parse(text, ab)
