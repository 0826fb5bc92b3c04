import sys

import pytest

from nonspecific.core import MassFunction
from nonspecific.metaconflict import Partition
from nonspecific.pipeline import load_bakers


@pytest.fixture(scope="session")
def bakers():
    return load_bakers()


@pytest.fixture(scope="session")
def frame(bakers):
    return bakers.frame


@pytest.fixture(scope="session")
def ev(bakers):
    """Evidence by id."""
    return {e.id: e for e in bakers.evidences}


@pytest.fixture(scope="session")
def prior(bakers):
    return bakers.prior


@pytest.fixture(scope="session")
def bakers_partition():
    return Partition((("e2", "e3"), ("e1", "e4")))


@pytest.fixture
def P(frame):
    """Shorthand proposition builder using the bakers labels."""
    names = {"BO": {"bo"}, "BI": {"bi"}, "B": {"bo", "bi"}, "R": {"ro", "ri"},
             "I": {"bi", "ri"}, "O": {"bo", "ro"}, "*": None}

    def build(action="*", events=None):
        return frame.proposition(names[action], events)

    return build


def simple(frame, action, events, mass):
    return MassFunction.simple(frame.proposition(action, events), mass)


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        title, ok, detail = results[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
