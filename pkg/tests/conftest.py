from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from koszulkit import linalg
from koszulkit.cli import load_file
from koszulkit.words import Q

settings.register_profile(
    "koszulkit",
    max_examples=200,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("koszulkit")


def fixture(name: str):
    return load_file(name)


@pytest.fixture(scope="session")
def ym():
    return fixture("yang_mills")


@pytest.fixture(scope="session")
def sym3():
    return fixture("symmetric_d3")


@pytest.fixture(scope="session")
def trunc():
    return fixture("truncated_x3")


@pytest.fixture(scope="session")
def xyx():
    return fixture("xyx")


@st.composite
def space_shape(draw):
    nletters = draw(st.integers(1, 3))
    degree = draw(st.integers(1, 4 if nletters < 3 else 3))
    return nletters, degree


@st.composite
def vectors(draw, nletters: int, degree: int, max_count: int = 4):
    """Sparse vectors over X^(degree) with small integer coefficients."""
    size = nletters**degree
    count = draw(st.integers(0, max_count))
    out = []
    for _ in range(count):
        idx = draw(st.lists(st.integers(0, size - 1), min_size=1, max_size=3, unique=True))
        vec = {}
        for i in idx:
            w = tuple((i // nletters**p) % nletters for p in reversed(range(degree)))
            vec[w] = Q(draw(st.sampled_from([-3, -2, -1, 1, 2, 5])))
        out.append(vec)
    return out


@st.composite
def subspaces(draw, nletters: int, degree: int, max_count: int = 4):
    return linalg.span(draw(vectors(nletters, degree, max_count)), degree)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
