import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from svm01.core import Dataset
from svm01.data_io import fixtures

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def fx():
    return fixtures()


@pytest.fixture
def xor(fx):
    return fx["xor"]


@pytest.fixture
def r35(fx):
    return fx["remark35"]


@pytest.fixture
def r53(fx):
    return fx["remark53"]


def random_dataset(rng, m_max=10, n_max=4, m_min=2):
    m = int(rng.integers(m_min, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    return Dataset(rng.uniform(-1, 1, (m, n)), rng.choice([-1.0, 1.0], m))


@st.composite
def datasets(draw, m_max=8, n_max=3, grid=False):
    """Small datasets in [-1, 1]^n; ``grid`` draws coordinates from multiples
    of 1/8, which keeps every subset problem well conditioned."""
    m = draw(st.integers(1, m_max))
    n = draw(st.integers(1, n_max))
    if grid:
        coord = st.integers(-8, 8).map(lambda k: k / 8)
    else:
        coord = st.floats(-1, 1, allow_nan=False, allow_infinity=False, width=32)
    X = draw(st.lists(st.lists(coord, min_size=n, max_size=n), min_size=m, max_size=m))
    y = draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=m, max_size=m))
    return Dataset(np.array(X, dtype=float), np.array(y))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
