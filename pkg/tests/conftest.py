import json
from pathlib import Path

import numpy as np
import pytest

# one seed for every randomized property test
SEED = 1729

GOLDEN = json.loads((Path(__file__).parent / "golden" / "golden.json").read_text())

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def golden():
    return GOLDEN


def bell_matrix():
    a = np.zeros(4, complex)
    a[0] = a[3] = 1 / np.sqrt(2)
    return np.outer(a, a.conj())


def ghz_matrix():
    a = np.zeros(8, complex)
    a[0] = a[7] = 1 / np.sqrt(2)
    return np.outer(a, a.conj())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
