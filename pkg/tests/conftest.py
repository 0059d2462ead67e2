from fractions import Fraction

import pytest
from hypothesis import strategies as st

from renewal_lab.masses import make_masses

ACCEPTANCE_LINES: list[str] = []


@st.composite
def mass_vectors(draw, k_max=6, dense=False):
    """Step laws with small integer weights; ``dense`` forces p_1 in (0, 1)."""
    k = draw(st.integers(1 if not dense else 2, k_max))
    low = 1 if dense else 0
    weights = draw(st.lists(st.integers(low, 9), min_size=k, max_size=k))
    if dense:
        weights[-1] = max(weights[-1], 1)
    if sum(weights) == 0:
        weights[-1] = 1
    total = sum(weights)
    return make_masses([Fraction(w, total) for w in weights])


@pytest.fixture
def half_half():
    return make_masses(["1/2", "1/2"])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
