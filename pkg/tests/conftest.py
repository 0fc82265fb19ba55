import numpy as np
import pytest
from hypothesis import strategies as st

from fuzzstat import AlphaGrid, FuzzyNumber

DYADIC = 256


@pytest.fixture
def grid33():
    return AlphaGrid.uniform(33)


def dyadic_fuzzy(rng: np.random.Generator, grid: AlphaGrid) -> FuzzyNumber:
    """Random fuzzy number whose endpoints are multiples of 1/256."""
    L = grid.resolution
    core_lo = rng.integers(-4 * DYADIC, 4 * DYADIC)
    core_hi = core_lo + rng.integers(0, 2 * DYADIC)
    lower = core_lo - np.cumsum(rng.integers(0, 8, L)[::-1])[::-1]
    upper = core_hi + np.cumsum(rng.integers(0, 8, L)[::-1])[::-1]
    lower = lower - lower[-1] + core_lo
    upper = upper - upper[-1] + core_hi
    return FuzzyNumber(grid, lower / DYADIC, upper / DYADIC)


@st.composite
def fuzzy_numbers(draw, grid=AlphaGrid.uniform(33)):
    seed = draw(st.integers(0, 2**32 - 1))
    return dyadic_fuzzy(np.random.default_rng(seed), grid)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
