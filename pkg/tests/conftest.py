import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

ACCEPTANCE_LINES = []


def rand_coords(rng, n, bound=9):
    # the 1/97 offset keeps accidental values like 0 and 1 away
    return [Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) + Fraction(1, 97)
            for _ in range(2 * n)]


def rand_nonzero(rng, bound=9):
    v = 0
    while v == 0:
        v = rng.randint(-bound, bound)
    return Fraction(v, rng.randint(1, bound))


def coord_vectors(n_min=3, n_max=6):
    frac = st.fractions(min_value=-6, max_value=6, max_denominator=7)
    return st.integers(n_min, n_max).flatmap(
        lambda n: st.lists(frac, min_size=2 * n, max_size=2 * n))


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
