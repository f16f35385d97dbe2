import numpy as np
import pytest

from torusnorms.polynomial import build, constant, variable


@pytest.fixture
def z2():
    return variable(2, 0), variable(2, 1), constant(2, 1)


@pytest.fixture
def z3():
    return variable(3, 0), variable(3, 1), variable(3, 2), constant(3, 1)


def random_poly(rng, n, deg, density=0.6):
    import itertools
    terms = []
    for a in itertools.product(range(deg + 1), repeat=n):
        if sum(a) <= deg and rng.random() < density:
            terms.append((a, complex(rng.standard_normal(), rng.standard_normal())))
    if not terms:
        terms = [((0,) * n, 1.0)]
    return build(n, terms)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance verdicts, echoed after the run so they survive output capture
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
