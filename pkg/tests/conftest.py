import numpy as np
import pytest

from chernflow.calculus import random_unit_vectors
from chernflow.hopf import LambdaMetric

# key -> (passed, detail), filled by the acceptance module.
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


def random_point(rng, n, lo=0.5, hi=2.0):
    return random_unit_vectors(rng, 1, n)[0] * rng.uniform(lo, hi)


def random_hopf(rng):
    n = int(rng.integers(2, 5))
    return LambdaMetric(n, float(rng.uniform(-3.0, 0.99))), random_point(rng, n)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k[1:])):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {key}: {detail}")
