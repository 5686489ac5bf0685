import numpy as np
import pytest

from zncover import rh
from zncover.curve import make_curve
from zncover.periods import period_matrix

from oracles import random_constants

N3_POINTS = (0, 0.7 + 0.2j, 1.6)
LAMBDA0 = 0.8 + 1.1j


@pytest.fixture(scope="session")
def n3_curve():
    return make_curve(3, N3_POINTS)


@pytest.fixture(scope="session")
def n3_periods(n3_curve):
    return period_matrix(n3_curve)


@pytest.fixture(scope="session")
def n3_monodromy():
    c, d = random_constants(np.random.default_rng(5), 2)
    return rh.build_monodromy(3, 1, c, d)


@pytest.fixture(scope="session")
def n3_solution(n3_curve, n3_periods, n3_monodromy):
    return rh.solve_Y(n3_curve, n3_monodromy, LAMBDA0, n3_periods)


@pytest.fixture(scope="session")
def periods_cache():
    """Period data keyed by (N, lambdas); shared across modules."""
    cache = {}

    def get(N, lams):
        key = (N, tuple(complex(x) for x in lams))
        if key not in cache:
            cache[key] = period_matrix(make_curve(N, lams))
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
