import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from buresalg.algebra import Algebra

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SHAPES = {"M2": (2,), "M3": (3,), "M2+M3": (2, 3), "diag4": (1, 1, 1, 1)}

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
shapes = st.sampled_from(sorted(SHAPES))


def algebra_of(name):
    return Algebra(SHAPES[name])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def qubit():
    """The commuting pair diag(.5, .5), diag(.75, .25) on M2."""
    from buresalg.forms import PositiveForm
    alg = Algebra.full(2)
    return alg, PositiveForm(alg.diag([0.5, 0.5])), PositiveForm(alg.diag([0.75, 0.25]))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
