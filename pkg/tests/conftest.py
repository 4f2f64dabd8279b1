import os

import pytest
from hypothesis import HealthCheck, settings

from wasscert.measure1d import PotentialSpec, normalize, standard_gaussian

settings.register_profile("ci", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def gamma():
    return standard_gaussian()


@pytest.fixture(scope="session")
def quartic():
    """exp(-x^2/2 - x^4/4) / Z, the standard non-Gaussian test measure."""
    return normalize(PotentialSpec.polynomial([0, 0, 0.5, 0, 0.25]))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
