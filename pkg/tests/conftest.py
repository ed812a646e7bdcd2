import math

from hypothesis import settings
import pytest

from brownpair import BathSpec

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=40)
settings.load_profile("repro")

ACCEPTANCE_LINES = []


@pytest.fixture
def spec():
    """Intermediate distance, zero temperature."""
    return BathSpec(eta=0.1, mass_M=1.0, omega_cutoff=5.0, beta=math.inf, k0L=1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
