import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Records one PASS/FAIL line per acceptance criterion and returns the verdict."""

    def record(criterion, passed, detail):
        line = f"criterion {criterion:>4} {'PASS' if passed else 'FAIL'}: {detail}"
        print(line)
        _ACCEPTANCE.append((criterion, line))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE, key=lambda item: item[0]):
            terminalreporter.write_line(line)
