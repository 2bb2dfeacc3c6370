import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)



def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES, TITLES

    reports = [r for group in terminalreporter.stats.values() for r in group if hasattr(r, "nodeid")]
    if not any("test_acceptance" in r.nodeid for r in reports):
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(TITLES):
        terminalreporter.write_line(LINES.get(number, f"criterion {number:2d} FAIL: {TITLES[number]} (not run or errored)"))
