import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(RESULTS):
        ok, detail = RESULTS[i]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {i}: {detail}")
