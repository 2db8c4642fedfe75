import numpy as np
import pytest

# Verdict lines queued by tests/test_acceptance.py; emitted after the run
# through the terminal reporter, which pytest's fd-level capture never
# redirects, so the per-criterion PASS/FAIL lines are always visible.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
