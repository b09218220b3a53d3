"""Shared pytest plumbing: the acceptance-criteria summary block.

Acceptance tests record one (description, passed) entry per criterion;
a single PASS/FAIL line per criterion is printed after the test run so
the verdicts are visible regardless of output capturing.
"""

import pytest

_RESULTS: dict[int, tuple[str, bool]] = {}


@pytest.fixture(scope="session")
def criterion_log():
    return _RESULTS


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(_RESULTS):
        desc, ok = _RESULTS[num]
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"CRITERION {num:2d} [{verdict}] {desc}")
