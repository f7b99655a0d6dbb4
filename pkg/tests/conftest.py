import numpy as np
import pytest

_ACCEPTANCE = []


def pytest_configure(config):
    config._acceptance_lines = _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion and assert it."""

    def record(number: int, title: str, passed: bool, detail: str = ""):
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE.append((number, f"[{status}] {number:2d}. {title}" + (f" -- {detail}" if detail else "")))
        assert passed, f"criterion {number} ({title}) failed: {detail}"

    return record
