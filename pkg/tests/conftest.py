import numpy as np
import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one acceptance line: ``record(number, title, ok, detail)``."""
    def _record(number, title, ok, detail=""):
        ACCEPTANCE[number] = (title, bool(ok), detail)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def all_step_sequences(n):
    """Every +-1 sequence of length ``n`` as rows of a ``(2**n, n)`` array."""
    bits = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
    return (2 * bits - 1).astype(np.int64)
