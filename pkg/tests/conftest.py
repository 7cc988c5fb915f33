import numpy as np
import pytest

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, title, ok, detail)``."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number, title, ok, detail=""):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
