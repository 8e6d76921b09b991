import numpy as np
import pytest

from slowpolar import SlowParams, gilbert_elliott, memoryless_bsc

# criterion number -> (title, passed); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def ge():
    return gilbert_elliott(0.1, 0.3, 0.02, 0.3)


@pytest.fixture
def bsc():
    return memoryless_bsc(0.1)


@pytest.fixture
def small():
    return SlowParams(1, 2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}")
