import time
from contextlib import contextmanager

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

# criterion number -> (description, passed, seconds)
ACCEPTANCE: dict[int, tuple[str, bool, float]] = {}


@contextmanager
def criterion(number: int, description: str, budget: float | None = None):
    """Record a criterion's outcome; exceeding ``budget`` seconds counts as failure."""
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        ACCEPTANCE[number] = (description, False, time.perf_counter() - start)
        raise
    elapsed = time.perf_counter() - start
    ok = budget is None or elapsed < budget
    ACCEPTANCE[number] = (description, ok, elapsed)
    if not ok:
        pytest.fail(f"criterion {number} took {elapsed:.1f} s, budget {budget:.0f} s")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        desc, ok, secs = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {desc} ({secs:.1f} s)")


@pytest.fixture
def rng():
    return np.random.default_rng(20170415)
