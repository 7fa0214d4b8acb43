import os
import time

import pytest
from hypothesis import HealthCheck, settings

from qaw import bounds

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def _fresh_bounds():
    bounds.reset()
    yield
    bounds.reset()


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Run one acceptance criterion under its time limit and log the outcome."""

    def check(number: int, title: str, limit: float, body):
        start = time.perf_counter()
        detail, error = "", None
        try:
            detail = body() or ""
        except Exception as exc:  # recorded, then re-raised below
            error = exc
        seconds = time.perf_counter() - start
        passed = error is None and seconds < limit
        if error is None and not passed:
            detail = f"over the {limit:g} s limit"
        elif error is not None:
            detail = f"{type(error).__name__}: {error}".splitlines()[0][:160]
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {title} ({seconds:.2f} s / {limit:g} s) {detail}"
        _ACCEPTANCE.append((number, line))
        print(line)
        if error is not None:
            raise error
        assert passed, line

    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
