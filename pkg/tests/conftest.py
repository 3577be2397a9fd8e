import numpy as np
import pytest

from subband_error import _backend
from subband_error.filters import design_halfband_lowpass

ACCEPTANCE = pytest.StashKey[list]()

BACKENDS = [_backend.python_backend] + (
    [_backend.compiled_backend] if _backend.compiled_backend is not None else []
)


@pytest.fixture(scope="session")
def halfband():
    return design_halfband_lowpass(30, 0.5)


@pytest.fixture(params=BACKENDS, ids=lambda b: b.name)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def verdict(request):
    """Record one acceptance line; the terminal summary prints them all."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number: int, passed: bool, detail: str) -> bool:
        lines.append((number, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
