import numpy as np
import pytest

from slrr import kernels

_NAMES = ("tangent_factors", "euclidean_factors", "gram_from_factors", "quad_form_sum", "gradient")


@pytest.fixture(params=kernels.AVAILABLE)
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    mod = kernels.get_backend(request.param)
    for name in _NAMES:
        monkeypatch.setattr(kernels, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
