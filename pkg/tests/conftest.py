from __future__ import annotations

from pathlib import Path

import pytest

from planlingua.household import generate_dataset, household_domain
from planlingua.planner import available_backends
from planlingua.templates import augment_domain

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def domain():
    return household_domain()


@pytest.fixture(scope="session")
def augmented(domain):
    return augment_domain(domain)


@pytest.fixture(scope="session")
def dataset200():
    return generate_dataset(2024, 200)


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def acceptance(request):
    """Call with (number, ok, detail); records a summary line, then asserts."""
    lines = request.config.stash.setdefault(_LINES, [])

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)
        assert ok, line

    return report


_LINES = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
