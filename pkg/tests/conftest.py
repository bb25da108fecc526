import pytest

from mayerfield import beam

ACCEPTANCE_LINES = []


@pytest.fixture
def params():
    return beam.BeamParams.from_any(W0=1.0, k=100.0)


@pytest.fixture
def two_slits():
    return beam.SlitConfig(3.0)


@pytest.fixture
def one_slit():
    return beam.SlitConfig(0.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
