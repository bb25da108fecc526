"""The ten acceptance criteria at their stated tolerances, on the default
configuration.  Each test prints one PASS/FAIL line; the lines are also
collected into a summary section at the end of the pytest run.

``run_all_checks`` executes every suite twice (the second pass in a scratch
directory) so criterion 10 can compare output bytes.
"""

import pytest

import conftest
from mayerfield.cli import run_all_checks
from mayerfield.config import RunConfig


@pytest.fixture(scope="session")
def criteria(tmp_path_factory):
    out = tmp_path_factory.mktemp("all_checks")
    crits = {c.number: c for c in run_all_checks(RunConfig(), str(out))}
    assert (out / "all_checks.txt").exists()
    return crits


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(criteria, number):
    c = criteria[number]
    line = c.line()
    if c.budget is not None:
        line += f" [runtime {c.seconds:.1f} s, budget {c.budget:g} s]"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert c.passed, line
    assert c.within_budget, line
