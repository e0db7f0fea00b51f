"""The acceptance criteria at full sample sizes and their stated tolerances.

One test per criterion; each prints a PASS/FAIL line, and the lines are
repeated together in the terminal summary.
"""

import pytest

from semigroup_lab.verify import CRITERIA, run_criterion

pytestmark = pytest.mark.acceptance


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number, record_criterion):
    result = run_criterion(number, quick=False)
    print(result.line())
    record_criterion(result.line())
    assert result.passed, result.detail
