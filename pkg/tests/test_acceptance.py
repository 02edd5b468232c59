"""Acceptance checklist: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass/fail
line per criterion (the same table ``websurf verify`` prints).
"""

import pytest

from websurf import verify


@pytest.mark.parametrize(
    "criterion", verify.CRITERIA, ids=[fn.__name__.replace("criterion_", "") for fn in verify.CRITERIA]
)
def test_acceptance_criterion(criterion):
    result = criterion()
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] criterion {result.index}: {result.name} ({result.seconds:.1f}s) {result.detail}")
    assert result.passed, f"criterion {result.index} ({result.name}): {result.detail}"
