"""Acceptance suite: ten numbered criteria at their stated tolerances.

Runs under pytest (one test per criterion, each printing a pass/fail line) or
directly as ``python3 tests/test_acceptance.py``.
"""
import sys

import pytest

from lorentzhol.verify import run_verify, summary_lines

CRITERION_IDS = list(range(1, 11))


@pytest.fixture(scope="module")
def acceptance_report():
    return run_verify()


@pytest.mark.parametrize("cid", CRITERION_IDS)
def test_criterion(acceptance_report, cid, capsys):
    result = next(r for r in acceptance_report["criteria"] if r["id"] == cid)
    with capsys.disabled():
        print(f"\ncriterion {cid} {'PASS' if result['passed'] else 'FAIL'}: {result['name']} {result['detail']}")
    assert result["passed"], result["detail"]


def test_suite_covers_every_criterion(acceptance_report):
    assert sorted(r["id"] for r in acceptance_report["criteria"]) == CRITERION_IDS


if __name__ == "__main__":
    report = run_verify()
    print("\n".join(summary_lines(report)))
    sys.exit(0 if report["status"] == "certified" else 1)
