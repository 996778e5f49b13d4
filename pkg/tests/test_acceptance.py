"""Acceptance suite: one test and one PASS/FAIL line per criterion.

The full ``check-all`` run (criteria 1 to 11 twice, plus the determinism
record) executes once per session. Run this file directly to print the
lines without pytest.
"""

import sys

import pytest

from contactval import checks, cli

CRITERIA = list(checks.CHECKS) + [checks.DETERMINISM_RECORD]
LINES: list[str] = []


def format_line(number: int, record) -> str:
    return f"criterion {number:2d}: {'PASS' if record.passed else 'FAIL'}  {record.name}"


@pytest.fixture(scope="module")
def suite():
    records, _ = cli.run_check_all(checks.DEFAULT_SEED)
    by_name = {r.name: r for r in records}
    LINES.clear()
    for i, name in enumerate(CRITERIA, start=1):
        LINES.append(format_line(i, by_name[name]))
    return by_name


def test_one_record_per_criterion(suite):
    assert list(suite) == CRITERIA


@pytest.mark.parametrize("name", CRITERIA)
def test_criterion(suite, name):
    record = suite[name]
    print(format_line(CRITERIA.index(name) + 1, record))
    assert record.passed, f"{name}: expected {record.expected!r}, observed {record.observed!r}"


if __name__ == "__main__":
    records, elapsed = cli.run_check_all(checks.DEFAULT_SEED)
    for i, rec in enumerate(records, start=1):
        print(format_line(i, rec))
    print(f"elapsed {elapsed:.1f} s")
    sys.exit(0 if all(r.passed for r in records) else 1)
