"""Acceptance gate: every check must pass, within its time budget, at seed 42."""

import pytest

from dtslearn.acceptance import _CHECKS, run_check

SEED = 42


@pytest.mark.parametrize("index", range(1, len(_CHECKS) + 1),
                         ids=[name for name, _, _ in _CHECKS])
def test_acceptance_check(index):
    result = run_check(index, SEED)
    status = "PASS" if result.ok else "FAIL"
    print(f"{status}  {result.index:2d}  {result.name}  "
          f"{result.elapsed:.2f}s  {result.detail}")
    assert result.ok, f"{result.name}: {result.detail}"


def test_suite_is_deterministic_for_a_seed():
    a = run_check(4, SEED)
    b = run_check(4, SEED)
    assert (a.ok, a.detail) == (b.ok, b.detail)
