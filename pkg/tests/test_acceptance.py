"""Golden-value acceptance suite: one test and one printed line per criterion.

Run directly (``python3 tests/test_acceptance.py``) for the bare report.
"""
import sys

import pytest

from starflux.acceptance import CRITERIA, DEFAULT_SEED, GOLDEN_PAIRS, _expected_flux, run_criterion
from starflux.fedosov import FedosovData
from starflux.flux import flux_def_of_loop

K = 3


def _run(n, capsys):
    res = run_criterion(n, K, DEFAULT_SEED)
    with capsys.disabled():
        print("\n" + res.line())
    return res


@pytest.mark.xfail(strict=True, reason="the d/dtheta2 golden value has the opposite sign of "
                                       "i(d/dtheta2)(dtheta1 ^ dtheta2) = -dtheta1; see README")
def test_criterion_01_torus_flux_golden_values(capsys):
    res = _run(1, capsys)
    assert res.passed, res.detail


def test_criterion_01_parts_that_hold():
    # the d/dtheta1 golden values hold literally; the d/dtheta2 loop holds up to the contraction sign
    for C in GOLDEN_PAIRS:
        data = FedosovData(None, C, K=K)
        assert flux_def_of_loop((1, 0), data) == _expected_flux(C, (1, 0), K)
        assert flux_def_of_loop((0, 1), data) == -_expected_flux(C, (0, 1), K)


@pytest.mark.parametrize("n", [n for n in CRITERIA if n != 1])
def test_criterion(n, capsys):
    res = _run(n, capsys)
    assert res.passed, res.detail


if __name__ == "__main__":
    from starflux.acceptance import run_acceptance
    results = run_acceptance(K, DEFAULT_SEED, echo=print)
    sys.exit(0 if all(r.passed for r in results) else 1)
