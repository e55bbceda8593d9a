"""End-to-end acceptance gate.

Runs every criterion at its pinned tolerance and prints one pass/fail line
per criterion.  Criteria 4 and 5 carry 30 s runtime targets and criterion 1
a 2 minute target, enforced inside the criterion functions.
"""

import time

import pytest

from qcext.acceptance import CRITERIA

_DESCRIPTIONS = {
    1: "extension identity, exact quasiconvexity, bounded grid jumps",
    2: "operator contracts on 500 polygon pairs and the half-disk form",
    3: "finite covering indices upward, exclusion downward",
    4: "no-Lipschitz blow-up trend on the unit disk",
    5: "no-uniform-continuity gap collapse on the parabola body",
    6: "classifier agreement with the generators on the quartet",
    7: "usc counterexample wiring and hull forcing",
    8: "planted-failure sensitivity of the quasiconvexity checker",
}


@pytest.mark.parametrize("idx", sorted(CRITERIA))
def test_criterion(idx, capsys):
    t0 = time.time()
    ok, detail = CRITERIA[idx]()
    elapsed = time.time() - t0
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        print(f"\ncriterion {idx}: {status} ({elapsed:.1f}s) "
              f"- {_DESCRIPTIONS[idx]}")
        if not ok:
            print(f"  detail: {detail}")
    assert ok, f"criterion {idx} failed: {detail}"
