"""Acceptance gate: every numbered criterion must hold at its stated
tolerance. One summary line per criterion is written straight to the
terminal (with capture suspended) so the pass/fail record is always
visible in the live pytest output."""

import pytest

from loopzeta import acceptance

_IDS = ["%02d-%s" % (idx, name) for idx, name, _ in acceptance.CRITERIA]


@pytest.mark.parametrize(("index", "name"),
                         [(idx, name) for idx, name, _ in acceptance.CRITERIA],
                         ids=_IDS)
def test_criterion(index, name, capsys):
    result = acceptance.run_criterion(index)
    with capsys.disabled():
        print("%s criterion %2d [%s]: %s"
              % ("PASS" if result.passed else "FAIL",
                 index, name, result.detail), flush=True)
    assert result.passed, "criterion %d [%s]: %s" % (index, name, result.detail)
