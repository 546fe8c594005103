"""Acceptance criteria; one PASS/FAIL line per criterion (run with -s or see
the captured stdout in the tee'd log)."""
import pytest

from congest_mdst.acceptance import SUITES, format_line


@pytest.mark.acceptance
@pytest.mark.parametrize("suite", list(SUITES))
def test_acceptance(suite, capsys):
    results = SUITES[suite]()
    with capsys.disabled():
        print()
        for c in results:
            print(format_line(c), flush=True)
    failed = [format_line(c) for c in results if not c.passed]
    assert not failed, "\n".join(failed)
