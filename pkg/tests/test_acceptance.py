"""One test per acceptance criterion, run at the stated tolerances and budgets."""
import pytest

from optomech.acceptance import CRITERIA, run_acceptance

CRITERION_IDS = [prefix for prefix, _ in CRITERIA]


@pytest.mark.parametrize("prefix", CRITERION_IDS)
def test_criterion(prefix, capsys):
    results = run_acceptance(prefix)
    assert results, f"no results for {prefix}"
    with capsys.disabled():
        print()
        for r in results:
            print(f"    {r.line()}")
    failed = [r for r in results if not r.passed]
    assert not failed, "; ".join(f"{r.criterion_id} observed {r.observed:.6g} {r.detail}" for r in failed)


def test_every_criterion_represented():
    assert len(CRITERION_IDS) == 13
    seen = {r.criterion_id.split(".")[0] for r in run_acceptance()}
    assert seen == set(CRITERION_IDS)


def test_unknown_filter_is_empty():
    assert run_acceptance("nonexistent") == []
