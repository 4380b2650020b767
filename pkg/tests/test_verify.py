import pytest

from quadheights.verify import SUITES, verify

SMALL = {
    "product-formula": {"samples": 200},
    "weil-sum": {"samples": 60},
    "base-change": {"samples": 10},
    "positions": {"samples": 60},
    "conic-lemma": {"samples": 60},
    "sym2-identity": {"samples": 20},
    "transfer-defect": {"samples": 60},
}


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_on_small_sample(name):
    result = verify(name, **SMALL[name])
    assert result.passed, result.line()
    assert result.line().startswith("PASS")


def test_suites_are_seeded():
    a = verify("transfer-defect", samples=40, seed=3)
    b = verify("transfer-defect", samples=40, seed=3)
    assert a.stats == b.stats


def test_unknown_suite():
    with pytest.raises(KeyError):
        verify("nope")
