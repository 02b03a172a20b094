import json

import pytest

from linlat.errors import OutOfGuard, OutOfRange
from linlat.verify import THEOREMS, pushdown_suite, verify_theorem


@pytest.mark.parametrize(
    "name,params",
    [
        ("thm_1.3", {"n": 3, "q": 2}),
        ("thm_1.4", {"n": 3, "q": 2}),
        ("thm_1.4", {"n": 2, "q": 3}),
        ("thm_1.5", {"n": 2, "q": 3}),
        ("thm_1.6", {"n": 2, "q": 3}),
        ("thm_1.7", {"n": 3, "q": 3}),
        ("thm_4.2", {"n": 3, "q": 2, "k": 1}),
        ("lemma_3.2", {"q": 2}),
        ("lemma_3.3", {"n": 4, "q": 2}),
        ("lemma_4.2", {"n": 4, "k": 2}),
        ("eq1", {"n": 7, "q": 3}),
        ("lemma_2.1", {"count": 15}),
    ],
)
def test_passing_checks(name, params):
    v = verify_theorem(name, **params)
    assert v.passed, v.to_json()
    json.dumps(v.to_json())


def test_induced_uniqueness_fails_at_q2():
    # besides the middle level, the three chains {0} < p < V are induced maxima
    v = verify_theorem("thm_1.6", n=2, q=2)
    failed = [c.name for c in v.claims if not c.ok]
    assert failed == ["unique extremal is the middle level"]
    assert v.details["extremal_count"] == 4


def test_lemma_at_k1_gives_more_than_kn():
    v = verify_theorem("lemma_4.2", n=3, k=1)
    assert v.claims[0].observed == 4 and not v.passed


def test_structure_not_claimed_when_condition_fails():
    v = verify_theorem("thm_1.7", n=3, q=2)
    assert v.passed and v.details["conditions"]["structure"] is False


def test_guards():
    with pytest.raises(OutOfGuard):
        verify_theorem("thm_1.4", n=4, q=2)
    with pytest.raises(OutOfRange):
        verify_theorem("thm_1.5", n=3)
    with pytest.raises(OutOfRange):
        verify_theorem("nonsense")
    with pytest.raises(OutOfRange):
        verify_theorem("thm_1.6", n=2, q=2, k=3)
    assert "lemma_2.1" in THEOREMS


def test_suite_is_seeded():
    a = pushdown_suite(count=6, seed=3)
    b = pushdown_suite(count=6, seed=3)
    c = pushdown_suite(count=6, seed=4)
    assert a == b and a["cases"] != c["cases"]
    assert a["passed"] == 6 and a["hall_failures"] == 0
