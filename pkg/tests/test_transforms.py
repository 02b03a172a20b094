import random

import pytest
from hypothesis import given, settings, strategies as st

from linlat.errors import FreenessViolated, NotAMember, OutOfRange, PreconditionViolated, TooLarge
from linlat.families import Family, level_family
from linlat.lattice import build_lattice
from linlat.posets import is_free, parse_forbidden
from linlat.qarith import q_bracket
from linlat.transforms import (
    build_ma,
    cover_neighborhoods,
    dual_pushup,
    pushdown,
    pushdown_hypothesis,
    regular_neighborhood_check,
    small_members,
    tight_subsets,
    to_middle,
)
from linlat.verify import random_free_family

VL = parse_forbidden("V:2,L:2")


def _line_with_point(L):
    A = L.level_offsets[2]
    p = next(i for i in L.level(1) if L.leq(i, A))
    return A, p


def test_small_members(L32):
    A, p = _line_with_point(L32)
    F = Family.from_indices(L32, [A, p, L32.top])
    assert small_members(F) == {p}


def test_ma_on_a_line(L32):
    A, p = _line_with_point(L32)
    F = Family.from_indices(L32, [A, p])
    ma = build_ma(F, A, 2)
    assert ma.pins == (p,) and ma.r == 1
    assert len(ma.members) == 2 == ma.size_bound
    assert p not in ma.members


def test_ma_errors(L32):
    A, p = _line_with_point(L32)
    others = [i for i in L32.level(1) if L32.leq(i, A) and i != p]
    with pytest.raises(NotAMember):
        build_ma(Family.from_indices(L32, [p]), A, 2)
    with pytest.raises(FreenessViolated):
        build_ma(Family.from_indices(L32, [A, p, others[0]]), A, 2)
    with pytest.raises(PreconditionViolated):
        build_ma(Family.from_indices(L32, [A, 0]), A, 2)
    with pytest.raises(PreconditionViolated):
        build_ma(Family.from_indices(L32, [0]), 0, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_ma_properties_on_random_families(seed):
    L = build_lattice(4, 2)
    F = random_free_family(L, random.Random(seed), 2, 2, 1, 1)
    if not is_free(F, parse_forbidden("L:2"), True):
        return
    low = [i for i in F if L.dims[i] >= 1]
    for A in low:
        ma = build_ma(F, A, 2)
        s = L.dims[A]
        assert len(ma.members) >= q_bracket(s, 2) - q_bracket(s - 1, 2)
        for B in ma.members:
            assert B not in F
            assert not any(L.leq(i, B) for i in F if L.dims[i] <= s - 2)


def test_weak_pushdown_of_a_level(L42):
    F = level_family(L42, 3)
    G, steps = pushdown(F, False, 2, 2)
    assert G.level_counts() == [0, 0, 15, 0, 0]
    assert len(steps) == 1 and steps[0].s == 3
    st_ = steps[0]
    assert st_.min_degree >= st_.degree_bound and st_.within_hypothesis and st_.chain_holds
    doc = st_.to_json()
    assert doc["direction"] == "down" and len(doc["matching"]) == 15


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.booleans())
def test_pushdown_preserves_size_and_freeness(seed, induced):
    L = build_lattice(4, 2)
    F = random_free_family(L, random.Random(seed), 2, 2, 1 if induced else 0, 2)
    G, steps = pushdown(F, induced, 2, 2, floor=2)
    assert len(G) == len(F)
    assert max(G.support()) <= 2
    assert is_free(G, VL, induced)
    for st_ in steps:
        assert st_.min_degree >= st_.degree_bound


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_pushup_mirrors_pushdown(seed):
    L = build_lattice(4, 2)
    F = random_free_family(L, random.Random(seed), 2, 2, 0, 0)
    up, _ = dual_pushup(F, False, 2, 2)
    down, _ = pushdown(F.dual(), False, 2, 2, floor=2)
    assert up == down.dual()
    assert min(up.support()) >= 2


def test_to_middle(L42):
    F = Family(L42, level_family(L42, 3).members)
    G, steps = to_middle(F, False, 2, 2)
    assert G.support() == [2] and len(G) == 15
    assert [s.direction for s in steps] == ["down"]


def test_pushdown_rejects_non_free_input(L32):
    with pytest.raises(FreenessViolated):
        pushdown(Family(L32, L32.all_mask), False, 2, 2)
    with pytest.raises(OutOfRange):
        pushdown(level_family(L32, 1), False, 2, 2, floor=7)


def test_hypothesis_flags():
    assert pushdown_hypothesis(4, 2, False, 2, 2, 2)
    assert not pushdown_hypothesis(5, 2, False, 2, 2, 3)
    assert pushdown_hypothesis(5, 2, True, 2, 2, 3)
    assert not pushdown_hypothesis(5, 2, True, 3, 2, 3)


@pytest.mark.parametrize("n,q,s,t", [(3, 2, 1, 2), (3, 2, 2, 1), (3, 3, 1, 2), (1, 2, 0, 1)])
def test_tight_subsets_on_equal_levels(n, q, s, t):
    res = tight_subsets(build_lattice(n, q), s, t)
    assert res["equal"] == [res["full"]]


@pytest.mark.parametrize("s,t", [(1, 2), (3, 2), (1, 0), (3, 4), (0, 1), (4, 3)])
def test_balanced_subsets_in_l42(L42, s, t):
    assert regular_neighborhood_check(L42, s, t)


def test_unequal_levels_have_small_equal_subsets(L22):
    # every single point covers the zero subspace alone
    res = tight_subsets(L22, 1, 0)
    assert res["equal"] == [0b001, 0b010, 0b100]
    assert res["balanced"] == [res["full"]]


def test_neighbourhood_guards(L42):
    assert len(cover_neighborhoods(L42, 1, 2)) == 15
    with pytest.raises(OutOfRange):
        cover_neighborhoods(L42, 1, 3)
    with pytest.raises(TooLarge):
        tight_subsets(L42, 2, 1)
