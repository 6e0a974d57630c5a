import numpy as np
import pytest

from sl2lab.core import standard_pair
from sl2lab.subgroups import (
    FULL,
    Subgroup,
    SubgroupClass,
    classify,
    closure,
    generates,
    is_metabelian_exact,
    maximal_subgroups,
    metabelian_check,
    metabelian_witness,
)


def brute_closure(gens, table):
    """Repeated multiplication until the set stops growing."""
    current = {0} | set(gens)
    while True:
        new = {table.mul_index(x, y) for x in current for y in current} | current
        if new == current:
            return current
        current = new


@pytest.mark.parametrize("p", [3, 5, 7])
def test_standard_pair_generates(p, tables):
    t = tables(p)
    a, b = standard_pair(p)
    assert closure([a, b], t) is FULL
    assert generates([a, b], t)


def test_closure_matches_brute_force(tables):
    t = tables(5)
    rng = np.random.default_rng(1)
    for i, j in rng.integers(0, t.size, size=(40, 2)):
        sub = closure([int(i), int(j)], t, cap=None)
        expect = brute_closure([int(i), int(j)], t)
        if sub is FULL:
            assert len(expect) == t.size
        else:
            assert set(sub.indices.tolist()) == expect


def test_closure_cap_shortcut(tables):
    t = tables(7)
    a, b = standard_pair(7)
    assert closure([a, b], t, cap=10) is FULL


def test_subgroup_basics():
    s = Subgroup(np.array([5, 0, 3, 3]))
    assert s.order == 3 and 3 in s and 4 not in s
    assert s == Subgroup(np.array([0, 3, 5]))
    assert s.issubset(Subgroup(np.arange(6)))


# (class, order) -> number of conjugates; these are the lifts to SL(2, p) of
# the maximal subgroups of PSL(2, p) (e.g. at p = 5: D10, A4, S3 in A5)
CENSUS = {
    5: {("Borel", 20): 6, ("Exceptional24", 24): 5, ("NonsplitTorusNormalizer", 12): 10},
    7: {("Borel", 42): 8, ("Exceptional48", 48): 14},
    11: {("Borel", 110): 12, ("Exceptional120", 120): 22, ("NonsplitTorusNormalizer", 24): 55},
    13: {("Borel", 156): 14, ("Exceptional24", 24): 91, ("NonsplitTorusNormalizer", 28): 78,
         ("SplitTorusNormalizer", 24): 91},
}


@pytest.mark.parametrize("p", sorted(CENSUS))
def test_maximal_subgroup_census(p, tables):
    t = tables(p)
    subs = maximal_subgroups(t)
    got = {}
    for s in subs:
        assert s.klass == classify(s, t)
        got[(s.klass.value, s.order)] = got.get((s.klass.value, s.order), 0) + 1
    assert got == CENSUS[p]
    # no containment between distinct maxima
    masks = np.array([s.mask(t.size) for s in subs]).astype(np.int32)
    inter = masks @ masks.T
    np.fill_diagonal(inter, 0)
    assert not np.any(inter >= masks.sum(axis=1)[None, :])
    # each one is closed under multiplication
    for s in subs[:: max(1, len(subs) // 10)]:
        h = s.indices
        prod = np.unique(t.mul_indices(h[:, None], h[None, :]))
        assert np.array_equal(prod, h)


def test_exceptional_orders(tables):
    # SL(2,11) contains SL(2,5) (order 120); SL(2,7) contains 2.S4 (order 48)
    got11 = {s.order for s in maximal_subgroups(tables(11))}
    got7 = {s.order for s in maximal_subgroups(tables(7))}
    assert 120 in got11 and 48 in got7


def test_metabelian(tables):
    t = tables(7)
    borel = next(s for s in maximal_subgroups(t) if s.klass == SubgroupClass.BOREL)
    assert metabelian_check(borel, t)
    assert is_metabelian_exact(borel, t)
    big = next(s for s in maximal_subgroups(t) if s.order == 48)
    w = metabelian_witness(big, t)
    assert w is not None
    assert not is_metabelian_exact(big, t)
