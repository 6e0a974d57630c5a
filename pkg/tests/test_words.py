from fractions import Fraction

import numpy as np
import pytest

from sl2lab.core import SymmetricGeneratorMultiset, inv, mul, standard_pair
from sl2lab.spectral import girth_pair
from sl2lab.subgroups import FULL, closure
from sl2lab.words import (
    comparison_check,
    enumerate_words,
    find_generating_pair,
    girth_ceiling,
    max_girth_pair,
)


def evaluate(letters, gens, table):
    g = table.element(0)
    for c in letters:
        g = mul(g, table.element(gens[c]))
    return g


def test_enumeration_is_spanning_tree(tables):
    t = tables(5)
    S = SymmetricGeneratorMultiset.from_pair(*standard_pair(5))
    words, exhausted, gens = enumerate_words(S, 4, t)
    assert gens == sorted(gens)
    # levels match a plain BFS ball
    ball, frontier = {0}, {0}
    for r in range(1, 5):
        frontier = {t.mul_index(x, g) for x in frontier for g in gens} - ball
        ball |= frontier
        assert sum(len(w) == r for w, _ in words) == len(frontier)
    for letters, idx in words:
        assert evaluate(letters, gens, t) == t.element(idx)
    assert not exhausted
    words, exhausted, _ = enumerate_words(S, 30, t)
    assert exhausted and len(words) == t.size - 1


def test_listing_order_does_not_matter(tables):
    t = tables(7)
    a, b = standard_pair(7)
    S1 = SymmetricGeneratorMultiset.symmetric_closure([a, b])
    S2 = SymmetricGeneratorMultiset.symmetric_closure([inv(b), inv(a)])
    r1, r2 = find_generating_pair(S1, 3, t), find_generating_pair(S2, 3, t)
    assert r1 == r2


def test_generating_pair_from_order_four(tables):
    p = 11
    t = tables(p)
    order4 = [t.element(i) for i in np.flatnonzero(t.element_orders() == 4)[[0, 5, 40]]]
    S = SymmetricGeneratorMultiset.symmetric_closure(order4)
    if closure([t.index(g) for g in order4], t) is not FULL:
        pytest.skip("sample does not generate")
    rep = find_generating_pair(S, 4, t)
    assert rep.found and rep.certificate == t.size
    assert closure([t.index(rep.w1.element), t.index(rep.w2.element)], t) is FULL
    gens = sorted(t.index(g) for g in S.elements)
    assert evaluate(rep.w1.letters, gens, t) == rep.w1.element
    assert rep.shortest_relation == girth_pair(rep.w1.element, rep.w2.element, t)
    cmp = comparison_check(S, rep, t)
    assert cmp.holds and cmp.constant >= Fraction(1, 1)


def test_not_found_when_subgroup(tables):
    t = tables(5)
    a = standard_pair(5)[0]
    rep = find_generating_pair(SymmetricGeneratorMultiset.symmetric_closure([a]), 8, t)
    assert not rep.found and rep.exhausted and rep.lengths is None
    with pytest.raises(ValueError):
        comparison_check(SymmetricGeneratorMultiset.symmetric_closure([a]), rep, t)


def test_girth_ceiling():
    assert girth_ceiling(120) == 12 and girth_ceiling(2184) == 16 and girth_ceiling(1) == 2


def test_max_girth_pair(tables):
    t = tables(5)
    S = SymmetricGeneratorMultiset.from_pair(*standard_pair(5))
    rep = max_girth_pair(S, 2, L=3, table=t)
    words, _, _ = enumerate_words(S, 2, t)
    best = max(girth_pair(t.element(words[m][1]), t.element(words[n][1]), t)
               for n in range(len(words)) for m in range(n))
    assert rep.shortest_relation == best <= rep.ceiling
    assert rep.sufficient == (best > 3)
    gen = max_girth_pair(S, 2, L=3, table=t, require_generating=True)
    assert closure([t.index(gen.w1.element), t.index(gen.w2.element)], t) is FULL


def test_comparison_constant_weighted(tables):
    t = tables(5)
    a, b = standard_pair(5)
    S = SymmetricGeneratorMultiset.from_pair(a, b)
    rep = find_generating_pair(S, 2, t)
    cmp = comparison_check(S, rep, t)
    if rep.lengths == (1, 1):
        assert cmp.constant == 1 and cmp.gap_S == pytest.approx(cmp.gap_words)
    assert cmp.holds
