import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sl2lab.core import (
    GroupElement,
    SymmetricGeneratorMultiset,
    build_table,
    check_prime,
    element_order,
    identity,
    inv,
    mul,
    standard_pair,
)

PRIMES = [3, 5, 7]


def elements(p):
    return st.integers(0, p * (p * p - 1) - 1)


@pytest.mark.parametrize("bad", [2, 1, 0, -3, 4, 9, 15])
def test_check_prime_rejects(bad):
    with pytest.raises(ValueError):
        check_prime(bad)


def test_check_prime_accepts():
    assert check_prime(13) == 13


def test_element_validation():
    with pytest.raises(ValueError):
        GroupElement(1, 1, 1, 1, 5)
    with pytest.raises(ValueError):
        GroupElement(6, 0, 0, 1, 5)
    assert GroupElement.from_entries([6, 5, 0, 1], 5) == GroupElement(1, 0, 0, 1, 5)


@pytest.mark.parametrize("p", PRIMES)
def test_table_layout(p, tables):
    t = tables(p)
    assert t.size == p * (p * p - 1)
    assert t.element(0) == identity(p)
    codes = [((a * p + b) * p + c) * p + d for a, b, c, d in t.entries[1:].tolist()]
    assert codes == sorted(codes)
    for i in range(t.size):
        assert t.index(t.element(i)) == i


@pytest.mark.parametrize("p", PRIMES)
def test_table_multiplication_matches_matrices(p, tables):
    t = tables(p)
    rng = np.random.default_rng(p)
    for i, j in rng.integers(0, t.size, size=(200, 2)):
        x, y = t.element(int(i)), t.element(int(j))
        assert t.element(t.mul_index(int(i), int(j))) == mul(x, y)
        assert t.element(int(t.inverse[i])) == inv(x)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_group_axioms(data):
    p = data.draw(st.sampled_from(PRIMES))
    t = build_table(p)
    i, j, k = (data.draw(elements(p)) for _ in range(3))
    x, y, z = t.element(i), t.element(j), t.element(k)
    assert mul(mul(x, y), z) == mul(x, mul(y, z))
    assert mul(x, inv(x)) == identity(p)
    assert t.left_perm(i)[j] == t.mul_index(i, j)
    assert t.right_perm(i)[j] == t.mul_index(j, i)


@pytest.mark.parametrize("p", PRIMES)
def test_element_orders(p, tables):
    t = tables(p)
    orders = t.element_orders()
    for i in range(0, t.size, 7):
        assert orders[i] == element_order(t.element(i))
    # exactly one involution in SL(2, p)
    assert np.count_nonzero(orders == 2) == 1


def test_conjugation_is_automorphism(tables):
    t = tables(5)
    perm = t.conj_perm((2, 0, 0, 1))  # GL, not SL
    assert sorted(perm.tolist()) == list(range(t.size))
    for i, j in itertools.product(range(0, t.size, 11), repeat=2):
        assert perm[t.mul_index(i, j)] == t.mul_index(int(perm[i]), int(perm[j]))


@pytest.mark.parametrize("p", [3, 5, 7, 11, 101])
def test_standard_pair(p):
    a, b = standard_pair(p)
    assert a.entries == (1, 1, 0, 1) and b.entries == (1, 0, 1, 1)


def test_multiset_merges_coincident_slots():
    p = 5
    a = GroupElement(0, 1, p - 1, 0, p)  # order 4, a^-1 = -a
    S = SymmetricGeneratorMultiset.from_pair(a, inv(a))
    assert len(S) == 2
    assert S.weights == [Fraction(1, 2), Fraction(1, 2)]
    minus = GroupElement(p - 1, 0, 0, p - 1, p)
    S = SymmetricGeneratorMultiset.from_pair(minus, standard_pair(p)[0])
    assert dict(S.support)[minus] == Fraction(1, 2)


def test_multiset_validation():
    a, b = standard_pair(5)
    with pytest.raises(ValueError):
        SymmetricGeneratorMultiset([(a, Fraction(1))])
    with pytest.raises(ValueError):
        SymmetricGeneratorMultiset([(a, Fraction(1, 4)), (inv(a), Fraction(1, 4))])
    with pytest.raises(ValueError):
        SymmetricGeneratorMultiset([])
    S = SymmetricGeneratorMultiset.symmetric_closure([a, b])
    assert sum(S.weights) == 1 and len(S) == 4
