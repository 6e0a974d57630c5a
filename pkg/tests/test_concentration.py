from fractions import Fraction

import numpy as np
import pytest

from sl2lab.concentration import (
    GroupDistribution,
    check_wg,
    flattening_identity_check,
    flattening_profile,
    step,
    subgroup_mass,
    walk_distribution,
    wg_length,
)
from sl2lab.core import GroupElement, SymmetricGeneratorMultiset, standard_pair
from sl2lab.spectral import pair_stencil
from sl2lab.subgroups import SubgroupClass, maximal_subgroups

from conftest import random_generating_pairs


def convolution_matrix(a, b, table):
    """C[g, h] = mu(g h^-1), so mu^(l) = C^l e."""
    mu = np.zeros(table.size)
    for g, w in SymmetricGeneratorMultiset.from_pair(a, b).support:
        mu[table.index(g)] += float(w)
    n = table.size
    g = np.repeat(np.arange(n), n)
    h = np.tile(np.arange(n), n)
    return mu[table.mul_indices(g, table.inverse[h])].reshape(n, n)


def test_exact_matches_float(tables):
    t = tables(5)
    a, b = standard_pair(5)
    ex = walk_distribution(a, b, 7, t, exact=True)
    fl = walk_distribution(a, b, 7, t)
    assert ex.denominator == 4**7
    assert ex.total() == 1
    assert np.allclose(ex.probabilities(), fl.values, atol=1e-15)


def test_walk_matches_matrix_power(tables):
    t = tables(7)
    a, b = random_generating_pairs(t, 1, seed=1)[0]
    C = convolution_matrix(a, b, t)
    e = np.zeros(t.size)
    e[0] = 1
    ref = np.linalg.matrix_power(C, 5) @ e
    assert np.allclose(walk_distribution(a, b, 5, t).values, ref, atol=1e-14)


def test_step_size_mismatch(tables):
    st_ = pair_stencil(tables(3), *standard_pair(3))
    with pytest.raises(ValueError):
        step(GroupDistribution.delta(5), st_)


def test_exact_budget(tables):
    a, b = standard_pair(5)
    with pytest.raises(ValueError):
        walk_distribution(a, b, 41, tables(5), exact=True)


def test_flattening_exact(tables):
    t = tables(7)
    a, b = random_generating_pairs(t, 1, seed=6)[0]
    for rec in flattening_profile(a, b, 10, t):
        assert rec.exact and rec.equal and rec.sup_le_l2
        assert isinstance(rec.return_2l, Fraction)
    rec = flattening_identity_check(a, b, 4, t, exact=False)
    assert rec.equal and not rec.exact


def test_object_dtype_beyond_int64(tables):
    t = tables(3)
    a, b = standard_pair(3)
    d = walk_distribution(a, b, 33, t, exact=True)
    assert d.values.dtype == object and d.total() == 1


def test_wg_length():
    assert [wg_length(p, 2.0) for p in (3, 5, 7, 13, 101)] == [2, 4, 4, 6, 10]
    assert all(wg_length(p, 1.0) % 2 == 0 for p in range(3, 200))
    with pytest.raises(ValueError):
        wg_length(5, 0)


def test_check_wg_masses(tables):
    t = tables(7)
    a, b = standard_pair(7)
    subs = maximal_subgroups(t)
    rep = check_wg(a, b, table=t, subgroups=subs)
    dist = walk_distribution(a, b, rep.l_used, t)
    expect = [subgroup_mass(dist, s) for s in subs] + [float(dist.values[0])]
    assert np.allclose(rep.masses, expect, atol=1e-15)
    assert rep.sup_mass == max(expect)
    assert rep.passed == (rep.sup_mass <= 7**-0.1)
    assert set(rep.class_max) == {"Borel", "Exceptional48", "Trivial"}


def test_borel_pair_fails(tables):
    t = tables(13)
    a = standard_pair(13)[0]
    b = GroupElement(2, 0, 0, 7, 13)  # both upper triangular
    rep = check_wg(a, b, gamma=1e-6, table=t)
    assert rep.sup_mass == pytest.approx(1.0)
    assert rep.sup_class == SubgroupClass.BOREL.value
    assert not rep.passed


def test_check_wg_gap(tables):
    t = tables(5)
    rep = check_wg(*standard_pair(5), table=t, measure_gap=True)
    assert rep.gap is not None and rep.gap > 0
    with pytest.raises(ValueError):
        check_wg(*standard_pair(5), gamma=-1, table=t)
