import itertools

import numpy as np
import pytest

from sl2lab.core import standard_pair
from sl2lab.prg import build_prg, generating_mask, move_list, nielsen_neighbors, prg_spectrum
from sl2lab.subgroups import generates


def test_move_list():
    assert len(move_list(2)) == 8 and len(move_list(3)) == 24
    with pytest.raises(ValueError):
        move_list(1)


def test_nielsen_neighbors_elements(tables):
    t = tables(5)
    a, b = standard_pair(5)
    nb = nielsen_neighbors((a, b), t)
    from sl2lab.core import inv, mul
    assert nb[0] == (mul(a, b), b)
    assert nb[1] == (mul(a, inv(b)), b)
    assert nb[2] == (mul(b, a), b)
    assert nb[7] == (a, mul(inv(a), b))


def test_generating_mask_brute(tables):
    t = tables(3)
    mask = generating_mask(t, 2)
    brute = [generates([i, j], t) for i, j in itertools.product(range(t.size), repeat=2)]
    assert mask.tolist() == brute


def test_graph_structure(tables):
    t = tables(3)
    g = build_prg(3, 2, table=t)
    assert g.size == 384 and g.degree == 8
    for v in range(0, g.size, 13):
        expect = nielsen_neighbors(tuple(g.vertices[v]), t)
        got = [tuple(g.vertices[u]) for u in g.neighbors[v]]
        assert got == [tuple(x) for x in expect]
    A = g.adjacency()
    assert (A - A.T).nnz == 0
    assert np.all(np.asarray(A.sum(axis=1)).ravel() == 8)
    # a second call sees the same graph
    assert (g.adjacency() != A).nnz == 0
    assert not g.neighbors.flags.writeable


def test_spectrum_sl23(tables):
    g = build_prg(3, 2, table=tables(3))
    rep = prg_spectrum(g)
    dense = np.linalg.eigvalsh(g.adjacency().toarray() / 8)
    assert rep.component_count == 1 and rep.method == "dense"
    assert rep.lambda2 == pytest.approx(dense[-2], abs=1e-12)


@pytest.mark.slow
def test_gamma2_sl25_components(tables):
    g = build_prg(5, 2, table=tables(5))
    rep = prg_spectrum(g)
    assert rep.vertex_count == 9120
    assert rep.component_count == 3 and rep.gap == 0.0
    assert all(x > 0 for x in rep.component_gaps)
    assert rep.converged


def test_cap():
    with pytest.raises(ValueError):
        build_prg(5, 3, cap=1000)
