"""Product replacement graphs Gamma_k(SL(2, p)).

Vertices are the generating k-tuples, indexed lexicographically by element
indices.  Edges are the Nielsen moves R^+-_{ij}: g_i -> g_i g_j^+-1 and
L^+-_{ij}: g_i -> g_j^+-1 g_i, kept with multiplicity (loops included), so the
graph is 4k(k-1)-regular and its normalised adjacency is a Markov operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import eigsh

from .core import GroupElement, GroupIndexTable, build_table
from .spectral import DENSE_LIMIT
from .subgroups import maximal_subgroups

__all__ = [
    "DEFAULT_CANDIDATE_CAP",
    "PRGGraph",
    "PRGReport",
    "build_prg",
    "generating_mask",
    "move_list",
    "nielsen_neighbors",
    "prg_spectrum",
]

DEFAULT_CANDIDATE_CAP = 10**7


def move_list(k: int) -> list[tuple[int, int, str, int]]:
    """The 4k(k-1) moves as (i, j, 'R' or 'L', +1 or -1), in neighbour order."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return [(i, j, m, s) for i in range(k) for j in range(k) if j != i
            for m in ("R", "L") for s in (1, -1)]


def nielsen_neighbors(t: Sequence, table: GroupIndexTable, k: int | None = None) -> list[tuple]:
    """Images of the tuple under every Nielsen move, in :func:`move_list` order.

    Elements may be given as GroupElement or as table indices; results use
    the same representation.
    """
    k = len(t) if k is None else k
    if len(t) != k:
        raise ValueError(f"tuple has {len(t)} entries, expected k={k}")
    as_elements = isinstance(t[0], GroupElement)
    idx = [table.index(g) for g in t] if as_elements else [int(g) for g in t]
    out = []
    for i, j, move, sign in move_list(k):
        gj = idx[j] if sign > 0 else int(table.inverse[idx[j]])
        new = list(idx)
        new[i] = table.mul_index(idx[i], gj) if move == "R" else table.mul_index(gj, idx[i])
        out.append(tuple(table.element(v) for v in new) if as_elements else tuple(new))
    return out


def generating_mask(table: GroupIndexTable, k: int, chunk: int = 1 << 20) -> np.ndarray:
    """Boolean over all |G|^k tuples in lexicographic order: does the tuple generate?

    A tuple fails exactly when one maximal subgroup contains all its
    entries; containment is tested through packed membership bitmasks.
    """
    n = table.size
    subs = maximal_subgroups(table)
    member = np.zeros((n, len(subs)), dtype=bool)
    for c, s in enumerate(subs):
        member[s.indices, c] = True
    packed = np.packbits(member, axis=1)
    total = n**k
    out = np.empty(total, dtype=bool)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        acc = None
        rem = codes
        for _ in range(k):
            rem, digit = np.divmod(rem, n)
            acc = packed[digit] if acc is None else acc & packed[digit]
        out[start : start + codes.size] = ~acc.any(axis=1)
    return out


@dataclass(frozen=True, eq=False)
class PRGGraph:
    p: int
    k: int
    vertices: np.ndarray  # (V, k) element indices, lexicographic
    neighbors: np.ndarray  # (V, 4k(k-1)) vertex ids in move order

    @property
    def size(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def degree(self) -> int:
        return 4 * self.k * (self.k - 1)

    def adjacency(self) -> sp.csr_matrix:
        """Multiplicity adjacency: entry (u, v) counts the moves taking u to v."""
        V, d = self.neighbors.shape
        indptr = np.arange(0, V * d + 1, d, dtype=np.int64)
        # copy: csr_matrix may alias the index array and sum_duplicates sorts it in place
        cols = self.neighbors.ravel().copy()
        A = sp.csr_matrix((np.ones(V * d), cols, indptr), shape=(V, V))
        A.sum_duplicates()
        return A


def build_prg(p: int, k: int = 2, cap: int = DEFAULT_CANDIDATE_CAP,
              table: GroupIndexTable | None = None) -> PRGGraph:
    table = table or build_table(p)
    n = table.size
    if n**k > cap:
        raise ValueError(f"|G|^k = {n**k} candidate tuples exceeds cap {cap}")
    mask = generating_mask(table, k)
    codes = np.flatnonzero(mask)
    lookup = np.full(n**k, -1, dtype=np.int64)
    lookup[codes] = np.arange(codes.size)
    digits = np.empty((codes.size, k), dtype=np.int64)
    rem = codes
    for pos in range(k - 1, -1, -1):
        rem, digits[:, pos] = np.divmod(rem, n)
    weights = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    moves = move_list(k)
    nbrs = np.empty((codes.size, len(moves)), dtype=np.int64)
    for c, (i, j, move, sign) in enumerate(moves):
        gj = digits[:, j] if sign > 0 else table.inverse[digits[:, j]]
        gi = table.mul_indices(digits[:, i], gj) if move == "R" else table.mul_indices(gj, digits[:, i])
        new_codes = codes + (gi - digits[:, i]) * weights[i]
        nbrs[:, c] = lookup[new_codes]
    if np.any(nbrs < 0):
        raise AssertionError("a Nielsen move left the set of generating tuples")
    dtype = np.int32 if codes.size < 2**31 else np.int64
    nbrs = nbrs.astype(dtype)
    nbrs.setflags(write=False)
    digits.setflags(write=False)
    return PRGGraph(p, k, digits, nbrs)


@dataclass(frozen=True)
class PRGReport:
    p: int
    k: int
    vertex_count: int
    component_count: int
    lambda2: float
    gap: float
    component_gaps: tuple[float, ...]
    degree: int
    method: str
    converged: bool


def _component_lambda2(M: sp.csr_matrix, tol: float) -> tuple[float, str, bool]:
    """Second eigenvalue of a connected symmetric Markov matrix."""
    n = M.shape[0]
    if n == 1:
        return -np.inf, "dense", True
    if n <= DENSE_LIMIT:
        vals = np.linalg.eigvalsh(M.toarray())
        return float(vals[-2]), "dense", True
    v0 = np.random.Generator(np.random.Philox(0)).standard_normal(n)
    vals, vecs = eigsh(M, k=2, which="LA", tol=tol, v0=v0)
    res = float(np.linalg.norm(M @ vecs[:, 0] - vals[0] * vecs[:, 0]))
    return float(vals[0]), "iterative", res <= max(tol, 1e-8) * 10


def prg_spectrum(graph: PRGGraph, tol: float = 1e-10) -> PRGReport:
    """Second eigenvalue of the degree-normalised adjacency, overall and per component.

    A disconnected graph has lambda2 = 1 and gap 0.  Component gaps are
    listed in order of each component's smallest vertex.
    """
    A = graph.adjacency()
    M = (A / graph.degree).tocsr()
    ncomp, labels = connected_components(A, directed=False)
    order = np.unique(labels, return_index=True)[1]
    comp_order = labels[np.sort(order)]
    gaps, methods, ok = [], set(), True
    lam_max = -np.inf
    for c in comp_order:
        members = np.flatnonzero(labels == c)
        l2, method, conv = _component_lambda2(M[members][:, members], tol)
        lam_max = max(lam_max, l2)
        gaps.append(max(0.0, 1.0 - l2) if np.isfinite(l2) else 1.0)
        methods.add(method)
        ok &= conv
    lambda2 = 1.0 if ncomp > 1 else float(lam_max)
    return PRGReport(
        p=graph.p,
        k=graph.k,
        vertex_count=graph.size,
        component_count=int(ncomp),
        lambda2=lambda2,
        gap=max(0.0, 1.0 - lambda2),
        component_gaps=tuple(gaps),
        degree=graph.degree,
        method="+".join(sorted(methods)),
        converged=bool(ok),
    )
