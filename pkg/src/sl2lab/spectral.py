"""Markov operators of Cayley graphs and what can be read off them.

The averaging operator of a symmetric measure mu acts on functions by
``(M f)(x) = sum_s mu(s) f(s x)``; it is self-adjoint and stochastic.  Its
second eigenvalue gives the spectral gap, which is compared here with the
exact vertex expansion (tiny groups), with relation lengths of the generating
pair, and with the indicator-function cut identities behind the
displacement criterion for expanders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import GroupElement, GroupIndexTable, SymmetricGeneratorMultiset
from .lanczos import lanczos_extremes

__all__ = [
    "DENSE_LIMIT",
    "CutChainRecord",
    "ExceedsCap",
    "ExpansionReport",
    "MarkovStencil",
    "SpectrumReport",
    "build_stencil",
    "canonical_pair_stencil",
    "cheeger_bounds",
    "cut_chain_check",
    "expansion_exact",
    "girth_pair",
    "pair_stencil",
    "relation_length",
    "second_eigenvalue",
    "spectral_gap_pair",
    "vertex_boundary",
]

DENSE_LIMIT = 2000
CERTIFY_TOL = 1e-10
SCAN_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class MarkovStencil:
    """Weighted left-multiplication permutations: ``perm[i] = index(s * g_i)``."""

    perms: tuple[np.ndarray, ...]
    weights: tuple[Fraction, ...]
    size: int

    def __post_init__(self):
        if sum(self.weights) != 1:
            raise ValueError("stencil weights must sum to 1")
        for perm in self.perms:
            if perm.shape != (self.size,):
                raise ValueError("stencil permutation has the wrong length")

    def apply(self, f: np.ndarray) -> np.ndarray:
        out = np.zeros_like(f, dtype=float)
        for perm, w in zip(self.perms, self.weights):
            out += float(w) * f[perm]
        return out

    def convolve(self, nu: np.ndarray) -> np.ndarray:
        """(mu * nu)(g) = sum_s mu(s) nu(s^-1 g)."""
        out = np.zeros_like(nu, dtype=float)
        for perm, w in zip(self.perms, self.weights):
            out[perm] += float(w) * nu
        return out

    def dense(self) -> np.ndarray:
        n = self.size
        M = np.zeros((n, n))
        rows = np.arange(n)
        for perm, w in zip(self.perms, self.weights):
            M[rows, perm] += float(w)
        return M

    @property
    def degree(self) -> int:
        """Slot count: the smallest d making d * M an integer matrix."""
        return math.lcm(*(w.denominator for w in self.weights))


@dataclass(frozen=True)
class SpectrumReport:
    lambda2: float
    lambda_min: float
    gap: float
    two_sided_gap: float
    method: str
    residual: float
    converged: bool = True
    iterations: int = 0


def build_stencil(table: GroupIndexTable, gens) -> MarkovStencil:
    """Stencil of a symmetric multiset (or an iterable of ``(element, weight)``)."""
    if not isinstance(gens, SymmetricGeneratorMultiset):
        gens = SymmetricGeneratorMultiset(gens)
    if gens.p != table.p:
        raise ValueError(f"modulus mismatch: {gens.p} vs {table.p}")
    items = sorted(((table.index(g), w) for g, w in gens.support))
    return MarkovStencil(
        tuple(table.left_perm(i) for i, _ in items), tuple(w for _, w in items), table.size
    )


def pair_stencil(table: GroupIndexTable, a: GroupElement, b: GroupElement) -> MarkovStencil:
    return build_stencil(table, SymmetricGeneratorMultiset.from_pair(a, b))


# (a, a^-1, b, b^-1) slot orderings produced by swapping and inverting generators
_PAIR_MOVES = [
    (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
    (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
]


def _bfs_labels(perms: Sequence[np.ndarray], n: int) -> np.ndarray | None:
    """new-label-of-old from breadth-first order (parent-major, then slot order)."""
    labels = np.full(n, -1, dtype=np.int64)
    labels[0] = 0
    frontier = np.zeros(1, dtype=np.int64)
    count = 1
    while frontier.size:
        cand = np.stack([P[frontier] for P in perms], axis=1).ravel()
        cand = cand[labels[cand] < 0]
        if cand.size == 0:
            break
        vals, first = np.unique(cand, return_index=True)
        vals = vals[np.argsort(first)]
        labels[vals] = np.arange(count, count + vals.size)
        count += vals.size
        frontier = vals
    return labels if count == n else None


def canonical_pair_stencil(table: GroupIndexTable, a: GroupElement, b: GroupElement):
    """The pair's stencil in a labelling that depends only on its orbit.

    Relabels the group by breadth-first order from the identity for each of
    the eight slot orderings obtained by swapping/inverting a and b, and keeps
    the lexicographically smallest operator.  Automorphic images and move images
    of (a, b) therefore produce bit-identical operators.  Returns None when the
    pair does not generate (the search does not reach the whole group).
    """
    ia, ib = table.index(a), table.index(b)
    slots = [ia, int(table.inverse[ia]), ib, int(table.inverse[ib])]
    base = [table.left_perm(s) for s in slots]
    n = table.size
    best = None
    for order in _PAIR_MOVES:
        labels = _bfs_labels([base[k] for k in order], n)
        if labels is None:
            return None
        rel = []
        for P in base:
            R = np.empty(n, dtype=np.int64)
            R[labels] = labels[P]
            rel.append(R)
        rel.sort(key=lambda r: r.tobytes())
        key = b"".join(r.tobytes() for r in rel)
        if best is None or key < best[0]:
            best = (key, rel)
    merged: list[tuple[np.ndarray, int]] = []
    for R in best[1]:
        if merged and np.array_equal(merged[-1][0], R):
            merged[-1] = (R, merged[-1][1] + 1)
        else:
            merged.append((R, 1))
    return MarkovStencil(
        tuple(R for R, _ in merged), tuple(Fraction(c, 4) for _, c in merged), n
    )


def second_eigenvalue(stencil: MarkovStencil, tol: float = CERTIFY_TOL, method: str = "auto",
                      seed: int = 0, maxiter: int | None = None) -> SpectrumReport:
    """Second-largest and smallest eigenvalue of the stencil's Markov operator.

    ``method="auto"`` uses a dense symmetric eigensolver up to
    :data:`DENSE_LIMIT` vertices and Lanczos on the complement of the constant
    vector beyond.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = stencil.size
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "iterative"
    if method == "dense":
        M = stencil.dense()
        vals, vecs = np.linalg.eigh(M)
        l2, lmin = float(vals[-2]), float(vals[0])
        residual = max(
            float(np.linalg.norm(M @ vecs[:, j] - vals[j] * vecs[:, j])) for j in (-2, 0)
        )
        converged, iterations = residual <= tol, 0
    elif method == "iterative":
        res = lanczos_extremes(stencil.apply, n, tol=tol, maxiter=maxiter,
                               deflate=np.ones(n), seed=seed)
        l2, lmin, residual = res.theta_max, res.theta_min, res.residual
        converged, iterations = res.converged, res.iterations
    else:
        raise ValueError(f"unknown method {method!r}")
    gap = max(0.0, 1.0 - l2)
    two = max(0.0, 1.0 - max(l2, abs(lmin)))
    return SpectrumReport(l2, lmin, gap, two, method, residual, bool(converged), iterations)


def spectral_gap_pair(a: GroupElement, b: GroupElement, table: GroupIndexTable,
                      tol: float = CERTIFY_TOL, method: str = "auto",
                      canonical: bool = True) -> SpectrumReport:
    """Spectrum of mu_(a,b) = (delta_a + delta_a^-1 + delta_b + delta_b^-1) / 4."""
    stencil = canonical_pair_stencil(table, a, b) if canonical else None
    if stencil is None:
        stencil = pair_stencil(table, a, b)
    return second_eigenvalue(stencil, tol=tol, method=method)


class _ExceedsCap:
    def __repr__(self):
        return "ExceedsCap"

    def __bool__(self):
        return False


ExceedsCap = _ExceedsCap()

_INV_LETTER = np.array([1, 0, 3, 2])


def relation_length(perms: Sequence[np.ndarray], n: int, cap: int | None = None):
    """Shortest nonempty reduced word in letters x, x^-1, y, y^-1 that is trivial.

    ``perms`` are the left-multiplication permutations of the four letters in
    that order.  Breadth-first search from the identity records first-visit
    depths; every non-tree edge (u, v) closes a reduced relation of length at
    most depth(u) + depth(v) + 1, and by vertex transitivity the minimum over
    non-tree edges is exact.
    """
    depth = np.full(n, -1, dtype=np.int64)
    depth[0] = 0
    frontier = np.zeros(1, dtype=np.int64)
    incoming = np.full(1, -1, dtype=np.int64)
    best = math.inf
    d = 0
    while frontier.size:
        # sources at depth d only close relations of length >= 2d
        if best <= 2 * d or (cap is not None and 2 * d > cap):
            break
        srcs, lets, tgts = [], [], []
        for m in range(4):
            keep = incoming != _INV_LETTER[m]
            s = frontier[keep]
            srcs.append(s)
            lets.append(np.full(s.size, m))
            tgts.append(perms[m][s])
        lets = np.concatenate(lets)
        tgts = np.concatenate(tgts)
        known = depth[tgts] >= 0
        if known.any():
            best = min(best, d + 1 + int(depth[tgts[known]].min()))
        new, newlet = tgts[~known], lets[~known]
        vals, first, counts = np.unique(new, return_index=True, return_counts=True)
        if np.any(counts > 1):
            best = min(best, 2 * d + 2)
        depth[vals] = d + 1
        frontier, incoming = vals, newlet[first]
        d += 1
    if cap is not None and best > cap:
        return ExceedsCap
    return int(best)


def girth_pair(a: GroupElement, b: GroupElement, table: GroupIndexTable, cap: int | None = None):
    """Length of the shortest relation between a and b."""
    ia, ib = table.index(a), table.index(b)
    letters = [ia, int(table.inverse[ia]), ib, int(table.inverse[ib])]
    return relation_length([table.left_perm(i) for i in letters], table.size, cap)


def cheeger_bounds(report: SpectrumReport, degree: int) -> tuple[float, float]:
    """Bounds ``(lower, upper)`` with ``lower <= c(G) <= degree * upper``.

    From the edge-expansion Cheeger inequalities for the adjacency eigenvalue
    ``lam = degree * lambda2``, combined with
    ``h / degree <= c <= h`` between edge and outer-vertex expansion.
    """
    lam = degree * report.lambda2
    slack = max(0.0, degree - lam)
    return slack / (2 * degree), math.sqrt(2 * degree * slack) / degree


@dataclass(frozen=True)
class ExpansionReport:
    c_exact: Fraction
    argmin_subset: tuple[int, ...]
    cheeger_lower: float
    cheeger_upper: float
    vertex_upper: float
    degree: int


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def vertex_boundary(stencil: MarkovStencil, subset: Sequence[int]) -> set[int]:
    """Vertices at distance exactly 1 from ``subset``."""
    inside = set(int(i) for i in subset)
    nb = set()
    for perm in stencil.perms:
        nb.update(perm[list(inside)].tolist())
    return nb - inside


def expansion_exact(table: GroupIndexTable, gens, max_order: int = 30,
                    chunk: int = 1 << 20) -> ExpansionReport:
    """Exact expansion coefficient by enumerating every subset below half size."""
    n = table.size
    if n > max_order:
        raise ValueError(f"exhaustive expansion limited to order {max_order}, got {n}")
    stencil = gens if isinstance(gens, MarkovStencil) else build_stencil(table, gens)
    nbytes = (n + 7) // 8
    # neighbour-mask lookup per byte of the subset mask
    luts = np.zeros((nbytes, 256), dtype=np.uint64)
    for k in range(nbytes):
        for j in range(8):
            i = 8 * k + j
            if i >= n:
                break
            bit = np.uint64(0)
            for perm in stencil.perms:
                bit |= np.uint64(1) << np.uint64(int(perm[i]))
            has = (np.arange(256) >> j) & 1 == 1
            luts[k, has] |= bit
    kmax = (n - 1) // 2  # |X| < n/2
    best_b = np.full(kmax + 1, np.iinfo(np.int64).max)
    best_m = np.zeros(kmax + 1, dtype=np.uint64)
    total = 1 << n
    for start in range(1, total, chunk):
        X = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        size = _popcount(X)
        sel = size <= kmax
        X, size = X[sel], size[sel]
        if X.size == 0:
            continue
        nb = np.zeros_like(X)
        for k in range(nbytes):
            nb |= luts[k][((X >> np.uint64(8 * k)) & np.uint64(255)).astype(np.int64)]
        bnd = _popcount(nb & ~X)
        for k in range(1, kmax + 1):
            ks = np.flatnonzero(size == k)
            if ks.size == 0:
                continue
            j = ks[np.argmin(bnd[ks])]
            if bnd[j] < best_b[k]:
                best_b[k], best_m[k] = bnd[j], X[j]
    ratios = [(Fraction(int(best_b[k]), k), k) for k in range(1, kmax + 1)]
    c, k = min(ratios)
    mask = int(best_m[k])
    subset = tuple(i for i in range(n) if mask >> i & 1)
    report = second_eigenvalue(stencil, method="dense")
    lo, hi = cheeger_bounds(report, stencil.degree)
    return ExpansionReport(c, subset, lo, hi, stencil.degree * hi, stencil.degree)


@dataclass(frozen=True)
class CutChainRecord:
    subset_size: int
    a: int
    b: int
    norm_sq: int
    norm_sq_formula: int
    displacements: tuple[int, ...]
    displacement_formulas: tuple[int, ...]
    symmetric_differences: tuple[int, ...]
    boundary: int
    half_max_symdiff: Fraction
    implied_c: Fraction
    norm_identity: bool
    displacement_identity: bool
    boundary_inequality: bool
    criterion_inequality: bool


def cut_chain_check(subset: Sequence[int], gens, table: GroupIndexTable) -> CutChainRecord:
    """Exact identities for f = a*1_A - b*1_{A^c} with a|A| = b|A^c|.

    Checks ||f||^2 = (a+b) a |A|, ||s.f - f||^2 = (a+b)^2 |sA delta A| for every
    generator s, |dA| >= max_s |sA delta A| / 2, and |dA| >= c |A| for the
    largest c with ||s.f - f|| >= 2 sqrt(c) ||f||.  Integer arithmetic throughout.
    """
    stencil = gens if isinstance(gens, MarkovStencil) else build_stencil(table, gens)
    n = table.size
    A = np.unique(np.asarray(subset, dtype=np.int64))
    if A.size == 0 or 2 * A.size > n:
        raise ValueError("subset must satisfy 0 < |A| <= |G|/2")
    nA = int(A.size)
    a, b = n - nA, nA
    g = math.gcd(a, b)
    a, b = a // g, b // g
    inA = np.zeros(n, dtype=bool)
    inA[A] = True
    f = np.where(inA, a, -b).astype(np.int64)
    norm_sq = int((f * f).sum())
    disps, forms, syms = [], [], []
    neighbours = np.zeros(n, dtype=bool)
    for perm in stencil.perms:
        sA = np.zeros(n, dtype=bool)
        sA[perm[A]] = True
        neighbours |= sA
        sym = int(np.count_nonzero(sA ^ inA))
        sf = np.empty_like(f)
        sf[perm] = f  # (s.f)(s x) = f(x)
        disps.append(int(((sf - f) ** 2).sum()))
        forms.append((a + b) ** 2 * sym)
        syms.append(sym)
    boundary = int(np.count_nonzero(neighbours & ~inA))
    half = Fraction(max(syms), 2)
    implied = Fraction(max(disps), 4 * norm_sq)
    return CutChainRecord(
        nA, a, b, norm_sq, (a + b) * a * nA, tuple(disps), tuple(forms), tuple(syms),
        boundary, half, implied,
        norm_sq == (a + b) * a * nA,
        disps == forms,
        boundary >= half,
        boundary >= implied * nA,
    )
