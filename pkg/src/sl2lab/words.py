"""Short words over a symmetric generating set: generating pairs and relation lengths.

Words are enumerated breadth-first, in order of length and then
lexicographically over the generators sorted by element index.  Each group
element is kept only at its first (shortest, lexicographically least) word,
so the enumeration is a spanning tree of the ball of radius N_max.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import GroupElement, GroupIndexTable, SymmetricGeneratorMultiset
from .spectral import ExceedsCap, build_stencil, girth_pair, pair_stencil, second_eigenvalue
from .subgroups import FULL, closure, maximal_subgroups

__all__ = [
    "DEFAULT_L",
    "DEFAULT_N_MAX",
    "ComparisonRecord",
    "GeneratorWord",
    "SearchReport",
    "comparison_check",
    "enumerate_words",
    "find_generating_pair",
    "girth_ceiling",
    "max_girth_pair",
    "shortest_relation",
]

DEFAULT_N_MAX = 8
DEFAULT_L = 60
# above this order, generation is tested by closure instead of subgroup masks
_MASK_LIMIT = 20_000


def shortest_relation(a: GroupElement, b: GroupElement, table: GroupIndexTable,
                      cap: int | None = None):
    """Shortest nonempty reduced relation between a and b, or ExceedsCap."""
    return girth_pair(a, b, table, cap)


def girth_ceiling(order: int) -> int:
    """Any pair has a relation of length at most 2 ceil(log_3 |G|) + 2 (pigeonhole)."""
    k, ball = 0, 1
    while ball < order:
        k += 1
        ball *= 3
    return 2 * k + 2


@dataclass(frozen=True)
class GeneratorWord:
    letters: tuple[int, ...]
    element: GroupElement

    def __len__(self):
        return len(self.letters)


@dataclass(frozen=True)
class SearchReport:
    fingerprint: str
    N_reached: int
    found: bool
    w1: GeneratorWord | None
    w2: GeneratorWord | None
    shortest_relation: int | None
    certificate: int | None
    words_explored: int
    exhausted: bool
    L: int | None = None
    sufficient: bool | None = None
    ceiling: int | None = None

    @property
    def lengths(self) -> tuple[int, int] | None:
        return (len(self.w1), len(self.w2)) if self.found else None


def _canonical_generators(S: SymmetricGeneratorMultiset, table: GroupIndexTable):
    """Support indices in ascending order, so results ignore S's listing order."""
    return sorted(table.index(g) for g in S.elements)


def _fingerprint(gens: Sequence[int], S: SymmetricGeneratorMultiset, table: GroupIndexTable) -> str:
    weight = {table.index(g): w for g, w in S.support}
    text = f"p={table.p};" + ";".join(f"{i}:{weight[i]}" for i in gens)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def enumerate_words(S: SymmetricGeneratorMultiset, N_max: int, table: GroupIndexTable):
    """``(letters, index)`` for each element of the radius-N_max ball, in search order.

    The identity (empty word) is omitted.  Returns the list and whether the
    ball already filled the closure of S (no new element at some length).
    """
    if table.p != S.p:
        raise ValueError(f"modulus mismatch: {S.p} vs {table.p}")
    gens = _canonical_generators(S, table)
    seen = np.zeros(table.size, dtype=bool)
    seen[0] = True
    level = [((), 0)]
    words = []
    exhausted = False
    for _ in range(N_max):
        nxt = []
        for letters, idx in level:
            for k, g in enumerate(gens):
                j = table.mul_index(idx, g)
                if not seen[j]:
                    seen[j] = True
                    nxt.append((letters + (k,), j))
        if not nxt:
            exhausted = True
            break
        words.extend(nxt)
        level = nxt
    return words, exhausted, gens


class _GenerationTest:
    """Does a pair of indices generate the whole group?"""

    def __init__(self, table: GroupIndexTable):
        self.table = table
        self.masks = None
        if table.size <= _MASK_LIMIT:
            subs = maximal_subgroups(table)
            self.masks = np.zeros((table.size, len(subs)), dtype=bool)
            for k, s in enumerate(subs):
                self.masks[s.indices, k] = True

    def against(self, j: int, others: np.ndarray) -> np.ndarray:
        """Boolean array: does (others[r], j) generate?"""
        if self.masks is not None:
            return ~(self.masks[others] & self.masks[j]).any(axis=1)
        return np.array([closure([int(i), j], self.table) is FULL for i in others], dtype=bool)


def _word(letters, idx, table) -> GeneratorWord:
    return GeneratorWord(tuple(letters), table.element(idx))


def _certificate(i: int, j: int, table: GroupIndexTable) -> int:
    sub = closure([i, j], table, cap=None)
    return table.size if sub is FULL else sub.order


def find_generating_pair(S: SymmetricGeneratorMultiset, N_max: int = DEFAULT_N_MAX,
                         table: GroupIndexTable | None = None,
                         relation_cap: int | None = None) -> SearchReport:
    """First pair of words (by the later word's length, then search order) that generates."""
    if table is None:
        from .core import build_table
        table = build_table(S.p)
    words, exhausted, gens = enumerate_words(S, N_max, table)
    fp = _fingerprint(gens, S, table)
    test = _GenerationTest(table)
    idx = np.array([w[1] for w in words], dtype=np.int64)
    for n, (letters, j) in enumerate(words):
        if n == 0:
            continue
        ok = np.flatnonzero(test.against(j, idx[:n]))
        if ok.size:
            m = int(ok[0])
            w1, w2 = _word(words[m][0], words[m][1], table), _word(letters, j, table)
            rel = shortest_relation(w1.element, w2.element, table, relation_cap)
            return SearchReport(fp, len(w2), True, w1, w2,
                                None if rel is ExceedsCap else rel,
                                _certificate(words[m][1], j, table), n + 1, exhausted)
    reached = len(words[-1][0]) if words else 0
    return SearchReport(fp, reached, False, None, None, None, None, len(words), exhausted)


def max_girth_pair(S: SymmetricGeneratorMultiset, N_max: int = DEFAULT_N_MAX, L: int = DEFAULT_L,
                   table: GroupIndexTable | None = None,
                   require_generating: bool = False) -> SearchReport:
    """Pair of words up to length N_max with the longest shortest relation.

    Ties go to the first pair in search order.  ``sufficient`` says whether
    the girth exceeds L; when the pigeonhole ceiling is at most L no pair can
    be sufficient, and the maximiser is returned with the ceiling recorded.
    """
    if table is None:
        from .core import build_table
        table = build_table(S.p)
    words, exhausted, gens = enumerate_words(S, N_max, table)
    fp = _fingerprint(gens, S, table)
    ceiling = girth_ceiling(table.size)
    test = _GenerationTest(table) if require_generating else None
    idx = np.array([w[1] for w in words], dtype=np.int64)
    best = None
    for n in range(1, len(words)):
        j = int(idx[n])
        partners = range(n)
        if test is not None:
            partners = np.flatnonzero(test.against(j, idx[:n])).tolist()
        for m in partners:
            g = shortest_relation(table.element(int(idx[m])), table.element(j), table)
            if best is None or g > best[0]:
                best = (g, m, n)
        if best is not None and best[0] >= ceiling:
            break
    if best is None:
        reached = len(words[-1][0]) if words else 0
        return SearchReport(fp, reached, False, None, None, None, None, len(words), exhausted,
                            L, False, ceiling)
    g, m, n = best
    w1 = _word(words[m][0], words[m][1], table)
    w2 = _word(words[n][0], words[n][1], table)
    return SearchReport(fp, len(w2), True, w1, w2, g, _certificate(words[m][1], words[n][1], table),
                        len(words), exhausted, L, g > L, ceiling)


@dataclass(frozen=True)
class ComparisonRecord:
    """Spectral comparison between the S-walk and the walk on two words over S.

    ``constant`` is the comparison constant A with E_w <= A E_S, so
    ``gap_S >= gap_words / A``.  ``naive_holds`` records the weaker-looking
    claim gap_S >= gap_words / max(|w1|, |w2|)^2, which is not a theorem when
    S carries small weights.
    """

    gap_S: float
    gap_words: float
    N: int
    constant: Fraction
    bound: float
    holds: bool
    naive_bound: float
    naive_holds: bool


def comparison_check(S: SymmetricGeneratorMultiset, report: SearchReport,
                     table: GroupIndexTable) -> ComparisonRecord:
    if not report.found:
        raise ValueError("search report has no word pair")
    gens = _canonical_generators(S, table)
    weight = {table.index(g): w for g, w in S.support}
    pos = {g: k for k, g in enumerate(gens)}
    inverse_letter = [pos[int(table.inverse[g])] for g in gens]
    words = []
    for w in (report.w1, report.w2):
        words.append(w.letters)
        words.append(tuple(inverse_letter[c] for c in reversed(w.letters)))
    # A = max_s (1 / mu_S(s)) sum_t mu_w(t) |t| N(s, t), with mu_w(t) = 1/4
    A = max(
        sum(Fraction(1, 4) * len(t) * t.count(k) for t in words) / weight[g]
        for k, g in enumerate(gens)
    )
    gap_S = second_eigenvalue(build_stencil(table, S)).gap
    gap_w = second_eigenvalue(pair_stencil(table, report.w1.element, report.w2.element)).gap
    N = max(len(report.w1), len(report.w2))
    bound = gap_w / float(A)
    naive = gap_w / N**2
    slack = 1e-9
    return ComparisonRecord(gap_S, gap_w, N, A, bound, gap_S >= bound - slack, naive,
                            gap_S >= naive - slack)
