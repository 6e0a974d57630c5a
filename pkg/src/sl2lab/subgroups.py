"""Generation tests and the Dickson families of proper subgroups of SL(2, p).

Every proper subgroup of SL(2, p) sits inside a Borel subgroup, the normaliser
of a split or non-split torus, or one of the binary polyhedral groups of order
24, 48 or 120.  :func:`maximal_subgroups` builds all of these (every
conjugate), discovering the exceptional ones by closure search rather than by
congruence conditions on p.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import GroupElement, GroupIndexTable

__all__ = [
    "FULL",
    "Subgroup",
    "SubgroupClass",
    "classify",
    "closure",
    "default_cap",
    "generates",
    "is_metabelian_exact",
    "maximal_subgroups",
    "metabelian_check",
    "metabelian_witness",
    "whole_group",
]

EXCEPTIONAL_ORDERS = (24, 48, 120)
DEFAULT_ENUMERATION_CAP = 10**6


class SubgroupClass(str, enum.Enum):
    BOREL = "Borel"
    SPLIT_TORUS_NORMALIZER = "SplitTorusNormalizer"
    NONSPLIT_TORUS_NORMALIZER = "NonsplitTorusNormalizer"
    EXCEPTIONAL_24 = "Exceptional24"
    EXCEPTIONAL_48 = "Exceptional48"
    EXCEPTIONAL_120 = "Exceptional120"
    SMALL_OTHER = "SmallOther"
    FULL = "Full"


class _FullIndicator:
    """Returned by :func:`closure` once the generated subgroup is the whole group."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "FULL"

    def __bool__(self):
        return True


FULL = _FullIndicator()


@dataclass(frozen=True, eq=False)
class Subgroup:
    indices: np.ndarray
    klass: SubgroupClass | None = None
    _mask: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        idx = np.unique(np.asarray(self.indices, dtype=np.int64))
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @property
    def order(self) -> int:
        return int(self.indices.size)

    def __len__(self):
        return self.order

    @property
    def fingerprint(self) -> bytes:
        return self.indices.tobytes()

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.fingerprint == other.fingerprint

    def __hash__(self):
        return hash(self.fingerprint)

    def mask(self, size: int) -> np.ndarray:
        m = np.zeros(size, dtype=bool)
        m[self.indices] = True
        return m

    def __contains__(self, i) -> bool:
        j = np.searchsorted(self.indices, i)
        return bool(j < self.indices.size and self.indices[j] == i)

    def issubset(self, other: "Subgroup") -> bool:
        return bool(np.isin(self.indices, other.indices, assume_unique=True).all())

    def with_class(self, klass: SubgroupClass) -> "Subgroup":
        return Subgroup(self.indices, klass)


def default_cap(p: int) -> int:
    """Largest order a proper subgroup of SL(2, p) can have."""
    return max(120, p * (p - 1))


def _as_indices(gens: Iterable, table: GroupIndexTable) -> list[int]:
    out = []
    for g in gens:
        out.append(table.index(g) if isinstance(g, GroupElement) else int(g))
    return out


def closure(gens: Iterable, table: GroupIndexTable, cap: int | None | str = "auto"):
    """Subgroup generated by ``gens`` (elements or indices).

    Breadth-first search from the identity under left multiplication by the
    generators and their inverses.  Returns :data:`FULL` as soon as the
    search passes ``cap`` elements (default :func:`default_cap`), or when it
    reaches the whole group.  ``cap=None`` disables the early exit.
    """
    idx = _as_indices(gens, table)
    if not idx:
        raise ValueError("closure needs at least one generator")
    if cap == "auto":
        cap = default_cap(table.p)
    gset = sorted(set(idx) | {int(table.inverse[i]) for i in idx})
    perms = [table.left_perm(i).tolist() for i in gset if i != 0]
    n = table.size
    seen = bytearray(n)
    seen[0] = 1
    queue = [0]
    limit = n if cap is None else min(cap, n)
    head = 0
    while head < len(queue):
        h = queue[head]
        head += 1
        for perm in perms:
            t = perm[h]
            if not seen[t]:
                seen[t] = 1
                queue.append(t)
        if len(queue) > limit:
            return FULL
    if len(queue) == n:
        return FULL
    return Subgroup(np.array(queue, dtype=np.int64))


def generates(elements: Sequence, table: GroupIndexTable) -> bool:
    return closure(elements, table) is FULL


def whole_group(table: GroupIndexTable) -> Subgroup:
    return Subgroup(np.arange(table.size), SubgroupClass.FULL)


def classify(sub: Subgroup, table: GroupIndexTable) -> SubgroupClass:
    """Label a subgroup by order plus element-order probes."""
    p, n = table.p, sub.order
    if n == table.size:
        return SubgroupClass.FULL
    orders = table.element_orders()[sub.indices]
    has_unipotent = bool(np.any(orders == p))
    if has_unipotent and n == p * (p - 1):
        return SubgroupClass.BOREL
    # a cyclic subgroup of order p -/+ 1 has index 2 exactly when n = 2(p -/+ 1)
    if n == 2 * (p - 1) and np.any(orders == p - 1):
        return SubgroupClass.SPLIT_TORUS_NORMALIZER
    if n == 2 * (p + 1) and np.any(orders == p + 1):
        return SubgroupClass.NONSPLIT_TORUS_NORMALIZER
    if n in EXCEPTIONAL_ORDERS and not has_unipotent:
        return SubgroupClass(f"Exceptional{n}")
    return SubgroupClass.SMALL_OTHER


def _conjugate_orbit(sub: Subgroup, conj_perms: Sequence[np.ndarray]) -> list[Subgroup]:
    """All conjugates of ``sub``, by orbit search under conjugation by generators of G."""
    found = {sub.fingerprint: sub}
    queue = [sub]
    while queue:
        h = queue.pop()
        for perm in conj_perms:
            k = Subgroup(perm[h.indices], sub.klass)
            if k.fingerprint not in found:
                found[k.fingerprint] = k
                queue.append(k)
    return sorted(found.values(), key=lambda s: s.fingerprint)


def _conjugating_generators(table: GroupIndexTable) -> list[np.ndarray]:
    # the standard unipotent pair generates SL(2,p)
    return [table.conj_perm((1, 1, 0, 1)), table.conj_perm((1, 0, 1, 1))]


def _nonsplit_normalizer(table: GroupIndexTable) -> Subgroup:
    p = table.p
    orders = table.element_orders()
    g = int(np.flatnonzero(orders == p + 1)[0])
    ginv = int(table.inverse[g])
    # x g x^-1 for every x at once
    conj = table.mul_indices(table.mul_indices(np.arange(table.size), np.full(table.size, g)),
                             table.inverse)
    h = int(np.flatnonzero(conj == ginv)[0])
    sub = closure([g, h], table, cap=None)
    assert isinstance(sub, Subgroup) and sub.order == 2 * (p + 1)
    return sub


def _exceptional_candidates(table: GroupIndexTable) -> list[Subgroup]:
    """Closures <x, y> of orders 24/48/120 with x of order 4 and y of order 3, 6 or 8.

    Every element of order 4 has trace 0 and the trace-0 elements form a single
    conjugacy class, so fixing x loses no conjugacy class of subgroup.
    """
    p, n = table.p, table.size
    orders = table.element_orders()
    x = int(np.flatnonzero(orders == 4)[0])
    ys = np.flatnonzero(np.isin(orders, (3, 6, 8)))
    out: dict[bytes, Subgroup] = {}
    for y in ys.tolist():
        sub = closure([x, y], table, cap=max(EXCEPTIONAL_ORDERS))
        if sub is FULL or sub.order not in EXCEPTIONAL_ORDERS or sub.order >= n:
            continue
        if np.any(orders[sub.indices] == p):
            continue
        out.setdefault(sub.fingerprint, sub)
    return list(out.values())


def maximal_subgroups(table: GroupIndexTable, cap: int = DEFAULT_ENUMERATION_CAP) -> list[Subgroup]:
    """Every maximal proper subgroup of SL(2, p), all conjugates, deduplicated."""
    if table.size > cap:
        raise ValueError(f"group order {table.size} exceeds enumeration cap {cap}")
    e = table.entries
    borel = Subgroup(np.flatnonzero(e[:, 2] == 0))
    diag = (e[:, 1] == 0) & (e[:, 2] == 0)
    anti = (e[:, 0] == 0) & (e[:, 3] == 0)
    split = Subgroup(np.flatnonzero(diag | anti))
    seeds = [borel, split, _nonsplit_normalizer(table)] + _exceptional_candidates(table)

    conj_gens = _conjugating_generators(table)
    candidates: dict[bytes, Subgroup] = {}
    for s in seeds:
        if s.fingerprint in candidates:
            continue
        s = s.with_class(classify(s, table))
        for c in _conjugate_orbit(s, conj_gens):
            candidates.setdefault(c.fingerprint, c)

    cands = sorted(candidates.values(), key=lambda s: (-s.order, s.fingerprint))
    masks = np.zeros((len(cands), table.size), dtype=bool)
    for i, s in enumerate(cands):
        masks[i, s.indices] = True
    maximal = []
    for i, s in enumerate(cands):
        bigger = [j for j in range(i) if cands[j].order > s.order]
        if bigger and np.any(masks[bigger][:, s.indices].all(axis=1)):
            continue
        maximal.append(s)
    maximal.sort(key=lambda s: (s.klass.value, s.fingerprint))
    return maximal


def _commutators(table: GroupIndexTable, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """[x, y] = x y x^-1 y^-1, vectorised over index arrays."""
    xy = table.mul_indices(x, y)
    return table.mul_indices(xy, table.mul_indices(table.inverse[x], table.inverse[y]))


def metabelian_witness(sub: Subgroup, table: GroupIndexTable, samples: int = 20000,
                       seed: int = 0, exhaustive_limit: int = 30):
    """A quadruple (h1, h2, h3, h4) of indices with [[h1,h2],[h3,h4]] != 1, or None.

    Exhaustive over all quadruples when ``|sub| <= exhaustive_limit`` (through
    the distinct values of [h1, h2], which is equivalent), otherwise
    ``samples`` seeded random quadruples.
    """
    h = sub.indices
    if sub.order <= exhaustive_limit:
        h1, h2 = (m.ravel() for m in np.meshgrid(h, h, indexing="ij"))
        comm = _commutators(table, h1, h2)
        vals, first = np.unique(comm, return_index=True)
        c1, c2 = (m.ravel() for m in np.meshgrid(vals, vals, indexing="ij"))
        bad = np.flatnonzero(_commutators(table, c1, c2) != 0)
        if bad.size == 0:
            return None
        k1 = first[np.searchsorted(vals, c1[bad[0]])]
        k2 = first[np.searchsorted(vals, c2[bad[0]])]
        return (int(h1[k1]), int(h2[k1]), int(h1[k2]), int(h2[k2]))
    rng = np.random.Generator(np.random.Philox(seed))
    q = h[rng.integers(0, sub.order, size=(samples, 4))]
    dc = _commutators(table, _commutators(table, q[:, 0], q[:, 1]),
                      _commutators(table, q[:, 2], q[:, 3]))
    bad = np.flatnonzero(dc != 0)
    return None if bad.size == 0 else tuple(int(v) for v in q[bad[0]])


def metabelian_check(sub: Subgroup, table: GroupIndexTable, samples: int = 20000,
                     seed: int = 0) -> bool:
    return metabelian_witness(sub, table, samples, seed) is None


def is_metabelian_exact(sub: Subgroup, table: GroupIndexTable) -> bool:
    """Derived subgroup is abelian; exact for any order."""
    h = sub.indices
    h1, h2 = (m.ravel() for m in np.meshgrid(h, h, indexing="ij"))
    comm = np.unique(_commutators(table, h1, h2))
    derived = closure(comm.tolist(), table, cap=None)
    if derived is FULL:
        return False
    d = derived.indices
    d1, d2 = (m.ravel() for m in np.meshgrid(d, d, indexing="ij"))
    return bool(np.all(_commutators(table, d1, d2) == 0))
