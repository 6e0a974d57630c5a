"""Exact arithmetic in SL(2, p) and a dense index table over the whole group.

Elements are 2x2 matrices ``[[a, b], [c, d]]`` with entries reduced mod p and
determinant 1.  Every vector over the group (distributions, eigenvectors,
subgroup masks) is indexed through a :class:`GroupIndexTable`, which fixes the
identity at index 0 and orders the remaining elements by their base-p code
``((a*p + b)*p + c)*p + d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime

__all__ = [
    "GroupElement",
    "GroupIndexTable",
    "SymmetricGeneratorMultiset",
    "build_table",
    "check_prime",
    "element_order",
    "identity",
    "inv",
    "mul",
    "standard_pair",
]

DEFAULT_TABLE_CAP = 10**6


def check_prime(p: int) -> int:
    """Validate a modulus: a prime p >= 3."""
    p = int(p)
    if p == 2:
        raise ValueError("p = 2 is rejected: SL(2,2) is isomorphic to S3")
    if p < 3 or not isprime(p):
        raise ValueError(f"modulus must be a prime >= 3, got {p}")
    return p


@dataclass(frozen=True, slots=True)
class GroupElement:
    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        p = self.p
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not 0 <= v < p:
                raise ValueError(f"entry {name}={v} not reduced mod {p}")
        if (self.a * self.d - self.b * self.c) % p != 1:
            raise ValueError(f"determinant of {self.rows()} is not 1 mod {p}")

    @classmethod
    def from_entries(cls, entries: Sequence[int], p: int) -> "GroupElement":
        a, b, c, d = (int(v) % p for v in entries)
        return cls(a, b, c, d, p)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)

    def __repr__(self):
        return f"SL2[{self.a} {self.b}; {self.c} {self.d}](mod {self.p})"


def identity(p: int) -> GroupElement:
    return GroupElement(1, 0, 0, 1, p)


def mul(x: GroupElement, y: GroupElement) -> GroupElement:
    if x.p != y.p:
        raise ValueError(f"modulus mismatch: {x.p} vs {y.p}")
    p = x.p
    return GroupElement(
        (x.a * y.a + x.b * y.c) % p,
        (x.a * y.b + x.b * y.d) % p,
        (x.c * y.a + x.d * y.c) % p,
        (x.c * y.b + x.d * y.d) % p,
        p,
    )


def inv(x: GroupElement) -> GroupElement:
    # det = 1, so the adjugate is the inverse
    p = x.p
    return GroupElement(x.d, (-x.b) % p, (-x.c) % p, x.a, p)


def element_order(x: GroupElement) -> int:
    e = identity(x.p)
    k, y = 1, x
    while y != e:
        y = mul(y, x)
        k += 1
    return k


def standard_pair(p: int) -> tuple[GroupElement, GroupElement]:
    """The unipotent pair ``[[1,1],[0,1]]``, ``[[1,0],[1,1]]``."""
    return GroupElement(1, 1, 0, 1, p), GroupElement(1, 0, 1, 1, p)


def _mul_entries(x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """Row-wise product of (..., 4) entry arrays, reduced mod p."""
    a = x[..., 0] * y[..., 0] + x[..., 1] * y[..., 2]
    b = x[..., 0] * y[..., 1] + x[..., 1] * y[..., 3]
    c = x[..., 2] * y[..., 0] + x[..., 3] * y[..., 2]
    d = x[..., 2] * y[..., 1] + x[..., 3] * y[..., 3]
    return np.stack([a, b, c, d], axis=-1) % p


class GroupIndexTable:
    """Bijection between SL(2, p) and ``range(p*(p*p - 1))``.

    Index 0 is the identity.  Left- and right-multiplication permutations are
    computed on demand and cached; the table is otherwise immutable.
    """

    def __init__(self, p: int, cap: int = DEFAULT_TABLE_CAP):
        p = check_prime(p)
        order = p * (p * p - 1)
        if order > cap:
            raise ValueError(f"|SL(2,{p})| = {order} exceeds the table cap {cap}")
        self.p = p
        self.size = order
        r = np.arange(p, dtype=np.int64)
        a, b, c, d = (m.ravel() for m in np.meshgrid(r, r, r, r, indexing="ij"))
        keep = (a * d - b * c) % p == 1
        codes = (((a * p + b) * p + c) * p + d)[keep]
        ident = (1 * p * p * p) + 1
        codes = np.concatenate([[ident], codes[codes != ident]])
        self.codes = codes
        self.entries = np.stack(
            [codes // p**3, (codes // p**2) % p, (codes // p) % p, codes % p], axis=1
        )
        self._lookup = np.full(p**4, -1, dtype=np.int64)
        self._lookup[codes] = np.arange(order)
        assert self.entries.shape[0] == order
        ent = self.entries
        inv_entries = np.stack([ent[:, 3], -ent[:, 1] % p, -ent[:, 2] % p, ent[:, 0]], axis=1)
        self.inverse = self.lookup_entries(inv_entries)
        self._left: dict[int, np.ndarray] = {}
        self._right: dict[int, np.ndarray] = {}
        self._orders: np.ndarray | None = None

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"GroupIndexTable(p={self.p}, size={self.size})"

    identity_index = 0

    def lookup_entries(self, entries: np.ndarray) -> np.ndarray:
        """Indices of an (..., 4) array of reduced entries; must all be det-1."""
        e = np.asarray(entries, dtype=np.int64)
        p = self.p
        code = ((e[..., 0] * p + e[..., 1]) * p + e[..., 2]) * p + e[..., 3]
        idx = self._lookup[code]
        if np.any(idx < 0):
            raise ValueError("entries outside SL(2,p)")
        return idx

    def index(self, x: GroupElement) -> int:
        if x.p != self.p:
            raise ValueError(f"modulus mismatch: {x.p} vs {self.p}")
        return int(self._lookup[((x.a * self.p + x.b) * self.p + x.c) * self.p + x.d])

    def element(self, i: int) -> GroupElement:
        a, b, c, d = (int(v) for v in self.entries[i])
        return GroupElement(a, b, c, d, self.p)

    def mul_indices(self, i, j) -> np.ndarray:
        """Vectorised product g_i * g_j."""
        return self.lookup_entries(_mul_entries(self.entries[i], self.entries[j], self.p))

    def mul_index(self, i: int, j: int) -> int:
        return int(self.mul_indices(i, j))

    def left_perm(self, i: int) -> np.ndarray:
        """perm[j] = index(g_i * g_j)."""
        i = int(i)
        perm = self._left.get(i)
        if perm is None:
            perm = self.lookup_entries(_mul_entries(self.entries[i][None, :], self.entries, self.p))
            perm.setflags(write=False)
            self._left[i] = perm
        return perm

    def right_perm(self, i: int) -> np.ndarray:
        """perm[j] = index(g_j * g_i)."""
        i = int(i)
        perm = self._right.get(i)
        if perm is None:
            perm = self.lookup_entries(_mul_entries(self.entries, self.entries[i][None, :], self.p))
            perm.setflags(write=False)
            self._right[i] = perm
        return perm

    def conj_perm(self, m: Sequence[int]) -> np.ndarray:
        """perm[j] = index(m g_j m^-1) for any invertible 2x2 matrix m mod p."""
        p = self.p
        m = np.asarray([int(v) % p for v in m], dtype=np.int64)
        det = int(m[0] * m[3] - m[1] * m[2]) % p
        if det == 0:
            raise ValueError("conjugating matrix is singular")
        dinv = pow(det, -1, p)
        minv = np.array([m[3], -m[1], -m[2], m[0]], dtype=np.int64) * dinv % p
        prod = _mul_entries(_mul_entries(m[None, :], self.entries, p), minv[None, :], p)
        return self.lookup_entries(prod)

    def element_orders(self) -> np.ndarray:
        """Order of every element, as an array aligned with the indices."""
        if self._orders is None:
            orders = np.zeros(self.size, dtype=np.int64)
            cur = self.entries.copy()
            ident = self.entries[0]
            k = 1
            while np.any(orders == 0):
                hit = np.all(cur == ident, axis=1) & (orders == 0)
                orders[hit] = k
                cur = _mul_entries(cur, self.entries, self.p)
                k += 1
            orders.setflags(write=False)
            self._orders = orders
        return self._orders


def build_table(p: int, cap: int = DEFAULT_TABLE_CAP) -> GroupIndexTable:
    return GroupIndexTable(p, cap)


class SymmetricGeneratorMultiset:
    """A symmetric probability measure on finitely many group elements.

    Stored as merged ``(element, weight)`` pairs with rational weights summing
    to 1.  Coincident slots (``a == a^-1``, ``b in {a, a^-1}``) merge their
    weight rather than being dropped.
    """

    def __init__(self, weighted: Iterable[tuple[GroupElement, Fraction]]):
        merged: dict[GroupElement, Fraction] = {}
        for g, w in weighted:
            w = Fraction(w)
            if w <= 0:
                raise ValueError("weights must be positive")
            merged[g] = merged.get(g, Fraction(0)) + w
        if not merged:
            raise ValueError("empty generator multiset")
        if sum(merged.values()) != 1:
            raise ValueError("weights must sum to 1")
        for g, w in merged.items():
            if merged.get(inv(g)) != w:
                raise ValueError(f"multiset is not symmetric: {g} lacks a matching inverse")
        ps = {g.p for g in merged}
        if len(ps) != 1:
            raise ValueError("generators over different moduli")
        self.p = ps.pop()
        self.support: tuple[tuple[GroupElement, Fraction], ...] = tuple(merged.items())

    @classmethod
    def from_pair(cls, a: GroupElement, b: GroupElement) -> "SymmetricGeneratorMultiset":
        q = Fraction(1, 4)
        return cls([(a, q), (inv(a), q), (b, q), (inv(b), q)])

    @classmethod
    def from_slots(cls, slots: Sequence[GroupElement]) -> "SymmetricGeneratorMultiset":
        """Uniform weight over a list that must already be inverse-closed as a multiset."""
        w = Fraction(1, len(slots))
        return cls([(g, w) for g in slots])

    @classmethod
    def symmetric_closure(cls, elements: Sequence[GroupElement]) -> "SymmetricGeneratorMultiset":
        """Uniform measure on the slots ``elements + [inv(e) for e in elements]``."""
        slots = list(elements) + [inv(g) for g in elements]
        return cls.from_slots(slots)

    @property
    def elements(self) -> list[GroupElement]:
        return [g for g, _ in self.support]

    @property
    def weights(self) -> list[Fraction]:
        return [w for _, w in self.support]

    def __len__(self):
        return len(self.support)

    def __repr__(self):
        body = ", ".join(f"{w}*{g!r}" for g, w in self.support)
        return f"SymmetricGeneratorMultiset({body})"
