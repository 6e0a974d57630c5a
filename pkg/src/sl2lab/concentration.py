"""Walk distributions mu^(l) on SL(2, p) and the non-concentration condition (wg).

(wg) asks that an l-step walk, l about tau * log_3 p, avoids every proper
subgroup: sup_H mu^(l)(H) <= p^-gamma.  Mass is monotone under inclusion, so
the sup only needs the maximal subgroups (all conjugates) and the trivial
subgroup, which stands in for the small subgroups not contained in them.

Distributions run either in floating point or exactly, as integer counts over
the common denominator degree^l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import GroupElement, GroupIndexTable
from .spectral import MarkovStencil, pair_stencil, spectral_gap_pair
from .subgroups import Subgroup, maximal_subgroups

__all__ = [
    "ConcentrationReport",
    "EXACT_P_LIMIT",
    "EXACT_STEP_LIMIT",
    "FlatteningRecord",
    "GroupDistribution",
    "check_wg",
    "flattening_identity_check",
    "flattening_profile",
    "step",
    "subgroup_mass",
    "walk_distribution",
    "wg_length",
]

# exact mode budget: 2l steps for the identity at l <= 20, groups up to p = 13
EXACT_STEP_LIMIT = 40
EXACT_P_LIMIT = 13
_INT64_SAFE = 1 << 62


@dataclass(frozen=True, eq=False)
class GroupDistribution:
    """A measure on element indices after ``steps`` convolutions.

    Exact mode stores integer counts in ``values`` with the measure equal to
    ``values / denominator``; floating mode has ``denominator=None``.
    """

    values: np.ndarray
    steps: int = 0
    denominator: int | None = None

    @classmethod
    def delta(cls, size: int, exact: bool = False, at: int = 0) -> "GroupDistribution":
        v = np.zeros(size, dtype=np.int64 if exact else float)
        v[at] = 1
        return cls(v, 0, 1 if exact else None)

    @property
    def exact(self) -> bool:
        return self.denominator is not None

    @property
    def size(self) -> int:
        return int(self.values.size)

    def probabilities(self) -> np.ndarray:
        if not self.exact:
            return self.values
        return np.array([x / self.denominator for x in self.values.tolist()], dtype=float)

    def at(self, i: int):
        if self.exact:
            return Fraction(int(self.values[i]), self.denominator)
        return float(self.values[i])

    def total(self):
        if self.exact:
            return Fraction(sum(int(x) for x in self.values.tolist()), self.denominator)
        return float(self.values.sum())

    def l2_norm_sq(self):
        if self.exact:
            return Fraction(sum(x * x for x in map(int, self.values.tolist())), self.denominator**2)
        return float(self.values @ self.values)

    def sup_norm(self):
        if self.exact:
            return Fraction(int(max(self.values.tolist())), self.denominator)
        return float(self.values.max())


def step(dist: GroupDistribution, stencil: MarkovStencil) -> GroupDistribution:
    """One convolution (mu * nu)(g) = sum_s mu(s) nu(s^-1 g)."""
    if dist.size != stencil.size:
        raise ValueError(f"distribution has {dist.size} entries, stencil {stencil.size}")
    if not dist.exact:
        return GroupDistribution(stencil.convolve(dist.values), dist.steps + 1)
    D = stencil.degree
    denom = dist.denominator * D
    dtype = np.int64 if denom < _INT64_SAFE else object
    src = dist.values.astype(dtype)
    out = np.zeros(dist.size, dtype=dtype)
    for perm, w in zip(stencil.perms, stencil.weights):
        out[perm] += int(w * D) * src
    return GroupDistribution(out, dist.steps + 1, denom)


def _check_exact_budget(steps: int, table: GroupIndexTable):
    if steps > EXACT_STEP_LIMIT or table.p > EXACT_P_LIMIT:
        raise ValueError(
            f"exact mode limited to {EXACT_STEP_LIMIT} steps and p <= {EXACT_P_LIMIT}"
        )


def walk_distribution(a: GroupElement, b: GroupElement, l: int, table: GroupIndexTable,
                      exact: bool = False) -> GroupDistribution:
    """mu_(a,b)^(l) started from the identity."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    if exact:
        _check_exact_budget(l, table)
    stencil = pair_stencil(table, a, b)
    dist = GroupDistribution.delta(table.size, exact)
    for _ in range(l):
        dist = step(dist, stencil)
    return dist


@dataclass(frozen=True)
class FlatteningRecord:
    """Return probability at time 2l against the squared l2 norm at time l."""

    l: int
    return_2l: Fraction | float
    l2_sq: Fraction | float
    sup_norm: Fraction | float
    exact: bool
    equal: bool
    sup_le_l2: bool


def _flattening(l: int, dist_l: GroupDistribution, dist_2l: GroupDistribution, tol: float):
    lhs, rhs, sup = dist_2l.at(0), dist_l.l2_norm_sq(), dist_l.sup_norm()
    if dist_l.exact:
        equal = lhs == rhs
        sup_ok = sup * sup <= rhs
    else:
        equal = abs(lhs - rhs) <= tol
        sup_ok = sup <= math.sqrt(rhs) * (1 + 1e-15)
    return FlatteningRecord(l, lhs, rhs, sup, dist_l.exact, bool(equal), bool(sup_ok))


def flattening_profile(a: GroupElement, b: GroupElement, l_max: int, table: GroupIndexTable,
                       exact: bool = True, tol: float = 1e-12) -> list[FlatteningRecord]:
    """:func:`flattening_identity_check` for every l <= l_max from one walk of 2 l_max steps."""
    if l_max < 0:
        raise ValueError("l must be nonnegative")
    if exact:
        _check_exact_budget(2 * l_max, table)
    stencil = pair_stencil(table, a, b)
    dists = [GroupDistribution.delta(table.size, exact)]
    for _ in range(2 * l_max):
        dists.append(step(dists[-1], stencil))
    return [_flattening(l, dists[l], dists[2 * l], tol) for l in range(l_max + 1)]


def flattening_identity_check(a: GroupElement, b: GroupElement, l: int, table: GroupIndexTable,
                              exact: bool = True, tol: float = 1e-12) -> FlatteningRecord:
    """mu^(2l)(e) = ||mu^(l)||_2^2 (exactly, or within ``tol`` in floating mode)."""
    return flattening_profile(a, b, l, table, exact, tol)[-1]


def subgroup_mass(dist: GroupDistribution, sub: Subgroup) -> float:
    if sub.indices.size and sub.indices[-1] >= dist.size:
        raise ValueError("subgroup indices outside the distribution's table")
    if dist.exact:
        return float(Fraction(sum(int(x) for x in dist.values[sub.indices].tolist()),
                              dist.denominator))
    return float(dist.values[sub.indices].sum())


def wg_length(p: int, tau: float) -> int:
    """tau * log_3 p rounded up to an even integer, at least 2."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    raw = tau * math.log(p) / math.log(3)
    return max(2, 2 * math.ceil(raw / 2 - 1e-12))


@dataclass(frozen=True)
class ConcentrationReport:
    p: int
    pair: tuple[tuple[int, ...], tuple[int, ...]]
    tau: float
    gamma: float
    l_used: int
    class_max: dict[str, float]
    sup_mass: float
    sup_class: str
    threshold: float
    passed: bool
    n_subgroups: int
    gap: float | None = None
    masses: np.ndarray | None = field(default=None, repr=False, compare=False)


def check_wg(a: GroupElement, b: GroupElement, tau: float = 2.0, gamma: float = 0.1,
             table: GroupIndexTable | None = None, subgroups: list[Subgroup] | None = None,
             measure_gap: bool = False) -> ConcentrationReport:
    """Largest l-step mass on a proper subgroup against the threshold p^-gamma.

    ``masses`` holds one entry per maximal subgroup in ``maximal_subgroups``
    order, followed by the trivial subgroup.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if table is None:
        from .core import build_table
        table = build_table(a.p)
    subs = maximal_subgroups(table) if subgroups is None else subgroups
    l = wg_length(table.p, tau)
    dist = walk_distribution(a, b, l, table).values
    masses = np.array([dist[s.indices].sum() for s in subs] + [dist[0]])
    classes = [s.klass.value if s.klass is not None else "Unclassified" for s in subs] + ["Trivial"]
    class_max: dict[str, float] = {}
    for c, m in zip(classes, masses.tolist()):
        class_max[c] = max(class_max.get(c, 0.0), m)
    k = int(np.argmax(masses))
    threshold = float(table.p) ** -gamma
    sup = float(masses[k])
    gap = spectral_gap_pair(a, b, table).gap if measure_gap else None
    return ConcentrationReport(
        p=table.p,
        pair=(a.entries, b.entries),
        tau=float(tau),
        gamma=float(gamma),
        l_used=l,
        class_max=dict(sorted(class_max.items())),
        sup_mass=sup,
        sup_class=classes[k],
        threshold=threshold,
        passed=sup <= threshold,
        n_subgroups=len(subs),
        gap=gap,
        masses=masses,
    )
