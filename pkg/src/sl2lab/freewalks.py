"""Simple random walk on the free group F2 = <x, y>: exact radial law and simulation.

A walk of length n is a uniformly random sequence of n letters from
{x, x^-1, y, y^-1}; its position is the freely reduced word.  The distance
from the identity is a birth-death chain (0 -> 1 surely; d -> d+1 with
probability 3/4, d -> d-1 with probability 1/4), which gives exact return
probabilities.  Commutator events are estimated by vectorised free reduction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Sequence

import numpy as np

__all__ = [
    "AssignmentCountRecord",
    "BoundValues",
    "EVENTS",
    "FreeWord",
    "RadialDistribution",
    "WalkEstimate",
    "assignment_counts",
    "bounds",
    "double_commutator_crossover",
    "exact_event_probability",
    "kesten_dominates",
    "point_probability",
    "radial_distribution",
    "reduce_letters",
    "simulate_events",
    "wilson_interval",
]

# letters 0..3 are x, x^-1, y, y^-1
INVERSE = (1, 0, 3, 2)
EVENTS = ("return", "commutator", "double_commutator")
KESTEN = math.sqrt(3) / 2


def reduce_letters(letters: Sequence[int]) -> tuple[int, ...]:
    """Free reduction with a last-in-first-out stack."""
    stack: list[int] = []
    for c in letters:
        if stack and stack[-1] == INVERSE[c]:
            stack.pop()
        else:
            stack.append(c)
    return tuple(stack)


@dataclass(frozen=True)
class FreeWord:
    letters: tuple[int, ...]

    def __post_init__(self):
        if any(c not in (0, 1, 2, 3) for c in self.letters):
            raise ValueError("letters must be in 0..3")
        if reduce_letters(self.letters) != self.letters:
            raise ValueError("word is not reduced")

    @classmethod
    def parse(cls, text: str) -> "FreeWord":
        """From a string over ``xXyY`` (capitals are inverses)."""
        code = {"x": 0, "X": 1, "y": 2, "Y": 3}
        return cls(tuple(code[ch] for ch in text))

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple(INVERSE[c] for c in reversed(self.letters)))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(reduce_letters(self.letters + other.letters))


def commutator(u: FreeWord, v: FreeWord) -> FreeWord:
    return u * v * u.inverse() * v.inverse()


@dataclass(frozen=True)
class RadialDistribution:
    """``counts[d]`` letter sequences of length n end at distance d; q[d] = counts[d] / 4^n."""

    n: int
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return 4**self.n

    def q(self, d: int) -> Fraction:
        if not 0 <= d <= self.n:
            return Fraction(0)
        return Fraction(self.counts[d], self.total)

    def as_fractions(self) -> list[Fraction]:
        return [self.q(d) for d in range(self.n + 1)]


def radial_distribution(n: int) -> RadialDistribution:
    if n < 0:
        raise ValueError("n must be nonnegative")
    c = [1]
    for _ in range(n):
        nxt = [0] * (len(c) + 1)
        for d, v in enumerate(c):
            if not v:
                continue
            if d == 0:
                nxt[1] += 4 * v
            else:
                nxt[d + 1] += 3 * v
                nxt[d - 1] += v
        c = nxt
    return RadialDistribution(n, tuple(c))


def point_probability(n: int, w: FreeWord | int, radial: RadialDistribution | None = None) -> Fraction:
    """P(S_n = w); by isotropy only |w| matters, so an int length is accepted too."""
    length = w if isinstance(w, int) else len(w)
    if length > n:
        return Fraction(0)
    radial = radial or radial_distribution(n)
    if length == 0:
        return radial.q(0)
    return radial.q(length) / (4 * 3 ** (length - 1))


def kesten_dominates(n: int) -> bool:
    """max_w P(S_n = w) <= (sqrt3/2)^n, compared exactly via squares."""
    radial = radial_distribution(n)
    worst = max(point_probability(n, k, radial) for k in range(n + 1))
    return worst * worst <= Fraction(3, 4) ** n


@dataclass(frozen=True)
class BoundValues:
    n: int
    kesten: float
    commutator_bound: float
    double_commutator_bound: float
    effective_kappa: float | None


def bounds(n: int) -> BoundValues:
    """Kesten bound and the two commutator-vanishing bounds at time n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    kesten = 0.75 ** (n / 2)
    poly2 = (8 * n + 1) * (4 * n + 1) + (2 * n + 3)
    log_dc = math.log(poly2) + n * math.log(KESTEN)
    kappa = -log_dc / n if log_dc < 0 else None
    return BoundValues(n, kesten, (2 * n + 2) * kesten, poly2 * kesten, kappa)


def double_commutator_crossover(limit: int = 10_000) -> int:
    """Least n from which the double-commutator bound stays below 1."""
    below = [bounds(n).double_commutator_bound < 1 for n in range(1, limit + 1)]
    # the bound is unimodal in n, so the last failure fixes the crossover
    last_fail = max((i for i, ok in enumerate(below) if not ok), default=-1)
    return last_fail + 2


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("need at least one trial")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = k / n
    den = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / den
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class WalkEstimate:
    n: int
    event: str
    samples: int
    hits: int
    estimate: float
    upper_confidence_95: float
    seed: int


# -- vectorised free reduction ------------------------------------------------
# A batch of words is a (letters, lengths) pair: letters[r, :lengths[r]] holds
# row r's reduced word, padded with -1.

_INV_ARR = np.array(INVERSE + (-1,), dtype=np.int8)  # index -1 maps to -1


def _reduce_stream(letters: np.ndarray):
    """Freely reduce each row of an (batch, n) letter array with a vectorised stack."""
    batch, n = letters.shape
    width = max(n, 1)
    flat = np.full(batch * width, -1, dtype=np.int8)
    base = np.arange(batch, dtype=np.int64) * width
    length = np.zeros(batch, dtype=np.int64)
    for t in range(n):
        c = letters[:, t]
        top = flat[base + np.maximum(length - 1, 0)]
        cancel = (length > 0) & (top == _INV_ARR[c])
        length -= cancel
        # cancelled rows write into the slot just vacated, which is dead
        flat[base + length] = c
        length += ~cancel
    stack = flat.reshape(batch, width)
    stack[np.arange(width)[None, :] >= length[:, None]] = -1
    return stack, length


def _sample_isotropic(n: int, batch: int, rng: np.random.Generator):
    """Endpoint of the walk drawn as |S_n| from the radial law, then a uniform reduced word."""
    radial = radial_distribution(n)
    probs = np.array(radial.counts, dtype=float) / float(radial.total)
    lens = rng.choice(n + 1, size=batch, p=probs / probs.sum())
    steps = rng.integers(0, 3, size=(batch, max(n, 1)), dtype=np.int8)
    letters = np.empty((batch, max(n, 1)), dtype=np.int8)
    letters[:, 0] = rng.integers(0, 4, size=batch, dtype=np.int8)
    for t in range(1, n):
        # any letter except the inverse of its predecessor
        letters[:, t] = ((letters[:, t - 1] ^ 1) + 1 + steps[:, t]) % 4
    letters[np.arange(letters.shape[1])[None, :] >= lens[:, None]] = -1
    return letters, lens.astype(np.int64)


def _inverse_words(letters: np.ndarray, lens: np.ndarray):
    width = letters.shape[1]
    idx = lens[:, None] - 1 - np.arange(width)[None, :]
    gathered = np.take_along_axis(letters, np.maximum(idx, 0), axis=1)
    out = np.where(idx >= 0, _INV_ARR[gathered], -1).astype(np.int8)
    return out, lens


def _cancellation(a, la, b, lb, block: int = 8):
    """Length of the free cancellation between the end of each a-row and the start of each b-row."""
    k = np.zeros(a.shape[0], dtype=np.int64)
    rows = np.arange(a.shape[0])
    limit = np.minimum(la, lb)
    lo = 0
    while rows.size:
        hi = lo + block
        t = np.arange(lo, hi)[None, :]
        ra, rl = a[rows], la[rows, None]
        tail = np.take_along_axis(ra, np.clip(rl - 1 - t, 0, a.shape[1] - 1), axis=1)
        head = b[rows][:, lo:hi]
        if head.shape[1] < block:
            head = np.pad(head, ((0, 0), (0, block - head.shape[1])), constant_values=-1)
        match = (tail == _INV_ARR[head]) & (t < limit[rows, None])
        full = match.all(axis=1)
        k[rows] = lo + np.where(full, block, np.argmin(match, axis=1))
        rows = rows[full]
        lo = hi
    return k


def _product(u, v, k=None):
    """Row-wise reduced product of two batches of reduced words."""
    (a, la), (b, lb) = u, v
    if k is None:
        k = _cancellation(a, la, b, lb)
    keep = la - k
    out_len = keep + lb - k
    batch, wa, wb = a.shape[0], a.shape[1], b.shape[1]
    # flat buffer with a left margin so that b can be shifted by la - 2k < 0
    stride = 2 * wa + wb
    buf = np.full(batch * stride, -1, dtype=np.int8)
    base = np.arange(batch, dtype=np.int64) * stride + wa
    buf[(base + keep - k)[:, None] + np.arange(wb)[None, :]] = b
    grid = buf.reshape(batch, stride)[:, wa:]
    grid[:, :wa] = np.where(np.arange(wa)[None, :] < keep[:, None], a, grid[:, :wa])
    width = max(int(out_len.max(initial=0)), 1)
    out = grid[:, :width].copy()
    out[np.arange(width)[None, :] >= out_len[:, None]] = -1
    return out, out_len


def _commute(u, v, need_products=False):
    """Rows where the reduced words uv and vu coincide.

    Equal words need equal cancellation lengths and equal end letters, which
    rules out almost every row before anything is materialised.
    """
    (a, la), (b, lb) = u, v
    k1 = _cancellation(a, la, b, lb)
    k2 = _cancellation(b, lb, a, la)
    rows = np.arange(a.shape[0])

    def ends(x, lx, y, ly, k):
        # first and last letters of the reduced product xy (-1 if empty)
        first = np.where(lx > k, x[:, 0], y[rows, np.minimum(k, y.shape[1] - 1)])
        last = np.where(ly > k, y[rows, np.maximum(ly - 1, 0)], x[rows, np.maximum(lx - 1 - k, 0)])
        empty = lx + ly - 2 * k == 0
        return np.where(empty, -1, first), np.where(empty, -1, last)

    f1, e1 = ends(a, la, b, lb, k1)
    f2, e2 = ends(b, lb, a, la, k2)
    cand = np.flatnonzero((k1 == k2) & (f1 == f2) & (e1 == e2))
    same = np.zeros(a.shape[0], dtype=bool)
    if cand.size:
        uc, vc = (a[cand], la[cand]), (b[cand], lb[cand])
        uv, vu = _product(uc, vc, k1[cand]), _product(vc, uc, k2[cand])
        w = min(uv[0].shape[1], vu[0].shape[1])
        same[cand] = (uv[1] == vu[1]) & (uv[0][:, :w] == vu[0][:, :w]).all(axis=1)
    if not need_products:
        return same
    return same, _product(u, v, k1), _product(v, u, k2)


def _commutator_batch(u, v):
    """[u, v] = (uv)(vu)^-1 together with the rows where it is trivial."""
    same, uv, vu = _commute(u, v, need_products=True)
    return _product(uv, _inverse_words(*vu)), same


def _event_hits(n: int, batch: int, rng: np.random.Generator, method: str) -> dict[str, int]:
    if method == "letters":
        walks = [_reduce_stream(rng.integers(0, 4, size=(batch, n), dtype=np.int8)) for _ in range(4)]
    else:
        walks = [_sample_isotropic(n, batch, rng) for _ in range(4)]
    c1, triv1 = _commutator_batch(walks[0], walks[1])
    c2, _ = _commutator_batch(walks[2], walks[3])
    dc = _commute(c1, c2)
    return {
        "return": int((walks[0][1] == 0).sum()),
        "commutator": int(triv1.sum()),
        "double_commutator": int(dc.sum()),
    }


def simulate_events(n: int, samples: int, seed: int = 0, batch: int = 10_000,
                    method: str = "letters") -> list[WalkEstimate]:
    """Monte Carlo estimates of P(S1 = 1), P([S1,S2] = 1), P([[S1,S2],[S3,S4]] = 1).

    The same four walks feed all three events.  ``method="letters"`` draws
    the n letters and reduces them; ``"radial"`` draws the endpoint directly
    (|S_n| from the exact radial law, then a uniform reduced word of that
    length, which has the same law by isotropy).  Batches use independent
    Philox streams keyed by (seed, n, batch number).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    if method not in ("letters", "radial"):
        raise ValueError(f"unknown method {method!r}")
    hits = dict.fromkeys(EVENTS, 0)
    for b, start in enumerate(range(0, samples, batch)):
        size = min(batch, samples - start)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n, b])))
        for ev, h in _event_hits(n, size, rng, method).items():
            hits[ev] += h
    out = []
    for ev in EVENTS:
        k = hits[ev]
        est = k / samples
        out.append(WalkEstimate(n, ev, samples, k, est, max(est, wilson_interval(k, samples)[1]), seed))
    return out


def exact_event_probability(n: int, event: str) -> Fraction:
    """Exhaustive enumeration over all letter sequences (tiny n only)."""
    walkers = {"return": 1, "commutator": 2, "double_commutator": 4}[event]
    if 4 ** (n * walkers) > 1 << 20:
        raise ValueError("exhaustive enumeration too large")
    words = [FreeWord(reduce_letters(s)) for s in itertools.product(range(4), repeat=n)]
    hits = 0
    for combo in itertools.product(words, repeat=walkers):
        if event == "return":
            w = combo[0]
        elif event == "commutator":
            w = commutator(*combo)
        else:
            w = commutator(commutator(combo[0], combo[1]), commutator(combo[2], combo[3]))
        hits += len(w) == 0
    return Fraction(hits, len(words) ** walkers)


@dataclass(frozen=True)
class AssignmentCountRecord:
    n: int
    K: int
    c_n: int
    q_hat: float
    d_fraction: float
    alpha_empirical: float | None
    samples: int | None
    seed: int


def assignment_counts(n: int, K: int, samples: int | None = 100_000, seed: int = 0) -> AssignmentCountRecord:
    """|C_n| = 4^(4Kn) exactly and the estimated fraction of non-vanishing assignments.

    ``samples=None`` replaces the Monte Carlo estimate by exhaustive
    enumeration (only feasible for n <= 1).
    """
    if n < 1 or K < 1:
        raise ValueError("n and K must be >= 1")
    c_n = 4 ** (4 * K * n)
    if samples is None:
        q = float(exact_event_probability(n, "double_commutator"))
    else:
        q = next(e for e in simulate_events(n, samples, seed) if e.event == "double_commutator").estimate
    d_fraction = (1.0 - q) ** K
    comp = 1.0 - d_fraction
    alpha = -math.log(comp) / math.log(c_n) if comp > 0 else None
    return AssignmentCountRecord(n, K, c_n, q, d_fraction, alpha, samples, seed)
