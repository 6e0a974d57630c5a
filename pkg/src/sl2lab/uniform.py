"""The uniform spectral gap g(p): minimum gap over all generating pairs of SL(2, p).

Pairs are reduced modulo the group Sigma generated by simultaneous
conjugation by GL(2, p) (through PGL(2, p)), swapping the two generators and
inverting either one.  All of these leave the spectrum of mu_(a,b) unchanged,
so g(p) is a minimum over Sigma-orbit representatives.
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from sympy import primerange
from threadpoolctl import threadpool_limits

from .core import GroupElement, GroupIndexTable, build_table
from .spectral import CERTIFY_TOL, SCAN_TOL, spectral_gap_pair
from .subgroups import generates

__all__ = [
    "EXHAUSTIVE_P_CAP",
    "PairOrbitKey",
    "PairSymmetry",
    "PrimeScanRecord",
    "ScanPolicy",
    "ScanSummary",
    "UniformGapReport",
    "canonicalize_pair",
    "enumerate_orbits",
    "scan_primes",
    "uniform_gap",
]

EXHAUSTIVE_P_CAP = 13


@dataclass(frozen=True, order=True)
class PairOrbitKey:
    """Lexicographically smallest (index_a, index_b) over a Sigma-orbit."""

    p: int
    i: int
    j: int

    def encode(self) -> bytes:
        return struct.pack(">III", self.p, self.i, self.j)

    def pair(self, table: GroupIndexTable) -> tuple[GroupElement, GroupElement]:
        return table.element(self.i), table.element(self.j)


def _nonresidue(p: int) -> int:
    return next(v for v in range(2, p) if pow(v, (p - 1) // 2, p) == p - 1)


def pgl_representatives(table: GroupIndexTable) -> list[tuple[int, int, int, int]]:
    """One matrix per element of PGL(2, p): SL(2,p)/{+-1} and diag(nu,1) times it."""
    p = table.p
    half = (p - 1) // 2
    reps = []
    for row in table.entries.tolist():
        lead = next(v for v in row if v)
        if lead <= half:
            reps.append(tuple(row))
    nu = _nonresidue(p)
    twisted = [((nu * a) % p, (nu * b) % p, c, d) for a, b, c, d in reps]
    return reps + twisted


class PairSymmetry:
    """Precomputed action of Sigma on ordered pairs of element indices."""

    def __init__(self, table: GroupIndexTable):
        self.table = table
        dtype = np.int16 if table.size < 2**15 else np.int32
        self.conj = np.stack([table.conj_perm(m) for m in pgl_representatives(table)]).astype(dtype)
        self.inverse = table.inverse.astype(dtype)

    def orbit_codes(self, i: int, j: int) -> np.ndarray:
        n = self.table.size
        A = self.conj[:, i].astype(np.int64)
        B = self.conj[:, j].astype(np.int64)
        Ai, Bi = self.inverse[A].astype(np.int64), self.inverse[B].astype(np.int64)
        firsts = (A, Ai, A, Ai, B, Bi, B, Bi)
        seconds = (B, B, Bi, Bi, A, A, Ai, Ai)
        codes = np.concatenate([x * n + y for x, y in zip(firsts, seconds)])
        return np.unique(codes)

    def key(self, i: int, j: int) -> PairOrbitKey:
        code = int(self.orbit_codes(i, j)[0])
        n = self.table.size
        return PairOrbitKey(self.table.p, code // n, code % n)


def canonicalize_pair(a: GroupElement, b: GroupElement, table: GroupIndexTable,
                      symmetry: PairSymmetry | None = None) -> PairOrbitKey:
    symmetry = symmetry or PairSymmetry(table)
    return symmetry.key(table.index(a), table.index(b))


def enumerate_orbits(p: int, table: GroupIndexTable | None = None,
                     cap: int = EXHAUSTIVE_P_CAP,
                     symmetry: PairSymmetry | None = None) -> Iterator[tuple[PairOrbitKey, int]]:
    """Yield ``(key, orbit size)`` for every Sigma-orbit of generating pairs, by key."""
    if p > cap:
        raise ValueError(f"exhaustive orbit enumeration capped at p <= {cap}, got {p}")
    table = table or build_table(p)
    symmetry = symmetry or PairSymmetry(table)
    n = table.size
    visited = np.zeros(n * n, dtype=bool)
    window = 1 << 16
    pos = 0
    while pos < n * n:
        chunk = visited[pos : pos + window]
        free = np.flatnonzero(~chunk)
        if free.size == 0:
            pos += window
            continue
        code = pos + int(free[0])
        i, j = divmod(code, n)
        codes = symmetry.orbit_codes(i, j)
        visited[codes] = True
        if generates([i, j], table):
            yield PairOrbitKey(p, i, j), int(codes.size)
        pos = code + 1


@dataclass(frozen=True)
class UniformGapReport:
    p: int
    g_p: float
    g_p_two_sided: float
    argmin: PairOrbitKey
    lambda2_at_argmin: float
    n_generating_pairs: int
    n_orbits: int
    mode: str
    tol: float
    converged: bool
    solvable_regime: bool


_WORKER: dict = {}


def _init_worker(p: int):
    _WORKER["table"] = build_table(p)


def _gap_chunk(args):
    p, tol, pairs = args
    table = _WORKER.get("table")
    if table is None or table.p != p:
        table = _WORKER["table"] = build_table(p)
    out = []
    with threadpool_limits(limits=1):
        for i, j in pairs:
            r = spectral_gap_pair(table.element(i), table.element(j), table, tol=tol)
            out.append((r.gap, r.two_sided_gap, r.lambda2, r.converged))
    return out


def _gaps(p: int, tol: float, pairs: Sequence[tuple[int, int]], workers: int,
          table: GroupIndexTable):
    """Spectral data per pair.  Each pair is computed identically in any process."""
    pairs = [(int(i), int(j)) for i, j in pairs]
    if workers <= 1 or len(pairs) < 2:
        _WORKER["table"] = table
        return _gap_chunk((p, tol, pairs))
    size = max(1, -(-len(pairs) // (4 * workers)))
    chunks = [(p, tol, pairs[k : k + size]) for k in range(0, len(pairs), size)]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(p,)) as ex:
        results = list(ex.map(_gap_chunk, chunks))
    return [r for chunk in results for r in chunk]


def uniform_gap(p: int, tol: float = CERTIFY_TOL, workers: int = 1,
                table: GroupIndexTable | None = None) -> UniformGapReport:
    """Certified g(p) by exhaustive orbit enumeration (p within the exhaustive cap)."""
    table = table or build_table(p)
    orbits = list(enumerate_orbits(p, table))
    data = _gaps(p, tol, [(k.i, k.j) for k, _ in orbits], workers, table)
    best = None
    for (key, _), (gap, _, l2, _) in zip(orbits, data):
        # keys ascend, so strict comparison keeps the smallest key among minimisers
        if best is None or gap < best[0]:
            best = (gap, key, l2)
    converged = all(c for *_, c in data)
    return UniformGapReport(
        p=p,
        g_p=best[0],
        g_p_two_sided=min(d[1] for d in data),
        argmin=best[1],
        lambda2_at_argmin=best[2],
        n_generating_pairs=sum(s for _, s in orbits),
        n_orbits=len(orbits),
        mode="exhaustive" if converged else "sampled",
        tol=tol,
        converged=converged,
        solvable_regime=p == 3,
    )


@dataclass(frozen=True)
class ScanPolicy:
    exhaustive_cap: int = EXHAUSTIVE_P_CAP
    samples: int = 10_000
    delta_grid: tuple[float, ...] = (0.001, 0.005, 0.01, 0.02, 0.05, 0.1)


@dataclass(frozen=True)
class PrimeScanRecord:
    p: int
    delta: float
    min_gap_found: float
    certified: bool
    pairs_examined: int
    seed: int
    argmin: tuple[int, int]
    bad: bool
    solvable_regime: bool


@dataclass(frozen=True)
class ScanSummary:
    delta: float
    delta_grid: tuple[float, ...]
    bad_counts: tuple[int, ...]
    n_primes: int
    n_certified: int
    bad_primes: tuple[int, ...] = field(default=())


def _sampled_min(p: int, samples: int, seed: int, tol: float, workers: int,
                 table: GroupIndexTable):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, p])))
    pairs = []
    while len(pairs) < samples:
        i, j = (int(v) for v in rng.integers(0, table.size, size=2))
        if generates([i, j], table):
            pairs.append((i, j))
    data = _gaps(p, tol, pairs, workers, table)
    best = min(range(len(pairs)), key=lambda k: (data[k][0], k))
    converged = all(d[3] for d in data)
    return data[best][0], pairs[best], converged


def scan_primes(p_min: int, p_max: int, delta: float, policy: ScanPolicy = ScanPolicy(),
                seed: int = 0, tol: float = SCAN_TOL, workers: int = 1):
    """Per-prime minimum gap (certified where exhaustive) and the delta-bad census.

    Returns ``(records, summary)``.  Composite numbers and p < 3 are skipped.
    """
    records: list[PrimeScanRecord] = []
    for p in primerange(max(3, p_min), p_max + 1):
        p = int(p)
        table = build_table(p)
        if p <= policy.exhaustive_cap:
            rep = uniform_gap(p, tol=tol, workers=workers, table=table)
            gap, argmin = rep.g_p, (rep.argmin.i, rep.argmin.j)
            certified, examined = rep.mode == "exhaustive", rep.n_orbits
        else:
            gap, argmin, _ = _sampled_min(p, policy.samples, seed, tol, workers, table)
            certified, examined = False, policy.samples
        records.append(PrimeScanRecord(p, delta, gap, certified, examined, seed, argmin,
                                       gap < delta, p == 3))
    grid = tuple(sorted(set(policy.delta_grid) | {delta}))
    summary = ScanSummary(
        delta=delta,
        delta_grid=grid,
        bad_counts=tuple(sum(r.min_gap_found < d for r in records) for d in grid),
        n_primes=len(records),
        n_certified=sum(r.certified for r in records),
        bad_primes=tuple(r.p for r in records if r.bad),
    )
    return records, summary


def default_workers() -> int:
    return int(os.environ.get("SL2LAB_WORKERS", "1"))
