"""Command-line front end: one JSON-lines record per result.

Every run starts with a header record carrying the full configuration
(including seed and worker count).  Data records echo only the settings that
can change numbers, so output is byte-identical across worker counts.
Floats are written with 17 significant digits; wall time is recorded only
with ``--timing``.

Exit codes: 0 success, 1 a computation did not converge, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import enum
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any, Iterator, TextIO

import numpy as np

from . import __version__
from .core import GroupElement, GroupIndexTable, SymmetricGeneratorMultiset, build_table, check_prime, standard_pair
from .subgroups import FULL, closure

__all__ = ["RunConfig", "SCHEMA_VERSION", "UsageError", "dumps", "load_schema", "main", "parse_args", "run"]

SCHEMA_VERSION = "1"
SUBCOMMANDS = ("gap", "uniform-gap", "scan", "walks", "concentration", "prg", "words", "expansion")
# settings that affect scheduling or I/O only; kept out of data records
_EXECUTION_ONLY = ("workers", "output", "fmt", "timing")
# the settings each subcommand actually reads
_FIELDS = {
    "gap": ("p", "pair", "tol"),
    "uniform-gap": ("p", "tol"),
    "scan": ("p_from", "p_to", "delta", "samples", "exhaustive_cap", "tol"),
    "walks": ("n", "event", "samples", "method"),
    "concentration": ("p", "pair", "tau", "gamma"),
    "prg": ("p", "k", "tol"),
    "words": ("p", "gens", "n_max", "L", "mode"),
    "expansion": ("p", "pair"),
}
_DEFAULT_TOL = {"gap": 1e-10, "uniform-gap": 1e-10, "scan": 1e-6, "prg": 1e-10}


class UsageError(Exception):
    """Malformed input detected after argument parsing (exit code 2)."""


@dataclasses.dataclass(frozen=True)
class RunConfig:
    subcommand: str
    p: int | None = None
    p_from: int | None = None
    p_to: int | None = None
    pair: str = "standard"
    gens: str = "standard"
    k: int = 2
    n: tuple[int, ...] = ()
    event: str = "all"
    method: str = "letters"
    tau: float = 2.0
    gamma: float = 0.1
    delta: float = 0.02
    tol: float | None = None
    exhaustive_cap: int = 13
    n_max: int = 8
    L: int = 60
    mode: str = "generating"
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    output: str | None = None
    fmt: str = "jsonl"
    timing: bool = False

    def echo(self, full: bool = False) -> dict:
        """Settings used by this subcommand (plus execution settings if ``full``)."""
        keys = ("subcommand",) + _FIELDS[self.subcommand] + ("seed",)
        if full:
            keys += _EXECUTION_ONLY
        return {k: getattr(self, k) for k in keys}


# -- serialisation -------------------------------------------------------------


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types for reports; GroupElement becomes [a, b, c, d]."""
    if isinstance(obj, enum.Enum):
        return to_jsonable(obj.value)
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, GroupElement):
        return list(obj.entries)
    if obj is FULL:
        return "FULL"
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
        for name in ("lengths",):
            if hasattr(type(obj), name) and isinstance(getattr(type(obj), name), property):
                out[name] = to_jsonable(getattr(obj, name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, bytes):
        return obj.hex()
    if repr(obj) == "ExceedsCap":
        return "ExceedsCap"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _encode(v: Any) -> str:
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g") if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(x)}" for k, x in v.items()) + "}"
    if isinstance(v, list):
        return "[" + ", ".join(_encode(x) for x in v) + "]"
    raise TypeError(f"not a JSON value: {type(v).__name__}")


def dumps(obj: Any) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    return _encode(to_jsonable(obj))


def load_schema(tag: str) -> dict:
    """The published JSON Schema for records with this payload tag."""
    from importlib import resources

    text = resources.files("sl2lab").joinpath("schemas", f"{tag}.schema.json").read_text()
    return json.loads(text)


def _record(tag: str, config: RunConfig, payload: Any, wall_ms: int | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": tag,
        "command": config.subcommand,
        "config": to_jsonable(config.echo()),
        "payload": to_jsonable(payload),
        "wall_time_ms": wall_ms,
    }


def _header(config: RunConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "header",
        "command": config.subcommand,
        "config": to_jsonable(config.echo(full=True)),
        "payload": {"version": __version__, "seed": config.seed, "workers": config.workers},
        "wall_time_ms": None,
    }


# -- argument parsing ----------------------------------------------------------


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sl2lab", description="Expansion experiments on SL(2, p).")
    parser.add_argument("--version", action="version", version=f"sl2lab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="default from SL2LAB_SEED, else 0")
    common.add_argument("--workers", type=int, default=None, help="default from SL2LAB_WORKERS, else 1")
    common.add_argument("--output", "-o", default=None, help="write records here instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("jsonl", "csv"), default="jsonl")
    common.add_argument("--timing", action="store_true", help="record wall_time_ms")
    common.add_argument("--tol", type=float, default=None)
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    pair_help = "'standard', 'random', or 'a,b,c,d;e,f,g,h'"
    s = add("gap", "Spectral gap of one pair.")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--pair", default="standard", help=pair_help)

    s = add("uniform-gap", "Certified minimum gap over all generating pairs.")
    s.add_argument("--p", type=int, required=True)

    s = add("scan", "Per-prime minimum gaps and the delta-bad census.")
    s.add_argument("--from", dest="p_from", type=int, required=True)
    s.add_argument("--to", dest="p_to", type=int, required=True)
    s.add_argument("--delta", type=float, default=0.02)
    s.add_argument("--samples", type=int, default=10_000, help="pairs per sampled prime")
    s.add_argument("--exhaustive-cap", type=int, default=13)

    s = add("walks", "Free-group walk events against their bounds.")
    s.add_argument("--n", type=int, nargs="+", required=True)
    s.add_argument("--event", choices=("all", "return", "commutator", "double_commutator"), default="all")
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--method", choices=("letters", "radial"), default="letters")

    s = add("concentration", "Condition (wg) for one pair.")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--pair", default="standard", help=pair_help)
    s.add_argument("--tau", type=float, default=2.0)
    s.add_argument("--gamma", type=float, default=0.1)

    s = add("prg", "Product replacement graph spectrum.")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--k", type=int, default=2)

    s = add("words", "Short generating or high-girth word pairs over a generating set.")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--gens", default="standard",
                   help="'standard', 'random:K', or elements 'a,b,c,d;...' (symmetrised if not closed under inverses)")
    s.add_argument("--n-max", dest="n_max", type=int, default=8)
    s.add_argument("--L", dest="L", type=int, default=60)
    s.add_argument("--mode", choices=("generating", "girth"), default="generating")

    s = add("expansion", "Exact expansion coefficient against the Cheeger bounds.")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--pair", default="standard", help=pair_help)
    return parser


def parse_args(argv: list[str] | None = None) -> RunConfig:
    """Parse argv into a RunConfig; flags win over SL2LAB_SEED and SL2LAB_WORKERS.

    argparse exits with status 2 on malformed input; semantic problems raise
    :class:`UsageError`.
    """
    ns = _build_parser().parse_args(argv)
    args = vars(ns)
    seed = args.pop("seed")
    workers = args.pop("workers")
    args["seed"] = seed if seed is not None else _env_int("SL2LAB_SEED", 0)
    args["workers"] = workers if workers is not None else _env_int("SL2LAB_WORKERS", 1)
    if args["workers"] < 1:
        raise UsageError("workers must be >= 1")
    if "n" in args:
        args["n"] = tuple(args["n"])
    if "tol" in args and args["tol"] is None:
        args["tol"] = _DEFAULT_TOL.get(args["subcommand"])
    if args.get("tol") is not None and args["tol"] <= 0:
        raise UsageError("tol must be positive")
    return RunConfig(**args)


# -- input specifiers ----------------------------------------------------------


def _prime(p: int | None) -> int:
    try:
        return check_prime(p)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _elements(text: str, p: int) -> list[GroupElement]:
    out = []
    for chunk in text.replace("/", ";").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            entries = [int(v) for v in chunk.split(",")]
            out.append(GroupElement.from_entries(entries, p))
        except ValueError as exc:
            raise UsageError(f"bad element {chunk!r}: {exc}") from None
    return out


def _random_generating_pair(table: GroupIndexTable, seed: int) -> tuple[GroupElement, GroupElement]:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, table.p])))
    while True:
        i, j = (int(v) for v in rng.integers(0, table.size, size=2))
        if closure([i, j], table) is FULL:
            return table.element(i), table.element(j)


def _pair(config: RunConfig, table: GroupIndexTable) -> tuple[GroupElement, GroupElement]:
    if config.pair == "standard":
        return standard_pair(table.p)
    if config.pair == "random":
        return _random_generating_pair(table, config.seed)
    elems = _elements(config.pair, table.p)
    if len(elems) != 2:
        raise UsageError(f"a pair needs exactly two elements, got {len(elems)}")
    return elems[0], elems[1]


def _generators(config: RunConfig, table: GroupIndexTable) -> SymmetricGeneratorMultiset:
    text = config.gens
    if text == "standard":
        return SymmetricGeneratorMultiset.from_pair(*standard_pair(table.p))
    if text.startswith("random:"):
        try:
            K = int(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad generator list {text!r}") from None
        if K < 1:
            raise UsageError("random:K needs K >= 1")
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([config.seed, table.p, K])))
        picks = rng.integers(1, table.size, size=K)
        return SymmetricGeneratorMultiset.symmetric_closure([table.element(int(i)) for i in picks])
    elems = _elements(text, table.p)
    if not elems:
        raise UsageError("empty generator list")
    try:
        return SymmetricGeneratorMultiset.from_slots(elems)
    except ValueError:
        return SymmetricGeneratorMultiset.symmetric_closure(elems)


# -- commands ------------------------------------------------------------------


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, int(round(1000 * (time.perf_counter() - t0)))


def _cmd_gap(config: RunConfig):
    from .spectral import CERTIFY_TOL, girth_pair, spectral_gap_pair

    table = build_table(_prime(config.p))
    a, b = _pair(config, table)
    rep, ms = _timed(lambda: spectral_gap_pair(a, b, table, tol=config.tol or CERTIFY_TOL))
    payload = {"p": table.p, "pair": [a, b], **to_jsonable(rep), "girth": girth_pair(a, b, table)}
    yield "SpectrumReport", payload, ms, rep.converged


def _cmd_uniform_gap(config: RunConfig):
    from .spectral import CERTIFY_TOL
    from .uniform import EXHAUSTIVE_P_CAP, uniform_gap

    p = _prime(config.p)
    if p > EXHAUSTIVE_P_CAP:
        raise UsageError(f"uniform-gap is exhaustive and limited to p <= {EXHAUSTIVE_P_CAP}")
    table = build_table(p)
    rep, ms = _timed(lambda: uniform_gap(p, tol=config.tol or CERTIFY_TOL, workers=config.workers,
                                         table=table))
    payload = to_jsonable(rep)
    payload["argmin_pair"] = to_jsonable(list(rep.argmin.pair(table)))
    yield "UniformGapReport", payload, ms, rep.converged


def _cmd_scan(config: RunConfig):
    from sympy import primerange

    from .spectral import SCAN_TOL
    from .uniform import ScanPolicy, scan_primes

    if config.p_from is None or config.p_to is None or config.p_from > config.p_to:
        raise UsageError("need --from <= --to")
    policy = ScanPolicy(exhaustive_cap=config.exhaustive_cap, samples=config.samples)
    tol = config.tol or SCAN_TOL
    records = []
    for p in primerange(max(3, config.p_from), config.p_to + 1):
        (recs, _), ms = _timed(lambda: scan_primes(int(p), int(p), config.delta, policy,
                                                     seed=config.seed, tol=tol, workers=config.workers))
        records.extend(recs)
        yield "PrimeScanRecord", recs[0], ms, True
    grid = tuple(sorted(set(policy.delta_grid) | {config.delta}))
    from .uniform import ScanSummary

    summary = ScanSummary(
        delta=config.delta,
        delta_grid=grid,
        bad_counts=tuple(sum(r.min_gap_found < d for r in records) for d in grid),
        n_primes=len(records),
        n_certified=sum(r.certified for r in records),
        bad_primes=tuple(r.p for r in records if r.bad),
    )
    yield "ScanSummary", summary, None, True


def _cmd_walks(config: RunConfig):
    from .freewalks import bounds, simulate_events

    if config.samples < 1:
        raise UsageError("samples must be >= 1")
    for n in config.n:
        if n < 1:
            raise UsageError("n must be >= 1")
        yield "BoundValues", bounds(n), None, True
        ests, ms = _timed(lambda: simulate_events(n, config.samples, config.seed, method=config.method))
        for e in ests:
            if config.event in ("all", e.event):
                yield "WalkEstimate", e, ms, True


def _cmd_concentration(config: RunConfig):
    from .concentration import check_wg

    table = build_table(_prime(config.p))
    a, b = _pair(config, table)
    rep, ms = _timed(lambda: check_wg(a, b, config.tau, config.gamma, table, measure_gap=True))
    yield "ConcentrationReport", rep, ms, True


def _cmd_prg(config: RunConfig):
    from .prg import build_prg, prg_spectrum

    p = _prime(config.p)
    if config.k < 2:
        raise UsageError("k must be >= 2")
    try:
        graph = build_prg(p, config.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep, ms = _timed(lambda: prg_spectrum(graph, tol=config.tol or 1e-10))
    yield "PRGReport", rep, ms, rep.converged


def _cmd_words(config: RunConfig):
    from .words import find_generating_pair, max_girth_pair

    table = build_table(_prime(config.p))
    S = _generators(config, table)
    if config.mode == "generating":
        rep, ms = _timed(lambda: find_generating_pair(S, config.n_max, table))
    else:
        rep, ms = _timed(lambda: max_girth_pair(S, config.n_max, config.L, table))
    yield "SearchReport", rep, ms, True


def _cmd_expansion(config: RunConfig):
    from .spectral import expansion_exact

    table = build_table(_prime(config.p))
    a, b = _pair(config, table)
    try:
        rep, ms = _timed(lambda: expansion_exact(table, SymmetricGeneratorMultiset.from_pair(a, b)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    yield "ExpansionReport", rep, ms, True


_COMMANDS = {
    "gap": _cmd_gap,
    "uniform-gap": _cmd_uniform_gap,
    "scan": _cmd_scan,
    "walks": _cmd_walks,
    "concentration": _cmd_concentration,
    "prg": _cmd_prg,
    "words": _cmd_words,
    "expansion": _cmd_expansion,
}


def records(config: RunConfig) -> Iterator[tuple[dict, bool]]:
    """Header, then ``(record, converged)`` for each result."""
    yield _header(config), True
    for tag, payload, ms, ok in _COMMANDS[config.subcommand](config):
        yield _record(tag, config, payload, ms if config.timing else None), ok


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = _encode(v)
        elif isinstance(v, float):
            out[key] = format(v, ".17g") if math.isfinite(v) else ""
        else:
            out[key] = "" if v is None else v
    return out


def _write_csv(recs: list[dict], stream: TextIO):
    """One table per payload type, each introduced by a '# type' line."""
    by_type: dict[str, list[dict]] = {}
    for r in recs:
        by_type.setdefault(r["type"], []).append(_flatten(r["payload"]))
    for tag, rows in by_type.items():
        stream.write(f"# {tag}\n")
        keys = list(dict.fromkeys(k for row in rows for k in row))
        w = csv.DictWriter(stream, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def run(config: RunConfig, stream: TextIO | None = None) -> int:
    """Execute a configuration and write its records; returns the exit code."""
    buffered = io.StringIO()
    ok_all = True
    collected = []
    try:
        for rec, ok in records(config):
            ok_all &= bool(ok)
            if config.fmt == "jsonl":
                buffered.write(_encode(rec) + "\n")
            else:
                collected.append(rec)
    except UsageError as exc:
        print(f"sl2lab {config.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    if config.fmt == "csv":
        _write_csv(collected, buffered)
    text = buffered.getvalue()
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)
    return 0 if ok_all else 1


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print(f"sl2lab: error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
