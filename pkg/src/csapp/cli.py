"""Command line: build, count, stats, gen-queries, factorize.

Results go to standard output and diagnostics to standard error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import indexfile
from .corpus import BYTE, MODES, TOKEN, CorpusError, format_query, iter_queries, load_text, parse_tokens
from .index import CsaIndex
from .search import count, factorize_rlz

DEFAULT_K = 128
DEFAULT_QUERY_COUNT = 50_000
DEFAULT_QUERY_LENGTH = {BYTE: 20, TOKEN: 4}


class CliError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _load_index(path: str) -> CsaIndex:
    try:
        return indexfile.loads(_read(path))
    except indexfile.DecodeError as exc:
        raise CliError(f"{path}: {exc}") from None


# -- build ----------------------------------------------------------------------


def cmd_build(args) -> int:
    if args.k < 2:
        raise CliError("--k must be at least 2")
    L = args.k if args.L is None else args.L
    if L < 1:
        raise CliError("--L must be at least 1")
    raw = _read(args.input)
    start = time.perf_counter()
    text = load_text(raw, args.mode)
    index = CsaIndex.build(text, k=args.k, L=L)
    elapsed = time.perf_counter() - start
    try:
        size = indexfile.save(index, args.output)
    except OSError as exc:
        raise CliError(f"cannot write {args.output}: {exc.strerror}") from None
    print(f"n={index.n} sigma={index.sigma} k={index.k} L={index.L} build_seconds={elapsed:.3f} index_bytes={size}")
    return 0


# -- count ----------------------------------------------------------------------

_WORKER_INDEX: CsaIndex | None = None


def _count_chunk(patterns):
    return [count(_WORKER_INDEX, p) for p in patterns]


def _count_all(index: CsaIndex, patterns: list, workers: int) -> list[int]:
    if workers <= 1 or len(patterns) < 2:
        return [count(index, p) for p in patterns]
    import multiprocessing as mp

    global _WORKER_INDEX
    _WORKER_INDEX = index
    size = -(-len(patterns) // workers)
    chunks = [patterns[i : i + size] for i in range(0, len(patterns), size)]
    with mp.get_context("fork").Pool(workers) as pool:
        parts = pool.map(_count_chunk, chunks)
    return [c for part in parts for c in part]


def cmd_count(args) -> int:
    index = _load_index(args.index)
    if args.mode is not None and args.mode != index.mode:
        raise CliError(f"query mode {args.mode} does not match index mode {index.mode}")
    try:
        patterns = list(iter_queries(_read(args.queries), index.mode))
    except CorpusError as exc:
        raise CliError(str(exc)) from None
    symbols = sum(len(p) for p in patterns)
    runs = max(1, args.runs)
    elapsed = 0.0
    for _ in range(runs):
        start = time.perf_counter()
        results = _count_all(index, patterns, args.workers)
        elapsed += time.perf_counter() - start
    elapsed /= runs
    out = sys.stdout
    out.write("".join(f"{r}\n" for r in results))
    per_symbol = elapsed * 1e6 / symbols if symbols else 0.0
    out.write(
        f"# queries={len(patterns)} symbols={symbols} runs={runs} seconds={elapsed:.6f} us_per_symbol={per_symbol:.4f}\n"
    )
    return 0


# -- stats ----------------------------------------------------------------------


def stats_rows(index: CsaIndex, total_bytes: int) -> list[tuple[str, str, str]]:
    report = index.store.space_report(total_bytes)
    n = index.n
    rows = []
    for name, values, nbytes in report:
        pct = "" if values is None else f"{100.0 * values / n:.4f}"
        rows.append((name, pct, f"{nbytes:.2f}"))
    rows.append(("Total", "", f"{float(total_bytes):.2f}"))
    return rows


def cmd_stats(args) -> int:
    data = _read(args.index)
    try:
        index = indexfile.loads(data)
    except indexfile.DecodeError as exc:
        raise CliError(f"{args.index}: {exc}") from None
    print("component,psi_percent,bytes")
    for row in stats_rows(index, len(data)):
        print(",".join(row))
    return 0


# -- gen-queries ----------------------------------------------------------------


def generate_queries(raw: bytes, mode: str, count_: int, length: int, seed: int) -> list:
    """Substrings of ``length`` symbols at uniformly random start positions.

    In byte mode only windows without a newline byte are eligible, since a
    query file holds one pattern per line.
    """
    if mode == BYTE:
        seq = np.frombuffer(raw, dtype=np.uint8)
    else:
        seq = np.asarray(parse_tokens(raw), dtype=np.int64)
    total = len(seq)
    if length < 1:
        raise CliError("--length must be at least 1")
    if length > total:
        raise CliError(f"--length {length} exceeds text length {total}")
    starts = np.arange(total - length + 1)
    if mode == BYTE:
        newlines = np.zeros(total + 1, dtype=np.int64)
        np.cumsum(seq == 10, out=newlines[1:])
        starts = starts[newlines[starts + length] == newlines[starts]]
        if len(starts) == 0:
            raise CliError("no newline-free window of the requested length")
    rng = np.random.default_rng(seed)
    picks = starts[rng.integers(0, len(starts), size=count_)]
    return [seq[p : p + length].tolist() for p in picks.tolist()]


def cmd_gen_queries(args) -> int:
    raw = _read(args.input)
    length = args.length if args.length is not None else DEFAULT_QUERY_LENGTH[args.mode]
    try:
        queries = generate_queries(raw, args.mode, args.count, length, args.seed)
    except CorpusError as exc:
        raise CliError(str(exc)) from None
    body = b"".join(format_query(q, args.mode) + b"\n" for q in queries)
    if args.output == "-":
        sys.stdout.buffer.write(body)
    else:
        Path(args.output).write_bytes(body)
    _log(f"wrote {len(queries)} queries of length {length}")
    return 0


# -- factorize ------------------------------------------------------------------


def cmd_factorize(args) -> int:
    index = _load_index(args.index)
    raw = _read(args.stream)
    try:
        stream = list(raw) if index.mode == BYTE else parse_tokens(raw)
    except CorpusError as exc:
        raise CliError(str(exc)) from None
    start = time.perf_counter()
    factors = factorize_rlz(index, stream)
    elapsed = time.perf_counter() - start
    out = sys.stdout
    out.write("".join(f"{f.length}\n" if f.length else f"0 {f.literal}\n" for f in factors))
    matched = sum(f.length for f in factors)
    avg = matched / len(factors) if factors else 0.0
    per_symbol = elapsed * 1e6 / len(stream) if stream else 0.0
    out.write(
        f"# factors={len(factors)} symbols={len(stream)} literals={sum(1 for f in factors if not f.length)} "
        f"avg_factor_length={avg:.4f} us_per_symbol={per_symbol:.4f}\n"
    )
    return 0


# -- entry point ----------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csapp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an index file from a text")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--mode", choices=MODES, default=BYTE)
    p.add_argument("--k", type=int, default=DEFAULT_K, help="block size and sample interval (default 128)")
    p.add_argument("--L", type=int, default=None, help="low-frequency threshold (default k)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("count", help="count occurrences of each query")
    p.add_argument("index")
    p.add_argument("queries")
    p.add_argument("--mode", choices=MODES, default=None, help="assert the query mode")
    p.add_argument("--runs", type=int, default=1, help="average timing over this many runs")
    p.add_argument("--workers", type=int, default=1, help="shard queries across processes")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("stats", help="space breakdown as CSV")
    p.add_argument("index")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen-queries", help="extract random patterns from a text")
    p.add_argument("input")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--mode", choices=MODES, default=BYTE)
    p.add_argument("--count", type=int, default=DEFAULT_QUERY_COUNT)
    p.add_argument("--length", type=int, default=None, help="symbols per pattern (default 20 bytes / 4 tokens)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_queries)

    p = sub.add_parser("factorize", help="greedy RLZ factorization against an index of the reversed dictionary")
    p.add_argument("index")
    p.add_argument("stream")
    p.set_defaults(func=cmd_factorize)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, CorpusError) as exc:
        _log(f"csapp {args.command}: error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
