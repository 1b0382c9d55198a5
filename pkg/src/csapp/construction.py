"""Suffix array, BWT, psi and cumulative symbol counts for a :class:`Text`."""
from __future__ import annotations

import numpy as np

from .corpus import Text


def _dense_ranks(sorted_keys: np.ndarray) -> np.ndarray:
    """Ranks 0.. of already sorted keys, equal keys sharing a rank."""
    change = np.empty(len(sorted_keys), dtype=np.int64)
    change[0] = 0
    np.not_equal(sorted_keys[1:], sorted_keys[:-1], out=change[1:])
    return np.cumsum(change)


def build_suffix_array(text: Text | np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling.

    Each round sorts suffixes by the pair (rank of the first h symbols,
    rank of the next h symbols) packed into one int64 key; the loop stops
    once all ranks are distinct. Works for any integer alphabet.
    """
    symbols = text.symbols if isinstance(text, Text) else np.asarray(text)
    n = len(symbols)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    sa = np.argsort(symbols, kind="stable").astype(np.int64)
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = _dense_ranks(symbols[sa])
    h = 1
    while rank[sa[-1]] < n - 1:
        second = np.zeros(n, dtype=np.int64)
        second[: n - h] = rank[h:] + 1
        key = rank * (n + 1) + second
        sa = np.argsort(key, kind="stable").astype(np.int64)
        rank[sa] = _dense_ranks(key[sa])
        h <<= 1
    return sa


def build_bwt(symbols: np.ndarray, sa: np.ndarray) -> np.ndarray:
    return np.asarray(symbols)[(sa - 1) % len(sa)]


def build_psi(sa: np.ndarray) -> np.ndarray:
    n = len(sa)
    isa = np.empty(n, dtype=np.int64)
    isa[sa] = np.arange(n, dtype=np.int64)
    return isa[(sa + 1) % n]


def build_symbol_table(text: Text) -> list[int]:
    """Cumulative counts C with ``C[c]`` = number of symbols smaller than c.

    Has ``sigma + 2`` entries, so ``C[c + 1] - C[c]`` is the frequency of c
    for every c in ``0..sigma``.
    """
    counts = np.bincount(text.symbols, minlength=text.sigma + 1)
    table = np.zeros(text.sigma + 2, dtype=np.int64)
    np.cumsum(counts, out=table[1:])
    return table.tolist()


def build_all(text: Text) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Suffix array, psi and symbol table in one call."""
    sa = build_suffix_array(text)
    return sa, build_psi(sa), build_symbol_table(text)
