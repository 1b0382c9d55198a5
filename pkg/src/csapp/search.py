"""Backward-search counting, greedy RLZ factorization and exact oracles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import map_pattern
from .psistore import PsiStore


@dataclass(frozen=True)
class SearchRange:
    sp: int
    ep: int

    @property
    def empty(self) -> bool:
        return self.ep < self.sp

    @property
    def nocc(self) -> int:
        return 0 if self.ep < self.sp else self.ep - self.sp + 1


@dataclass(frozen=True)
class RlzFactor:
    """A dictionary match of ``length`` symbols, or a literal when length is 0."""

    length: int
    literal: int | None = None

    def __post_init__(self) -> None:
        if self.length < 0 or (self.length == 0) == (self.literal is None):
            raise ValueError("a factor is either a match (length >= 1) or a literal")


def backward_search(store: PsiStore, pattern: Sequence[int]) -> SearchRange:
    sp, ep = 0, store.n - 1
    geq_pair = store.geq_pair
    for c in reversed(pattern):
        sp, ep = geq_pair(c, sp, ep)
        if ep < sp:
            break
    return SearchRange(sp, ep)


def backward_search_trace(store: PsiStore, pattern: Sequence[int]) -> list[SearchRange]:
    """Ranges after each step; entry i is the range for ``pattern[i:]``.

    Entries for suffixes never reached (after the range empties) are omitted,
    so the list is right-aligned: ``trace[-1]`` is for ``pattern[m-1:]``.
    """
    sp, ep = 0, store.n - 1
    out = []
    for c in reversed(pattern):
        sp, ep = store.geq_pair(c, sp, ep)
        out.append(SearchRange(sp, ep))
        if ep < sp:
            break
    out.reverse()
    return out


def count(index, pattern) -> int:
    """Occurrences of a source-alphabet pattern in an indexed text."""
    mapped = map_pattern(pattern, index.alphabet_map)
    if mapped is None:
        return 0
    return backward_search(index.store, mapped).nocc


def naive_count(text: Sequence[int], pattern: Sequence[int]) -> int:
    """Exact count by direct scan of ``text`` minus its final sentinel."""
    body = list(text[:-1]) if len(text) else []
    m = len(pattern)
    if m == 0:
        return len(text)
    pattern = list(pattern)
    first = pattern[0]
    total = 0
    for i in range(len(body) - m + 1):
        if body[i] == first and body[i : i + m] == pattern:
            total += 1
    return total


def factorize_rlz(index, stream: Sequence[int]) -> list[RlzFactor]:
    """Greedy RLZ factors of ``stream`` against the dictionary D.

    ``index`` must be built over D reversed. Appending a symbol to the
    current chunk of ``stream`` is one backward-search step against the
    reversed dictionary, so chunks are grown left to right until the range
    empties. A symbol that cannot start a match becomes a literal factor.
    """
    store = index.store
    lookup = index.alphabet_map
    geq_pair = store.geq_pair
    full_ep = store.n - 1
    factors = []
    sp, ep = 0, full_ep
    length = 0
    i = 0
    total = len(stream)
    while i < total:
        sym = stream[i]
        c = lookup.get(sym)
        if c is not None:
            nsp, nep = geq_pair(c, sp, ep)
            if nsp <= nep:
                sp, ep = nsp, nep
                length += 1
                i += 1
                continue
        if length:
            factors.append(RlzFactor(length))
            sp, ep = 0, full_ep
            length = 0
        else:
            factors.append(RlzFactor(0, sym))
            i += 1
    if length:
        factors.append(RlzFactor(length))
    return factors


def factor_chunks(stream: Sequence[int], factors: Sequence[RlzFactor]) -> list:
    """Split ``stream`` into the pieces described by ``factors``."""
    out = []
    pos = 0
    for f in factors:
        step = f.length or 1
        out.append(stream[pos : pos + step])
        pos += step
    return out
