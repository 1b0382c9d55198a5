"""Text ingestion: byte and integer-token texts remapped to a dense alphabet.

Symbol id 0 is the sentinel and terminates every text; source symbols are
mapped to ids ``1..sigma`` in increasing source order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

BYTE = "byte"
TOKEN = "token"
MODES = (BYTE, TOKEN)


class CorpusError(ValueError):
    """Malformed text or query input."""


@dataclass(frozen=True, eq=False)
class Text:
    """A sentinel-terminated text over the dense alphabet ``0..sigma``.

    ``alphabet[i]`` is the source symbol (byte value or token id) with
    dense id ``i + 1``.
    """

    symbols: np.ndarray
    alphabet: tuple[int, ...]
    mode: str = BYTE
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_lookup", {s: i + 1 for i, s in enumerate(self.alphabet)})

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def sigma(self) -> int:
        return len(self.alphabet)

    @property
    def alphabet_map(self) -> dict[int, int]:
        return self._lookup

    def source(self) -> list[int]:
        """The original symbol sequence (sentinel removed)."""
        return [self.alphabet[s - 1] for s in self.symbols[:-1].tolist()]


def _from_source(values: np.ndarray, mode: str) -> Text:
    alphabet, ids = np.unique(values, return_inverse=True)
    symbols = np.empty(len(values) + 1, dtype=np.int64)
    symbols[:-1] = ids.reshape(-1) + 1
    symbols[-1] = 0
    return Text(symbols, tuple(int(a) for a in alphabet), mode)


def load_byte_text(raw: bytes) -> Text:
    return _from_source(np.frombuffer(bytes(raw), dtype=np.uint8), BYTE)


def parse_tokens(raw: str | bytes, *, where: str = "input") -> list[int]:
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusError(f"{where}: not valid UTF-8: {exc}") from None
    tokens = []
    for pos, word in enumerate(raw.split()):
        if not word.isdigit() or not word.isascii():
            raise CorpusError(f"{where}: malformed token {word!r} at token position {pos}")
        tokens.append(int(word))
    return tokens


def load_token_text(raw: str | bytes) -> Text:
    tokens = parse_tokens(raw)
    if tokens and max(tokens) >= 1 << 63:
        raise CorpusError("token ids must fit in 63 bits")
    return _from_source(np.array(tokens, dtype=np.int64), TOKEN)


def load_text(raw: bytes, mode: str) -> Text:
    if mode == BYTE:
        return load_byte_text(raw)
    if mode == TOKEN:
        return load_token_text(raw)
    raise CorpusError(f"unknown mode {mode!r}")


def map_pattern(pattern: Sequence[int] | bytes, alphabet_map: dict[int, int]) -> list[int] | None:
    """Translate source symbols to dense ids; ``None`` if any is unknown."""
    out = []
    for s in pattern:
        c = alphabet_map.get(s)
        if c is None:
            return None
        out.append(c)
    return out


def iter_queries(raw: bytes, mode: str) -> Iterator[list[int] | bytes]:
    """Yield patterns from a query file, one per line.

    Byte mode yields each line's raw bytes without the newline; token mode
    yields the whitespace-split decimal ids.
    """
    if not raw:
        return
    lines = raw.split(b"\n")
    if lines[-1] == b"":
        lines.pop()
    for lineno, line in enumerate(lines, 1):
        if mode == BYTE:
            yield line
        else:
            yield parse_tokens(line, where=f"query line {lineno}")


def format_query(pattern: Sequence[int], mode: str) -> bytes:
    if mode == BYTE:
        return bytes(pattern)
    return " ".join(str(t) for t in pattern).encode("ascii")
