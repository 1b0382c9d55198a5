"""On-disk index format.

Layout (all integers little-endian)::

    magic "CSAPPIDX" | version u32
    n u64 | sigma u64 | k u64 | L u64 | mode u8 (0 byte, 1 token)
    alphabet: sigma bytes (byte mode) or sigma u64 (token mode)
    section count u32, then per section: name length u8, name, body length u64, body
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .bitio import DecodeError
from .corpus import BYTE, TOKEN
from .index import CsaIndex
from .psistore import PsiStore

MAGIC = b"CSAPPIDX"
VERSION = 1
_MODES = {BYTE: 0, TOKEN: 1}
_HEADER = struct.Struct("<QQQQB")


class IndexFormatError(DecodeError):
    pass


def header_bytes(index: CsaIndex) -> bytes:
    store = index.store
    out = [MAGIC, struct.pack("<I", VERSION), _HEADER.pack(store.n, store.sigma, store.k, store.L, _MODES[index.mode])]
    if index.mode == BYTE:
        out.append(bytes(index.alphabet))
    else:
        out.append(np.asarray(index.alphabet, dtype="<u8").tobytes())
    return b"".join(out)


def dumps(index: CsaIndex) -> bytes:
    sections = index.store.sections()
    out = [header_bytes(index), struct.pack("<I", len(sections))]
    for name, body in sections:
        tag = name.encode("ascii")
        out.append(bytes([len(tag)]) + tag + struct.pack("<Q", len(body)))
        out.append(body)
    return b"".join(out)


def loads(data: bytes) -> CsaIndex:
    view = memoryview(data)
    if bytes(view[:8]) != MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    try:
        (version,) = struct.unpack_from("<I", view, 8)
        if version != VERSION:
            raise IndexFormatError(f"unsupported index version {version} (expected {VERSION})")
        n, sigma, k, L, mode_code = _HEADER.unpack_from(view, 12)
        offset = 12 + _HEADER.size
        modes = {v: m for m, v in _MODES.items()}
        if mode_code not in modes:
            raise IndexFormatError(f"unknown mode code {mode_code}")
        mode = modes[mode_code]
        if mode == BYTE:
            alphabet = tuple(view[offset : offset + sigma])
            offset += sigma
        else:
            alphabet = tuple(np.frombuffer(view, dtype="<u8", count=sigma, offset=offset).tolist())
            offset += 8 * sigma
        (nsec,) = struct.unpack_from("<I", view, offset)
        offset += 4
        sections = {}
        for _ in range(nsec):
            size = view[offset]
            name = bytes(view[offset + 1 : offset + 1 + size]).decode("ascii")
            offset += 1 + size
            (length,) = struct.unpack_from("<Q", view, offset)
            offset += 8
            if offset + length > len(view):
                raise IndexFormatError(f"section {name} truncated")
            sections[name] = bytes(view[offset : offset + length])
            offset += length
    except (struct.error, IndexError, ValueError) as exc:
        if isinstance(exc, IndexFormatError):
            raise
        raise IndexFormatError(f"truncated or corrupt index header: {exc}") from None
    if offset != len(view):
        raise IndexFormatError("trailing bytes after last section")
    store = PsiStore.from_sections(sections, k, L)
    if store.n != n or store.sigma != sigma or len(alphabet) != sigma:
        raise IndexFormatError("header does not match index body")
    return CsaIndex(store, alphabet, mode)


def save(index: CsaIndex, path: str | Path) -> int:
    data = dumps(index)
    Path(path).write_bytes(data)
    return len(data)


def load(path: str | Path) -> CsaIndex:
    return loads(Path(path).read_bytes())
