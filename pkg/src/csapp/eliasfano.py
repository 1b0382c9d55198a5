"""Elias-Fano coding of non-decreasing integer sequences."""
from __future__ import annotations

import struct
from typing import Sequence

import numpy as np

from .bitio import BitString, DecodeError, PlainBitvector, bits_from_positions, pack_fields

_U64 = struct.Struct("<Q")


def low_width(universe: int, count: int) -> int:
    """floor(log2(universe / count)), clamped at zero."""
    if count <= 0:
        return 0
    return max(0, (universe // count).bit_length() - 1)


def encode_parts(values: Sequence[int], ell: int, nbuckets: int) -> tuple[BitString, BitString]:
    """High (unary bucket sizes) and low (ell-bit remainders) bit strings.

    The high part has one 1-bit per value and one 0-bit closing each of
    ``nbuckets`` buckets: element i with high part h sits at position h + i.
    """
    count = len(values)
    if count >= 64:
        arr = np.asarray(values, dtype=np.int64)
        positions = (arr >> ell) + np.arange(count, dtype=np.int64)
        high = bits_from_positions(positions, count + nbuckets)
    else:
        high = bits_from_positions([(v >> ell) + i for i, v in enumerate(values)], count + nbuckets)
    return high, pack_fields(values, ell)


class EliasFanoSequence:
    """Elias-Fano code of ``k`` values in ``[0, 2**U)``."""

    __slots__ = ("k", "U", "ell", "high", "low")

    def __init__(self, k: int, U: int, high: PlainBitvector, low: PlainBitvector):
        self.k = k
        self.U = U
        self.ell = low_width(1 << U, k)
        self.high = high
        self.low = low
        if len(high) != k + (1 << (U - self.ell)) or len(low) != k * self.ell or high.ones != k:
            raise DecodeError("inconsistent Elias-Fano layout")

    @classmethod
    def encode(cls, values: Sequence[int], U: int) -> EliasFanoSequence:
        k = len(values)
        if k < 1:
            raise ValueError("Elias-Fano needs at least one value")
        if U < 0:
            raise ValueError("universe width must be non-negative")
        if isinstance(values, np.ndarray):
            if values.min() < 0 or int(values.max()) >> U:
                raise ValueError(f"values must lie in [0, 2**{U})")
            if np.any(np.diff(values) < 0):
                raise ValueError("values must be non-decreasing")
        else:
            prev = 0
            for v in values:
                if v < prev:
                    raise ValueError("values must be non-decreasing")
                prev = v
            if values[0] < 0 or values[-1] >> U:
                raise ValueError(f"values must lie in [0, 2**{U})")
        ell = low_width(1 << U, k)
        high, low = encode_parts(values, ell, 1 << (U - ell))
        return cls(k, U, PlainBitvector(high), PlainBitvector(low))

    def __len__(self) -> int:
        return self.k

    def size_bits(self) -> int:
        return len(self.high) + len(self.low)

    def access(self, i: int) -> int:
        if not 0 <= i < self.k:
            raise IndexError(f"index {i} outside [0, {self.k})")
        bucket = self.high.select1(i + 1) - 1 - i
        return (bucket << self.ell) | self.low.read(i * self.ell, self.ell)

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def __iter__(self):
        return iter(self.decode())

    def decode(self) -> list[int]:
        ell = self.ell
        bits = str(self.high.bits)
        out = []
        bucket = 0
        i = 0
        for b in bits:
            if b == "1":
                out.append((bucket << ell) | self.low.read(i * ell, ell))
                i += 1
            else:
                bucket += 1
        return out

    def successor(self, x: int) -> tuple[int, int] | None:
        """Smallest ``(index, value)`` with value >= x, or ``None``."""
        if x <= 0:
            return 0, self.access(0)
        ell = self.ell
        h = x >> ell
        if h >= len(self.high) - self.k:
            return None
        high = self.high
        # select0(h) - h elements live in buckets before h
        pos = high.select0(h) if h else 0
        i = pos - h
        k = self.k
        length = high.length
        while i < k and pos < length and high[pos]:
            v = (h << ell) | self.low.read(i * ell, ell)
            if v >= x:
                return i, v
            i += 1
            pos += 1
        if i < k:
            return i, self.access(i)
        return None

    def successor_from(self, x: int, start: int) -> tuple[int, int] | None:
        """Like :meth:`successor`, knowing the answer index is >= ``start``.

        Gallops forward from ``start`` using :meth:`access`, so the cost
        depends on the distance moved rather than on ``k``.
        """
        k = self.k
        if start >= k:
            return None
        v = self.access(start)
        if v >= x:
            return start, v
        lo = start  # access(lo) < x
        step = 1
        hi = start + 1
        while hi < k:
            v = self.access(hi)
            if v >= x:
                break
            lo = hi
            step <<= 1
            hi = lo + step
        else:
            hi = k
        # access(lo) < x; answer in (lo, hi]
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if self.access(mid) >= x:
                hi = mid
            else:
                lo = mid
        if hi >= k:
            return None
        return hi, self.access(hi)

    # -- serialization ----------------------------------------------------

    def serialize(self) -> bytes:
        return _U64.pack(self.k) + _U64.pack(self.U) + self.high.serialize() + self.low.serialize()

    @classmethod
    def deserialize(cls, buf, offset: int = 0) -> tuple[EliasFanoSequence, int]:
        if offset + 16 > len(buf):
            raise DecodeError("truncated Elias-Fano header")
        (k,) = _U64.unpack_from(buf, offset)
        (U,) = _U64.unpack_from(buf, offset + 8)
        if U > 64:
            raise DecodeError(f"implausible universe width {U}")
        high, offset = PlainBitvector.deserialize(buf, offset + 16)
        low, offset = PlainBitvector.deserialize(buf, offset)
        return cls(k, U, high, low), offset

    def serialized_size(self) -> int:
        return 16 + self.high.bits.serialized_size() + self.low.bits.serialized_size()


def ef_encode(values: Sequence[int], U: int) -> EliasFanoSequence:
    return EliasFanoSequence.encode(values, U)


def ef_access(seq: EliasFanoSequence, i: int) -> int:
    return seq.access(i)


def ef_successor(seq: EliasFanoSequence, x: int) -> tuple[int, int] | None:
    return seq.successor(x)
