"""Bit strings, Elias delta codes and plain bitvectors with rank/select.

In memory a :class:`BitString` is an integer holding the bits most
significant first: stream position 0 is the highest of ``length`` bits.
Multi-bit fields are written MSB first, so a field can be read with a
shift and a mask.  On disk, bits are packed into bytes least significant
bit first and padded with zeros to a byte boundary.
"""
from __future__ import annotations

import struct
from bisect import bisect_left
from typing import Iterable

import numpy as np

__all__ = [
    "BitString",
    "BitWriter",
    "DecodeError",
    "PlainBitvector",
    "delta_decode",
    "delta_decode_int",
    "delta_encode",
    "delta_length",
    "pack_fields",
    "bits_from_positions",
]

_U64 = struct.Struct("<Q")

# Bit reversal within a byte, used to convert between the MSB-first
# in-memory layout and the LSB-first packed file layout.
_REVERSE = bytes(int(f"{i:08b}"[::-1], 2) for i in range(256))
_POP = [bin(i).count("1") for i in range(256)]
# _SELECT[b][j] = MSB-first position of the (j+1)-th set bit of byte b.
_SELECT = [[p for p in range(8) if (b >> (7 - p)) & 1] for b in range(256)]


class DecodeError(ValueError):
    """Raised when a bit stream ends in the middle of a codeword."""


class BitString:
    """An immutable sequence of bits."""

    __slots__ = ("value", "length")

    def __init__(self, value: int = 0, length: int = 0):
        if length < 0 or value < 0 or value.bit_length() > length:
            raise ValueError("value does not fit in the given bit length")
        self.value = value
        self.length = length

    @classmethod
    def from_str(cls, text: str) -> BitString:
        text = text.replace(":", "").replace(" ", "")
        if text.strip("01"):
            raise ValueError(f"not a bit string: {text!r}")
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitString:
        return cls.from_str("".join("1" if b else "0" for b in bits))

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def __repr__(self) -> str:
        shown = str(self)
        if len(shown) > 64:
            shown = shown[:61] + "..."
        return f"BitString({shown!r}, length={self.length})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self.length == other.length and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.value, self.length))

    def __getitem__(self, pos: int) -> int:
        if not 0 <= pos < self.length:
            raise IndexError(pos)
        return (self.value >> (self.length - 1 - pos)) & 1

    def __add__(self, other: BitString) -> BitString:
        return BitString((self.value << other.length) | other.value, self.length + other.length)

    def read(self, pos: int, width: int) -> int:
        """Return the ``width``-bit field starting at ``pos`` as an integer."""
        if pos < 0 or pos + width > self.length:
            raise DecodeError(f"read of {width} bits at {pos} past end {self.length}")
        return (self.value >> (self.length - pos - width)) & ((1 << width) - 1)

    def count_ones(self) -> int:
        return self.value.bit_count()

    # -- packed byte form -------------------------------------------------

    def to_packed(self) -> bytes:
        pad = -self.length % 8
        nbytes = (self.length + pad) // 8
        return (self.value << pad).to_bytes(nbytes, "big").translate(_REVERSE)

    @classmethod
    def from_packed(cls, data: bytes, length: int) -> BitString:
        if len(data) * 8 < length or len(data) * 8 - length >= 8:
            raise DecodeError("packed data does not match bit length")
        value = int.from_bytes(bytes(data).translate(_REVERSE), "big") >> (len(data) * 8 - length)
        return cls(value, length)

    def serialize(self) -> bytes:
        return _U64.pack(self.length) + self.to_packed()

    @classmethod
    def deserialize(cls, buf: bytes | memoryview, offset: int = 0) -> tuple[BitString, int]:
        if offset + 8 > len(buf):
            raise DecodeError("truncated bit string header")
        (length,) = _U64.unpack_from(buf, offset)
        offset += 8
        end = offset + (length + 7) // 8
        if end > len(buf):
            raise DecodeError("truncated bit string body")
        return cls.from_packed(bytes(buf[offset:end]), length), end

    def serialized_size(self) -> int:
        return 8 + (self.length + 7) // 8


class BitWriter:
    """Append-only bit sink producing a :class:`BitString`.

    Bits are gathered in a small accumulator and flushed in fixed chunks so
    that building long streams stays linear.
    """

    _CHUNK = 4096

    def __init__(self) -> None:
        self._chunks: list[int] = []
        self._acc = 0
        self._acc_len = 0

    def __len__(self) -> int:
        return len(self._chunks) * self._CHUNK + self._acc_len

    def write(self, value: int, width: int) -> None:
        if width == 0:
            return
        if value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        self._acc = (self._acc << width) | value
        self._acc_len += width
        while self._acc_len >= self._CHUNK:
            rest = self._acc_len - self._CHUNK
            self._chunks.append(self._acc >> rest)
            self._acc &= (1 << rest) - 1
            self._acc_len = rest

    def write_bit(self, bit: int) -> None:
        self.write(1 if bit else 0, 1)

    def write_bits(self, bits: BitString) -> None:
        if bits.length <= self._CHUNK:
            self.write(bits.value, bits.length)
            return
        for pos in range(0, bits.length, self._CHUNK):
            width = min(self._CHUNK, bits.length - pos)
            self.write(bits.read(pos, width), width)

    def write_delta(self, v: int) -> None:
        self.write(*_delta_parts(v))

    def getvalue(self) -> BitString:
        if not self._chunks:
            return BitString(self._acc, self._acc_len)
        nbytes = self._CHUNK // 8
        head = b"".join(c.to_bytes(nbytes, "big") for c in self._chunks)
        value = (int.from_bytes(head, "big") << self._acc_len) | self._acc
        return BitString(value, len(self))


# -- Elias delta --------------------------------------------------------------


def _delta_parts(v: int) -> tuple[int, int]:
    if v < 1:
        raise ValueError(f"Elias delta is defined for v >= 1, got {v}")
    nbits = v.bit_length()
    lenlen = nbits.bit_length()
    # gamma(nbits) is (lenlen - 1) zeros then nbits in lenlen bits; the
    # leading 1 of v is implied by nbits.
    width = 2 * lenlen - 1 + nbits - 1
    value = (nbits << (nbits - 1)) | (v & ((1 << (nbits - 1)) - 1))
    return value, width


def delta_length(v: int) -> int:
    """Length in bits of the delta codeword of ``v``."""
    nbits = v.bit_length()
    return 2 * nbits.bit_length() - 2 + nbits


def delta_encode(v: int) -> BitString:
    value, width = _delta_parts(v)
    return BitString(value, width)


def delta_decode_int(value: int, length: int, pos: int) -> tuple[int, int]:
    """Decode one delta codeword from the MSB-first integer ``value``.

    Returns the decoded integer and the position just past the codeword.
    """
    remaining = length - pos
    rest = value & ((1 << remaining) - 1)
    if not rest:
        raise DecodeError(f"truncated delta codeword at bit {pos}")
    zeros = remaining - rest.bit_length()
    end = pos + 2 * zeros + 1
    if end > length:
        raise DecodeError(f"truncated delta codeword at bit {pos}")
    nbits = (value >> (length - end)) & ((1 << (zeros + 1)) - 1)
    if nbits == 0 or nbits > 4096:
        raise DecodeError(f"corrupt delta codeword at bit {pos}")
    if nbits == 1:
        return 1, end
    stop = end + nbits - 1
    if stop > length:
        raise DecodeError(f"truncated delta codeword at bit {pos}")
    low = (value >> (length - stop)) & ((1 << (nbits - 1)) - 1)
    return (1 << (nbits - 1)) | low, stop


def delta_decode(stream: BitString, cursor: int = 0) -> tuple[int, int]:
    return delta_decode_int(stream.value, stream.length, cursor)


# -- packing helpers ----------------------------------------------------------


def _int_from_bool_array(bits: np.ndarray) -> int:
    length = len(bits)
    if length == 0:
        return 0
    packed = np.packbits(bits.astype(np.uint8), bitorder="big")
    return int.from_bytes(packed.tobytes(), "big") >> (len(packed) * 8 - length)


def bits_from_positions(positions, length: int) -> BitString:
    """BitString of ``length`` bits with ones exactly at ``positions``."""
    if len(positions) < 64:
        if isinstance(positions, np.ndarray):
            positions = positions.tolist()
        value = 0
        top = length - 1
        for p in positions:
            value |= 1 << (top - p)
        return BitString(value, length)
    bits = np.zeros(length, dtype=bool)
    bits[np.asarray(positions, dtype=np.int64)] = True
    return BitString(_int_from_bool_array(bits), length)


def pack_fields(values, width: int) -> BitString:
    """Concatenate ``values`` as ``width``-bit MSB-first fields."""
    count = len(values)
    if width == 0 or count == 0:
        return BitString(0, 0)
    if count < 64:
        if isinstance(values, np.ndarray):
            values = values.tolist()
        mask = (1 << width) - 1
        acc = 0
        for v in values:
            acc = (acc << width) | (v & mask)
        return BitString(acc, count * width)
    arr = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    bits = ((arr[:, None] >> shifts) & np.uint64(1)).astype(bool).ravel()
    return BitString(_int_from_bool_array(bits), count * width)


# -- plain bitvector ----------------------------------------------------------


class PlainBitvector:
    """Uncompressed bitvector with rank and select support.

    Positions are 0-based for access and rank (``rank1(i)`` counts ones in
    ``[0, i)``); select is 1-based in both its argument and its result, so
    ``select0(j)`` is the 1-based position of the j-th zero.
    Rank uses per-word cumulative counts; select binary-searches them and
    finishes with byte tables.
    """

    __slots__ = ("bits", "length", "_words", "_ones", "_zeros")

    def __init__(self, bits: BitString | str):
        if isinstance(bits, str):
            bits = BitString.from_str(bits)
        self.bits = bits
        self.length = bits.length
        nwords = (self.length + 63) // 64
        if nwords:
            pad = nwords * 64 - self.length
            raw = (bits.value << pad).to_bytes(nwords * 8, "big")
            arr = np.frombuffer(raw, dtype=">u8")
            counts = np.bitwise_count(arr).astype(np.int64)
            self._words = arr.astype(np.uint64).tolist()
        else:
            counts = np.zeros(0, dtype=np.int64)
            self._words = []
        ones = np.zeros(nwords + 1, dtype=np.int64)
        np.cumsum(counts, out=ones[1:])
        self._ones = ones.tolist()
        zeros = np.arange(nwords + 1, dtype=np.int64) * 64 - ones
        if nwords:
            # padding bits of the last word are not zeros of the vector
            zeros[-1] = self.length - ones[-1]
        self._zeros = zeros.tolist()

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, pos: int) -> int:
        if not 0 <= pos < self.length:
            raise IndexError(pos)
        return (self._words[pos >> 6] >> (63 - (pos & 63))) & 1

    def __str__(self) -> str:
        return str(self.bits)

    def __repr__(self) -> str:
        return f"PlainBitvector({self.bits!r})"

    @property
    def ones(self) -> int:
        return self._ones[-1]

    @property
    def zeros(self) -> int:
        return self.length - self._ones[-1]

    def rank1(self, i: int) -> int:
        if not 0 <= i <= self.length:
            raise IndexError(f"rank position {i} outside [0, {self.length}]")
        w = i >> 6
        r = i & 63
        if r == 0:
            return self._ones[w]
        return self._ones[w] + (self._words[w] >> (64 - r)).bit_count()

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def select1(self, j: int) -> int:
        if not 1 <= j <= self._ones[-1]:
            raise IndexError(f"select1({j}) with {self._ones[-1]} ones")
        w = bisect_left(self._ones, j) - 1
        return (w << 6) + _select_in_word(self._words[w], j - self._ones[w]) + 1

    def select0(self, j: int) -> int:
        if not 1 <= j <= self.zeros:
            raise IndexError(f"select0({j}) with {self.zeros} zeros")
        w = bisect_left(self._zeros, j) - 1
        return (w << 6) + _select_in_word(self._words[w] ^ 0xFFFFFFFFFFFFFFFF, j - self._zeros[w]) + 1

    def read(self, pos: int, width: int) -> int:
        """Read a ``width``-bit MSB-first field (``width`` <= 64)."""
        if width == 0:
            return 0
        if pos < 0 or pos + width > self.length:
            raise IndexError(f"field [{pos}, {pos + width}) outside bitvector")
        w = pos >> 6
        off = pos & 63
        if off + width <= 64:
            return (self._words[w] >> (64 - off - width)) & ((1 << width) - 1)
        pair = (self._words[w] << 64) | self._words[w + 1]
        return (pair >> (128 - off - width)) & ((1 << width) - 1)

    def serialize(self) -> bytes:
        return self.bits.serialize()

    @classmethod
    def deserialize(cls, buf, offset: int = 0) -> tuple[PlainBitvector, int]:
        bits, offset = BitString.deserialize(buf, offset)
        return cls(bits), offset


def _select_in_word(word: int, j: int) -> int:
    """0-based MSB-first position of the j-th (1-based) set bit of ``word``."""
    shift = 56
    while True:
        byte = (word >> shift) & 0xFF
        c = _POP[byte]
        if c >= j:
            return (56 - shift) + _SELECT[byte][j - 1]
        j -= c
        shift -= 8
