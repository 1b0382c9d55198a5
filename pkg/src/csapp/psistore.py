"""Compressed psi: one block-coded postings list per frequent symbol, plus a
shared binary store for symbols occurring at most ``L`` times.

Symbol routing uses a bitvector ``D`` over ``0..sigma``: ``D[c] = 1`` sends
c to the ``rank1(D, c)``-th segment structure. Otherwise c is rare and its
``n_c`` values sit in the array ``A[n_c]`` at group ``s``, where ``s`` is
the number of earlier rare symbols with the same frequency, found with a
wavelet-matrix rank over the rare symbols' frequencies.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bitio import BitString, BitWriter, DecodeError, PlainBitvector, pack_fields
from .eliasfano import EliasFanoSequence
from .uefblock import BV, EF, NIL, RL, decode_payload, encode_block, plan_block, successor_pair_payload, successor_payload

_U64 = struct.Struct("<Q")

COMPONENTS = ("Samples", "NIL-blocks", "BV-coded", "RL-coded", "EF-coded", "Binary values", "Other")
_MODE_COMPONENT = {NIL: "NIL-blocks", BV: "BV-coded", RL: "RL-coded", EF: "EF-coded"}


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


class WaveletMatrix:
    """Rank over a sequence of small integers in ``[0, 2**nbits)``."""

    def __init__(self, levels: list[PlainBitvector], nbits: int, length: int):
        if len(levels) != nbits or any(len(lv) != length for lv in levels):
            raise DecodeError("inconsistent wavelet matrix levels")
        self.levels = levels
        self.nbits = nbits
        self.length = length
        self.zeros = [lv.zeros for lv in levels]

    @classmethod
    def build(cls, values: Sequence[int], nbits: int) -> WaveletMatrix:
        cur = np.asarray(values, dtype=np.int64)
        if len(cur) and (cur.min() < 0 or int(cur.max()) >> nbits):
            raise ValueError(f"values must fit in {nbits} bits")
        levels = []
        for level in range(nbits):
            bits = (cur >> (nbits - 1 - level)) & 1
            levels.append(PlainBitvector(pack_fields(bits, 1)))
            cur = np.concatenate([cur[bits == 0], cur[bits == 1]])
        return cls(levels, nbits, len(cur))

    def __len__(self) -> int:
        return self.length

    def access(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        value = 0
        for level, lv in enumerate(self.levels):
            bit = lv[i]
            value = (value << 1) | bit
            i = self.zeros[level] + lv.rank1(i) if bit else lv.rank0(i)
        return value

    def rank(self, value: int, i: int) -> int:
        """Occurrences of ``value`` in the first ``i`` entries."""
        if not 0 <= i <= self.length:
            raise IndexError(i)
        if value >> self.nbits or value < 0:
            return 0
        s, e = 0, i
        nbits = self.nbits
        for level, lv in enumerate(self.levels):
            if (value >> (nbits - 1 - level)) & 1:
                z = self.zeros[level]
                s = z + lv.rank1(s)
                e = z + lv.rank1(e)
            else:
                s = lv.rank0(s)
                e = lv.rank0(e)
        return e - s

    def serialize(self) -> bytes:
        return _U64.pack(self.nbits) + _U64.pack(self.length) + b"".join(lv.serialize() for lv in self.levels)

    @classmethod
    def deserialize(cls, buf, offset: int = 0) -> tuple[WaveletMatrix, int]:
        (nbits,) = _U64.unpack_from(buf, offset)
        (length,) = _U64.unpack_from(buf, offset + 8)
        if nbits > 64:
            raise DecodeError("implausible wavelet matrix depth")
        offset += 16
        levels = []
        for _ in range(nbits):
            lv, offset = PlainBitvector.deserialize(buf, offset)
            levels.append(lv)
        return cls(levels, nbits, length), offset


@dataclass(eq=False)
class LowFreqStore:
    D: PlainBitvector
    freq_wt: WaveletMatrix
    arrays: list[PlainBitvector]  # arrays[i] is A_i; arrays[0] is unused and empty
    width: int
    L: int

    def group(self, c: int, nc: int) -> tuple[PlainBitvector, int]:
        """Array and first field index of the rare symbol c with frequency nc."""
        s = self.freq_wt.rank(nc - 1, self.D.rank0(c))
        return self.arrays[nc], nc * s


class SegmentStructure:
    """Block-coded increasing sequence with an Elias-Fano index of block heads.

    Block j covers local ranks ``[j*k, min((j+1)*k, n_c))``; its head is
    ``samples[j]`` and the rest are coded relative to it.
    """

    __slots__ = ("nc", "k", "samples", "tags", "payloads", "lengths", "nblocks")

    def __init__(self, nc: int, k: int, samples: EliasFanoSequence, tags: bytes, payloads: list[int], lengths: list[int]):
        self.nc = nc
        self.k = k
        self.samples = samples
        self.tags = tags
        self.payloads = payloads
        self.lengths = lengths
        self.nblocks = len(tags)
        if samples.k != self.nblocks or len(payloads) != self.nblocks or self.nblocks != -(-nc // k):
            raise DecodeError("segment block counts disagree")

    @classmethod
    def build(cls, values: Sequence[int], k: int, universe_bits: int) -> SegmentStructure:
        values = list(values)
        nc = len(values)
        heads = values[::k]
        tags = bytearray()
        payloads = []
        lengths = []
        for start in range(0, nc, k):
            head = values[start]
            rest = values[start + 1 : start + k]
            if rest:
                plan = plan_block(head, rest)
                block = encode_block(plan, head, rest)
                tags.append(plan.mode)
                payloads.append(block.payload.value)
                lengths.append(block.payload.length)
            else:
                tags.append(NIL)
                payloads.append(0)
                lengths.append(0)
        samples = EliasFanoSequence.encode(heads, universe_bits)
        return cls(nc, k, samples, bytes(tags), payloads, lengths)

    def block_size(self, j: int) -> int:
        """Number of coded values (head excluded) in block j."""
        return min(self.k, self.nc - j * self.k) - 1

    def decode(self) -> list[int]:
        out = []
        heads = self.samples.decode()
        for j, head in enumerate(heads):
            out.append(head)
            out.extend(decode_payload(self.tags[j], self.payloads[j], self.lengths[j], head, self.block_size(j)))
        return out

    def _finish(self, f: int, t: int) -> int:
        """Rank of the first value >= t, given f = index of the first head >= t."""
        if f == 0:
            return 0
        j = f - 1
        k = self.k
        b = min(k, self.nc - j * k) - 1
        if b:
            found = successor_payload(self.tags[j], self.payloads[j], self.lengths[j], self.samples.access(j), b, t)
            if found is not None:
                return j * k + 1 + found[0]
        return min(f * k, self.nc)

    def locate(self, t: int) -> int:
        """Smallest local rank whose value is >= t (``nc`` if none)."""
        hit = self.samples.successor(t)
        return self._finish(self.nblocks if hit is None else hit[0], t)

    def locate_pair(self, t1: int, t2: int) -> tuple[int, int]:
        """``(locate(t1), locate(t2))`` for ``t1 <= t2`` with one index search.

        The second target starts from the block where the first ended and
        only gallops forward through the sample index when it lies beyond
        the next block head.
        """
        samples = self.samples
        nblocks = self.nblocks
        k = self.k
        hit = samples.successor(t1)
        if hit is None:
            f1 = nblocks
            v1 = None
        else:
            f1, v1 = hit
        if f1 == 0:
            if v1 >= t2:
                return 0, 0
            hit2 = samples.successor_from(t2, 1)
            return 0, self._finish(nblocks if hit2 is None else hit2[0], t2)
        j = f1 - 1
        b = min(k, self.nc - j * k) - 1
        tail = min(f1 * k, self.nc)
        base = j * k + 1
        if v1 is None or v1 >= t2:
            if not b:
                return tail, tail
            res1, res2 = successor_pair_payload(
                self.tags[j], self.payloads[j], self.lengths[j], samples.access(j), b, t1, t2
            )
            return (tail if res1 is None else base + res1[0]), (tail if res2 is None else base + res2[0])
        res1 = None
        if b:
            res1 = successor_payload(self.tags[j], self.payloads[j], self.lengths[j], samples.access(j), b, t1)
        r1 = tail if res1 is None else base + res1[0]
        hit2 = samples.successor_from(t2, f1 + 1)
        return r1, self._finish(nblocks if hit2 is None else hit2[0], t2)

    # -- serialization ----------------------------------------------------

    def payload_bits(self) -> BitString:
        w = BitWriter()
        for value, length in zip(self.payloads, self.lengths):
            w.write_bits(BitString(value, length))
        return w.getvalue()

    def tag_bits(self) -> BitString:
        return pack_fields(list(self.tags), 2)

    def offsets(self) -> list[int]:
        out = [0]
        for length in self.lengths:
            out.append(out[-1] + length)
        return out

    def serialize(self) -> bytes:
        offsets = self.offsets()
        return b"".join(
            [
                self.samples.serialize(),
                self.tag_bits().serialize(),
                EliasFanoSequence.encode(offsets, offsets[-1].bit_length()).serialize(),
                self.payload_bits().serialize(),
            ]
        )

    @classmethod
    def deserialize(cls, buf, offset: int, nc: int, k: int) -> tuple[SegmentStructure, int]:
        samples, offset = EliasFanoSequence.deserialize(buf, offset)
        tagbits, offset = BitString.deserialize(buf, offset)
        offs, offset = EliasFanoSequence.deserialize(buf, offset)
        payload, offset = BitString.deserialize(buf, offset)
        nblocks = samples.k
        if tagbits.length != 2 * nblocks or offs.k != nblocks + 1:
            raise DecodeError("segment tag/offset arrays do not match block count")
        tags = bytes(tagbits.read(2 * j, 2) for j in range(nblocks))
        bounds = offs.decode()
        if bounds[-1] != payload.length:
            raise DecodeError("segment payload length does not match offsets")
        text = format(payload.value, f"0{payload.length}b") if payload.length else ""
        payloads = []
        lengths = []
        for a, b in zip(bounds, bounds[1:]):
            payloads.append(int(text[a:b], 2) if b > a else 0)
            lengths.append(b - a)
        return cls(nc, k, samples, tags, payloads, lengths), offset


class PsiStore:
    """The full compressed psi with symbol table and routing structures."""

    def __init__(self, C: list[int], k: int, L: int, lowfreq: LowFreqStore, segments: list[SegmentStructure]):
        self.C = C
        self.n = C[-1]
        self.sigma = len(C) - 2
        self.k = k
        self.L = L
        self.lowfreq = lowfreq
        self.segments = segments
        self._D = lowfreq.D

    # -- construction -----------------------------------------------------

    @classmethod
    def build(cls, psi: np.ndarray, C: Sequence[int], k: int = 128, L: int | None = None) -> PsiStore:
        if k < 2:
            raise ValueError("block size k must be at least 2")
        L = k if L is None else L
        if L < 1:
            raise ValueError("low-frequency threshold L must be at least 1")
        psi = np.asarray(psi, dtype=np.int64)
        C = [int(x) for x in C]
        n = C[-1]
        if len(psi) != n:
            raise ValueError("psi length does not match the symbol table")
        freqs = np.diff(np.asarray(C, dtype=np.int64))
        dense = freqs > L
        D = PlainBitvector(pack_fields(dense.astype(np.int64), 1))
        rare_freqs = freqs[~dense]
        nbits = max(1, (L - 1).bit_length())
        wt = WaveletMatrix.build(rare_freqs - 1, nbits)

        width = ceil_log2(n)
        owner = np.repeat(np.arange(len(freqs)), freqs)
        rare_pos = np.flatnonzero(~dense[owner])
        order = np.argsort(freqs[owner[rare_pos]], kind="stable")
        grouped = psi[rare_pos[order]]
        sizes = np.bincount(rare_freqs, minlength=L + 1) * np.arange(L + 1)
        arrays = [PlainBitvector(BitString())]
        start = 0
        for i in range(1, L + 1):
            stop = start + int(sizes[i])
            arrays.append(PlainBitvector(pack_fields(grouped[start:stop], width)))
            start = stop
        lowfreq = LowFreqStore(D, wt, arrays, width, L)

        Ubits = ceil_log2(n)
        segments = [
            SegmentStructure.build(psi[C[c] : C[c + 1]].tolist(), k, Ubits) for c in np.flatnonzero(dense).tolist()
        ]
        return cls(C, k, L, lowfreq, segments)

    # -- queries ----------------------------------------------------------

    def _check_symbol(self, c: int) -> None:
        if not 0 <= c <= self.sigma:
            raise ValueError(f"symbol {c} outside [0, {self.sigma}]")

    def is_segment(self, c: int) -> bool:
        return bool(self._D[c])

    def _rare_first(self, arr: PlainBitvector, start: int, nc: int, t: int) -> int:
        w = self.lowfreq.width
        lo, hi = 0, nc
        while lo < hi:
            mid = (lo + hi) >> 1
            if arr.read((start + mid) * w, w) >= t:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def geq(self, c: int, pos: int) -> int:
        """Smallest global i in c's segment with psi[i] >= pos, else C[c+1]."""
        self._check_symbol(c)
        base = self.C[c]
        if self._D[c]:
            return base + self.segments[self._D.rank1(c)].locate(pos)
        nc = self.C[c + 1] - base
        arr, start = self.lowfreq.group(c, nc)
        return base + self._rare_first(arr, start, nc, pos)

    def geq_pair(self, c: int, sp: int, ep: int) -> tuple[int, int]:
        """``(geq(c, sp), geq(c, ep + 1) - 1)`` sharing one search."""
        C = self.C
        if not 0 <= c <= self.sigma:
            raise ValueError(f"symbol {c} outside [0, {self.sigma}]")
        base = C[c]
        D = self._D
        if D[c]:
            r1, r2 = self.segments[D.rank1(c)].locate_pair(sp, ep + 1)
            return base + r1, base + r2 - 1
        nc = C[c + 1] - base
        arr, start = self.lowfreq.group(c, nc)
        r1 = self._rare_first(arr, start, nc, sp)
        if r1 == nc:
            return base + nc, base + nc - 1
        w = self.lowfreq.width
        if arr.read((start + r1) * w, w) > ep:
            return base + r1, base + r1 - 1
        r2 = r1 + self._rare_first(arr, start + r1, nc - r1, ep + 1)
        return base + r1, base + r2 - 1

    def reconstruct_segment(self, c: int) -> list[int]:
        self._check_symbol(c)
        if self._D[c]:
            return self.segments[self._D.rank1(c)].decode()
        nc = self.C[c + 1] - self.C[c]
        arr, start = self.lowfreq.group(c, nc)
        w = self.lowfreq.width
        return [arr.read((start + i) * w, w) for i in range(nc)]

    def reconstruct(self) -> list[int]:
        out = []
        for c in range(self.sigma + 1):
            out.extend(self.reconstruct_segment(c))
        return out

    # -- serialization ----------------------------------------------------

    def sections(self) -> list[tuple[str, bytes]]:
        lf = self.lowfreq
        symtab = _U64.pack(len(self.C)) + np.asarray(self.C, dtype="<u8").tobytes()
        low = _U64.pack(lf.L) + _U64.pack(lf.width) + b"".join(a.serialize() for a in lf.arrays[1:])
        segs = _U64.pack(len(self.segments)) + b"".join(s.serialize() for s in self.segments)
        return [
            ("SYMTAB", symtab),
            ("DBV", lf.D.serialize()),
            ("FREQWT", lf.freq_wt.serialize()),
            ("LOWFREQ", low),
            ("SEGMENTS", segs),
        ]

    @classmethod
    def from_sections(cls, sections: dict[str, bytes], k: int, L: int) -> PsiStore:
        try:
            buf = sections["SYMTAB"]
            (count,) = _U64.unpack_from(buf, 0)
            if len(buf) != 8 + 8 * count or count < 2:
                raise DecodeError("bad SYMTAB section")
            C = np.frombuffer(buf, dtype="<u8", offset=8).astype(np.int64).tolist()
            D, _ = PlainBitvector.deserialize(sections["DBV"])
            wt, _ = WaveletMatrix.deserialize(sections["FREQWT"])
            buf = sections["LOWFREQ"]
            (lf_L,) = _U64.unpack_from(buf, 0)
            (width,) = _U64.unpack_from(buf, 8)
            if lf_L != L:
                raise DecodeError("LOWFREQ threshold does not match header")
            offset = 16
            arrays = [PlainBitvector(BitString())]
            for _ in range(L):
                arr, offset = PlainBitvector.deserialize(buf, offset)
                arrays.append(arr)
            buf = sections["SEGMENTS"]
            (nseg,) = _U64.unpack_from(buf, 0)
            if len(D) != len(C) - 1 or D.ones != nseg:
                raise DecodeError("DBV does not match SYMTAB/SEGMENTS")
            offset = 8
            segments = []
            for c in range(len(C) - 1):
                if D[c]:
                    seg, offset = SegmentStructure.deserialize(buf, offset, C[c + 1] - C[c], k)
                    segments.append(seg)
        except (KeyError, struct.error) as exc:
            raise DecodeError(f"malformed index sections: {exc}") from None
        return cls(C, k, L, LowFreqStore(D, wt, arrays, width, L), segments)

    # -- space accounting -------------------------------------------------

    def space_report(self, total_bytes: int | None = None) -> list[tuple[str, int | None, float]]:
        """Rows ``(component, psi values covered, bytes)``.

        Samples and Other cover no values. Block heads count toward their
        block's mode. Other is whatever remains of ``total_bytes`` (by
        default the serialized size of this store's sections).
        """
        if total_bytes is None:
            total_bytes = sum(len(body) + _section_overhead(name) for name, body in self.sections())
        values = dict.fromkeys(COMPONENTS, 0)
        bits = dict.fromkeys(COMPONENTS, 0)
        sample_bytes = 0
        for seg in self.segments:
            sample_bytes += seg.samples.serialized_size()
            for j, mode in enumerate(seg.tags):
                name = _MODE_COMPONENT[mode]
                values[name] += seg.block_size(j) + 1
                bits[name] += seg.lengths[j]
        lf = self.lowfreq
        values["Binary values"] = self.n - sum(s.nc for s in self.segments)
        binary_bytes = sum(a.bits.serialized_size() for a in lf.arrays[1:])
        rows = [("Samples", None, float(sample_bytes))]
        for name in ("NIL-blocks", "BV-coded", "RL-coded", "EF-coded"):
            rows.append((name, values[name], bits[name] / 8))
        rows.append(("Binary values", values["Binary values"], float(binary_bytes)))
        used = sum(r[2] for r in rows)
        rows.append(("Other", None, total_bytes - used))
        return rows


def _section_overhead(name: str) -> int:
    return 1 + len(name) + 8


def build_psi_store(psi, symtab, k: int = 128, L: int | None = None) -> PsiStore:
    return PsiStore.build(psi, symtab, k, L)


def geq(store: PsiStore, c: int, pos: int) -> int:
    return store.geq(c, pos)


def geq_pair(store: PsiStore, c: int, sp: int, ep: int) -> tuple[int, int]:
    return store.geq_pair(c, sp, ep)


def reconstruct_segment(store: PsiStore, c: int) -> list[int]:
    return store.reconstruct_segment(c)


def space_report(store: PsiStore, total_bytes: int | None = None):
    return store.space_report(total_bytes)
