"""Block codec with NIL, BV, EF and RL modes.

A block is a sample (stored elsewhere) followed by ``b`` strictly larger
values, which are coded as offsets ``o = value - sample`` in ``[1, u]``
where ``u`` is the last offset.

* NIL: the offsets are exactly ``1..b``; no payload bits.
* BV: ``u`` bits, bit ``o - 1`` set for each offset.
* EF: Elias-Fano over the offsets with ``ell = floor(log2(u / b))`` and
  ``(u >> ell) + 1`` buckets.
* RL: the gaps from the sample onward as Elias delta codes, each maximal
  run of ``r`` unit gaps written as ``delta(1) delta(r)``.

Query routines take the payload as an MSB-first integer plus its length.
An EF payload's ``ell`` follows from its length alone, since
``length = b + (u >> ell) + 1 + b * ell`` and ``u >> ell`` lies in
``[b, 2b)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .bitio import BitString, BitWriter, DecodeError, bits_from_positions, delta_decode_int, delta_length
from .eliasfano import encode_parts, low_width

NIL, BV, EF, RL = 0, 1, 2, 3
MODE_NAMES = ("NIL", "BV", "EF", "RL")


@dataclass(frozen=True)
class BlockPlan:
    mode: int
    b: int
    u: int
    costs: dict = field(compare=False)

    @property
    def cost(self) -> int:
        return self.costs[self.mode]

    @property
    def mode_name(self) -> str:
        return MODE_NAMES[self.mode]


@dataclass(frozen=True)
class EncodedBlock:
    mode: int
    payload: BitString

    def __len__(self) -> int:
        return self.payload.length


def rl_tokens(sample: int, values: Sequence[int]) -> list:
    """Gap stream of a block: ints for gaps >= 2, ``(1, r)`` for unit runs."""
    tokens: list = []
    prev = sample
    run = 0
    for v in values:
        gap = v - prev
        prev = v
        if gap == 1:
            run += 1
            continue
        if run:
            tokens.append((1, run))
            run = 0
        tokens.append(gap)
    if run:
        tokens.append((1, run))
    return tokens


def rl_cost(tokens: list) -> int:
    total = 0
    for t in tokens:
        if type(t) is tuple:
            total += 1 + delta_length(t[1])
        else:
            total += delta_length(t)
    return total


def ef_block_cost(u: int, b: int) -> int:
    ell = low_width(u, b)
    return b + (u >> ell) + 1 + b * ell


def _check_values(sample: int, values: Sequence[int]) -> None:
    if not values:
        raise ValueError("a block needs at least one value after the sample")
    prev = sample
    for v in values:
        if v <= prev:
            raise ValueError("block values must be strictly increasing and above the sample")
        prev = v


def plan_block(sample: int, values: Sequence[int]) -> BlockPlan:
    _check_values(sample, values)
    b = len(values)
    u = values[-1] - sample
    bv = u
    ef = ef_block_cost(u, b)
    rl = rl_cost(rl_tokens(sample, values))
    costs = {BV: bv, EF: ef, RL: rl}
    if u == b:
        costs[NIL] = 0
        mode = NIL
    elif 2 * rl < min(bv, ef):
        mode = RL
    else:
        mode = BV if bv <= ef else EF
    return BlockPlan(mode, b, u, costs)


def encode_block(plan: BlockPlan, sample: int, values: Sequence[int]) -> EncodedBlock:
    if plan.b != len(values) or not values or plan.u != values[-1] - sample:
        raise ValueError("plan does not match the block values")
    mode = plan.mode
    if mode == NIL:
        if plan.u != plan.b:
            raise ValueError("NIL mode requires consecutive values")
        return EncodedBlock(NIL, BitString())
    if mode == BV:
        return EncodedBlock(BV, bits_from_positions([v - sample - 1 for v in values], plan.u))
    if mode == EF:
        ell = low_width(plan.u, plan.b)
        high, low = encode_parts([v - sample for v in values], ell, (plan.u >> ell) + 1)
        return EncodedBlock(EF, high + low)
    if mode == RL:
        w = BitWriter()
        for t in rl_tokens(sample, values):
            if type(t) is tuple:
                w.write(1, 1)  # delta(1)
                w.write_delta(t[1])
            else:
                w.write_delta(t)
        return EncodedBlock(RL, w.getvalue())
    raise ValueError(f"unknown block mode {mode}")


# -- decoding on raw payload integers ---------------------------------------------


def _ef_shape(length: int, b: int) -> tuple[int, int]:
    ell = (length - 2 * b - 1) // b
    nbuckets = length - b - b * ell
    if ell < 0 or nbuckets < 1:
        raise DecodeError("EF payload length inconsistent with block size")
    return ell, nbuckets


def decode_payload(mode: int, value: int, length: int, sample: int, b: int) -> list[int]:
    if b == 0:
        return []
    if mode == NIL:
        return list(range(sample + 1, sample + b + 1))
    if mode == BV:
        out = []
        bits = format(value, f"0{length}b")
        pos = bits.find("1")
        while pos >= 0:
            out.append(sample + pos + 1)
            pos = bits.find("1", pos + 1)
        if len(out) != b:
            raise DecodeError("BV payload does not hold b values")
        return out
    if mode == EF:
        ell, nbuckets = _ef_shape(length, b)
        hlen = b + nbuckets
        high = format(value >> (b * ell), f"0{hlen}b")
        low = value & ((1 << (b * ell)) - 1)
        mask = (1 << ell) - 1
        out = []
        bucket = 0
        i = 0
        for bit in high:
            if bit == "1":
                shift = (b - 1 - i) * ell
                out.append(sample + ((bucket << ell) | ((low >> shift) & mask)))
                i += 1
            else:
                bucket += 1
        if i != b:
            raise DecodeError("EF payload does not hold b values")
        return out
    if mode == RL:
        out = []
        cur = sample
        pos = 0
        while len(out) < b:
            gap, pos = delta_decode_int(value, length, pos)
            if gap == 1:
                run, pos = delta_decode_int(value, length, pos)
                out.extend(range(cur + 1, cur + run + 1))
                cur += run
            else:
                cur += gap
                out.append(cur)
        if len(out) != b:
            raise DecodeError("RL payload holds more than b values")
        return out
    raise DecodeError(f"unknown block mode {mode}")


def successor_payload(mode: int, value: int, length: int, sample: int, b: int, x: int):
    """Smallest ``(index, value)`` in the block with value >= x, or ``None``.

    ``index`` counts the block's coded values from 0 (the sample excluded).
    """
    if b == 0:
        return None
    t = x - sample
    if t < 1:
        t = 1
    if mode == NIL:
        if t > b:
            return None
        return t - 1, sample + t
    if mode == BV:
        if t > length:
            return None
        rest = value & ((1 << (length - t + 1)) - 1)
        if not rest:
            return None
        hb = rest.bit_length() - 1
        return (value >> (hb + 1)).bit_count(), sample + length - hb
    if mode == EF:
        ell = (length - 2 * b - 1) // b
        nbuckets = length - b - b * ell
        h = t >> ell
        if h >= nbuckets:
            return None
        hlen = b + nbuckets
        high = value >> (b * ell)
        # smallest p with h zeros among the first p high bits
        if h:
            lo, hi = h, h + b
            while lo < hi:
                mid = (lo + hi) >> 1
                if mid - (high >> (hlen - mid)).bit_count() >= h:
                    hi = mid
                else:
                    lo = mid + 1
            pos = lo
        else:
            pos = 0
        i = pos - h
        mask = (1 << ell) - 1
        while i < b:
            if (high >> (hlen - 1 - pos)) & 1:
                v = (h << ell) | ((value >> ((b - 1 - i) * ell)) & mask)
                if v >= t:
                    return i, sample + v
                i += 1
                pos += 1
            else:
                # everything in later buckets exceeds t: next element wins
                rest = high & ((1 << (hlen - pos)) - 1)
                pos = hlen - rest.bit_length()
                bucket = pos - i
                v = (bucket << ell) | ((value >> ((b - 1 - i) * ell)) & mask)
                return i, sample + v
        return None
    if mode == RL:
        return _rl_scan(value, length, sample, b, sample + t, sample + t)[0]
    raise DecodeError(f"unknown block mode {mode}")


def _rl_scan(value: int, length: int, sample: int, b: int, x1: int, x2: int):
    """Successors of ``x1 <= x2`` (both > sample) in one sequential pass."""
    cur = sample
    idx = 0
    pos = 0
    target = x1
    first = None
    while idx < b:
        # inline delta decode of the next gap
        rem = length - pos
        rest = value & ((1 << rem) - 1)
        if not rest:
            raise DecodeError(f"truncated delta codeword at bit {pos}")
        z = rem - rest.bit_length()
        pos += 2 * z + 1
        nb = (value >> (length - pos)) & ((1 << (z + 1)) - 1)
        if nb == 1:
            gap = 1
        else:
            pos += nb - 1
            if pos > length:
                raise DecodeError("truncated delta codeword")
            gap = (1 << (nb - 1)) | ((value >> (length - pos)) & ((1 << (nb - 1)) - 1))
        if gap == 1:
            run, pos = delta_decode_int(value, length, pos)
            while cur + run >= target:
                hit = (idx + target - cur - 1, target)
                if first is not None:
                    return first, hit
                first = hit
                if x2 == x1:
                    return hit, hit
                target = x2
            cur += run
            idx += run
        else:
            cur += gap
            while cur >= target:
                hit = (idx, cur)
                if first is not None:
                    return first, hit
                first = hit
                if x2 == x1:
                    return hit, hit
                target = x2
            idx += 1
    return first, None


def successor_pair_payload(mode: int, value: int, length: int, sample: int, b: int, x1: int, x2: int):
    """``(successor(x1), successor(x2))`` for ``x1 <= x2``.

    RL blocks are scanned once, the second search resuming where the first
    stopped; the other modes answer each target directly.
    """
    if mode == RL and b:
        lo = sample + 1
        return _rl_scan(value, length, sample, b, max(x1, lo), max(x2, lo))
    return (
        successor_payload(mode, value, length, sample, b, x1),
        successor_payload(mode, value, length, sample, b, x2),
    )


def decode_block(block: EncodedBlock | BitString, mode: int, sample: int, b: int) -> list[int]:
    payload = block.payload if isinstance(block, EncodedBlock) else block
    return decode_payload(mode, payload.value, payload.length, sample, b)


def block_successor(block: EncodedBlock | BitString, mode: int, sample: int, b: int, x: int):
    payload = block.payload if isinstance(block, EncodedBlock) else block
    return successor_payload(mode, payload.value, payload.length, sample, b, x)
